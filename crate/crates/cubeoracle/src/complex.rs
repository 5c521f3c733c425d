//! Cubical complexes on a uniform grid over `[-delta, delta]^d`.
//!
//! Cells are addressed in doubled coordinates: each axis runs over
//! `0..=2N`, an even coordinate `2i` is the grid vertex `i`, an odd
//! coordinate `2i + 1` is the elementary interval `[i, i + 1]`. A cell's
//! dimension is its number of odd coordinates. Presence is stored densely.

use rayon::prelude::*;

use morsefib::polyring::{CompiledPoly, Polynomial};
use morsefib::{Interval, IntervalBox};

use crate::OracleError;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;
/// Default cap on the number of top cubes `N^d`.
pub const TOP_CUBE_CAP: u64 = 20_000_000;

/// How top cubes are selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// The cube's center satisfies the constraints.
    #[default]
    Center,
    /// Interval evaluation cannot exclude the cube.
    Interval,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "center" | "centre" => Ok(Mode::Center),
            "interval" => Ok(Mode::Interval),
            other => Err(format!("unknown mode {other:?}; expected center or interval")),
        }
    }
}

/// `{x in [-delta, delta]^d : a <= g(x) <= b, |x| <= delta}` sampled on an
/// `N^d` grid.
#[derive(Clone, Debug)]
pub struct RegionSpec {
    pub g: Polynomial,
    pub window: (f64, f64),
    pub delta: f64,
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalComplex {
    dim: usize,
    resolution: usize,
    present: Vec<bool>,
}

impl CubicalComplex {
    /// Empty complex on the grid with `resolution` cubes per axis.
    pub fn empty(dim: usize, resolution: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} unsupported");
        assert!(resolution >= 1);
        let side = 2 * resolution + 1;
        CubicalComplex {
            dim,
            resolution,
            present: vec![false; side.pow(dim as u32)],
        }
    }

    /// Face closure of the given top cubes (grid indices in `0..N`).
    pub fn from_top_cubes<I>(dim: usize, resolution: usize, cubes: I) -> Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut c = Self::empty(dim, resolution);
        for cube in cubes {
            let coords: Vec<usize> = cube.iter().map(|&i| 2 * i + 1).collect();
            c.insert_closed(&coords);
        }
        c
    }

    /// Face closure of the given cells in doubled coordinates.
    pub fn from_cells<I>(dim: usize, resolution: usize, cells: I) -> Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut c = Self::empty(dim, resolution);
        for cell in cells {
            c.insert_closed(&cell);
        }
        c
    }

    fn side(&self) -> usize {
        2 * self.resolution + 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub(crate) fn index(&self, coords: &[usize]) -> usize {
        let side = self.side();
        coords.iter().rev().fold(0, |acc, &c| acc * side + c)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let side = self.side();
        (0..self.dim)
            .map(|_| {
                let c = idx % side;
                idx /= side;
                c
            })
            .collect()
    }

    pub fn contains(&self, coords: &[usize]) -> bool {
        self.present[self.index(coords)]
    }

    pub(crate) fn is_present(&self, idx: usize) -> bool {
        self.present[idx]
    }

    pub(crate) fn remove(&mut self, idx: usize) {
        self.present[idx] = false;
    }

    /// Dimension of the cell at flat index `idx`.
    pub(crate) fn cell_dim(&self, idx: usize) -> usize {
        let side = self.side();
        let mut idx = idx;
        let mut k = 0;
        for _ in 0..self.dim {
            k += (idx % side) & 1;
            idx /= side;
        }
        k
    }

    /// Inserts a cell and all of its faces.
    fn insert_closed(&mut self, coords: &[usize]) {
        assert_eq!(coords.len(), self.dim);
        assert!(coords.iter().all(|&c| c < self.side()), "cell outside the grid");
        let odd: Vec<usize> = (0..self.dim).filter(|&i| coords[i] % 2 == 1).collect();
        let mut c = coords.to_vec();
        // each odd axis contributes {c-1, c, c+1}
        for mask in 0..3usize.pow(odd.len() as u32) {
            let mut m = mask;
            for &axis in &odd {
                c[axis] = coords[axis] + (m % 3) - 1;
                m /= 3;
            }
            let i = self.index(&c);
            self.present[i] = true;
        }
    }

    /// Flat indices of the codimension-one faces, as `(index, axis, upper)`
    /// in increasing axis order.
    pub(crate) fn faces(&self, idx: usize) -> Vec<(usize, usize, bool)> {
        let side = self.side();
        let mut out = Vec::with_capacity(2 * self.dim);
        let mut stride = 1;
        let mut rest = idx;
        for axis in 0..self.dim {
            let c = rest % side;
            rest /= side;
            if c % 2 == 1 {
                out.push((idx - stride, axis, false));
                out.push((idx + stride, axis, true));
            }
            stride *= side;
        }
        out
    }

    /// Flat indices of the present cofaces of dimension one higher.
    pub(crate) fn present_cofaces(&self, idx: usize) -> Vec<usize> {
        let side = self.side();
        let mut out = Vec::new();
        let mut stride = 1;
        let mut rest = idx;
        for _ in 0..self.dim {
            let c = rest % side;
            rest /= side;
            if c % 2 == 0 {
                if c > 0 && self.present[idx - stride] {
                    out.push(idx - stride);
                }
                if c + 1 < side && self.present[idx + stride] {
                    out.push(idx + stride);
                }
            }
            stride *= side;
        }
        out
    }

    /// Present cells in increasing flat-index order.
    pub fn cell_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| p.then_some(i))
    }

    /// Number of cells of each dimension `0..=d`.
    pub fn cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim + 1];
        for i in self.cell_indices() {
            counts[self.cell_dim(i)] += 1;
        }
        counts
    }

    pub fn num_cells(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.present.iter().any(|&p| p)
    }

    /// Every face of every stored cell is stored.
    pub fn is_face_closed(&self) -> bool {
        self.cell_indices()
            .all(|i| self.faces(i).iter().all(|&(f, _, _)| self.present[f]))
    }
}

/// `Σ_k (-1)^k · #(k-cells)`.
pub fn euler_characteristic(c: &CubicalComplex) -> i64 {
    c.cell_counts()
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

/// Samples the region on the grid and returns the face closure of the
/// selected top cubes.
pub fn build_region_complex(region: &RegionSpec, mode: Mode) -> Result<CubicalComplex, OracleError> {
    let d = region.g.nvars();
    let n = region.resolution;
    if d == 0 || d > MAX_DIM {
        return Err(OracleError::Dimension(d));
    }
    if n < 4 {
        return Err(OracleError::Resolution(n));
    }
    let (a, b) = region.window;
    if !(a <= b) {
        return Err(OracleError::Window { a, b });
    }
    let tops = (n as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
    if tops > TOP_CUBE_CAP {
        return Err(OracleError::Budget {
            what: "top cubes",
            requested: tops,
            cap: TOP_CUBE_CAP,
        });
    }
    let delta = region.delta;
    let h = 2.0 * delta / n as f64;
    let g = CompiledPoly::new(&region.g);
    let delta_sq = delta * delta;
    let window = Interval::new(a, b);
    let delta_sq_iv = Interval::point(delta).sqr();

    let multi = |mut k: usize| -> Vec<usize> {
        (0..d)
            .map(|_| {
                let i = k % n;
                k /= n;
                i
            })
            .collect()
    };
    let selected: Vec<bool> = (0..tops as usize)
        .into_par_iter()
        .map(|k| {
            let idx = multi(k);
            match mode {
                Mode::Center => {
                    let x: Vec<f64> = idx.iter().map(|&i| -delta + (i as f64 + 0.5) * h).collect();
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    if r2 > delta_sq {
                        return false;
                    }
                    let v = g.eval_f64(&x);
                    a <= v && v <= b
                }
                Mode::Interval => {
                    let bx = IntervalBox::new(
                        idx.iter()
                            .map(|&i| {
                                let lo = -delta + i as f64 * h;
                                Interval::new(lo, lo + h)
                            })
                            .collect(),
                    );
                    if bx.norm_sq().lo > delta_sq_iv.hi {
                        return false;
                    }
                    g.eval_interval(&bx).intersects(&window)
                }
            }
        })
        .collect();
    Ok(CubicalComplex::from_top_cubes(
        d,
        n,
        selected
            .iter()
            .enumerate()
            .filter_map(|(k, &s)| s.then(|| multi(k))),
    ))
}
