//! Certified (non)emptiness of a level set `{g = level}` inside the closed
//! ball of radius `delta`.

use morsefib::polyring::{CompiledPoly, Polynomial};
use morsefib::{Interval, IntervalBox};

const SEGMENT_SAMPLES: usize = 16;
const BISECTIONS: usize = 60;
const MAX_DEPTH: usize = 48;
const MAX_BOXES: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Nonemptiness {
    /// The witness box lies in the open ball and holds a point of the level
    /// set: its two extreme corners bracket a certified sign change of
    /// `g - level` along a segment.
    Nonempty { witness: IntervalBox },
    /// Interval evaluation excludes the level on the whole closed ball.
    Empty,
    /// Neither verdict was reached within the budget.
    Undecided,
}

impl Nonemptiness {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, Nonemptiness::Nonempty { .. })
    }
}

struct Probe<'a> {
    g: &'a CompiledPoly,
    level: f64,
    delta_sq: f64,
}

impl Probe<'_> {
    /// Certified sign of `g(x) - level`, or 0 when undecided.
    fn sign(&self, x: &[f64]) -> i8 {
        let v = self.g.eval_point_interval(x) - Interval::point(self.level);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    fn strictly_inside(&self, x: &[f64]) -> bool {
        IntervalBox::from_point(x).norm_sq().hi < self.delta_sq
    }

    /// Bisects the segment `[a, b]` whose endpoints have opposite certified
    /// signs down to a tiny witness box.
    fn bracket(&self, a: &[f64], b: &[f64], sa: i8) -> IntervalBox {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        for _ in 0..BISECTIONS {
            let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            if m == a || m == b {
                break;
            }
            match self.sign(&m) {
                0 => break,
                s if s == sa => a = m,
                _ => b = m,
            }
        }
        let lo = IntervalBox::from_point(&a);
        lo.hull(&IntervalBox::from_point(&b))
    }

    /// Sign change along the segment between two points of the open ball.
    fn scan_segment(&self, p: &[f64], q: &[f64]) -> Option<IntervalBox> {
        let mut prev: Option<(Vec<f64>, i8)> = None;
        for k in 0..=SEGMENT_SAMPLES {
            let s = k as f64 / SEGMENT_SAMPLES as f64;
            let x: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + s * (b - a)).collect();
            if !self.strictly_inside(&x) {
                continue;
            }
            let sx = self.sign(&x);
            if sx == 0 {
                continue;
            }
            if let Some((y, sy)) = &prev {
                if *sy != sx {
                    let w = self.bracket(y, &x, *sy);
                    if w.norm_sq().hi < self.delta_sq {
                        return Some(w);
                    }
                }
            }
            prev = Some((x, sx));
        }
        None
    }
}

/// All directions in `{-1, 0, 1}^d` except zero, scaled to length `r`.
fn star_directions(d: usize, r: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for mask in 0..3usize.pow(d as u32) {
        let mut m = mask;
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let c = (m % 3) as f64 - 1.0;
                m /= 3;
                c
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.push(v.iter().map(|x| x * r / norm).collect());
        }
    }
    out
}

/// Decides whether `{g = level} ∩ B_delta` is nonempty.
///
/// Witnesses are searched along rays from the origin first, then along the
/// diagonals of undecided boxes met while trying to exclude the level set by
/// interval subdivision.
pub fn fibre_nonempty(g: &Polynomial, level: f64, delta: f64) -> Nonemptiness {
    let d = g.nvars();
    let compiled = CompiledPoly::new(g);
    let delta_sq = Interval::point(delta).sqr().lo;
    let probe = Probe {
        g: &compiled,
        level,
        delta_sq,
    };
    let origin = vec![0.0; d];
    for dir in star_directions(d, delta * (1.0 - 1.0 / 1024.0)) {
        if let Some(w) = probe.scan_segment(&origin, &dir) {
            return Nonemptiness::Nonempty { witness: w };
        }
    }

    let mut stack = vec![(IntervalBox::cube(d, delta), 0usize)];
    let mut count = 0;
    let mut undecided = false;
    let delta_sq_hi = Interval::point(delta).sqr().hi;
    while let Some((b, depth)) = stack.pop() {
        count += 1;
        if b.norm_sq().lo > delta_sq_hi {
            continue;
        }
        let v = compiled.eval_interval(&b);
        if !v.contains(level) {
            continue;
        }
        let lo: Vec<f64> = b.sides().iter().map(|s| s.lo).collect();
        let hi: Vec<f64> = b.sides().iter().map(|s| s.hi).collect();
        if let Some(w) = probe.scan_segment(&lo, &hi) {
            return Nonemptiness::Nonempty { witness: w };
        }
        if depth >= MAX_DEPTH || count > MAX_BOXES {
            undecided = true;
            continue;
        }
        let (l, r) = b.bisect();
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }
    if undecided {
        Nonemptiness::Undecided
    } else {
        Nonemptiness::Empty
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use morsefib::parse_polynomial;

    #[test]
    fn quartic_below_zero_is_empty() {
        let g = parse_polynomial("x^4", &["x"]).unwrap();
        assert_eq!(fibre_nonempty(&g, -0.1, 1.0), Nonemptiness::Empty);
    }

    #[test]
    fn hyperbola_has_a_witness() {
        let g = parse_polynomial("x*y", &["x", "y"]).unwrap();
        match fibre_nonempty(&g, 0.1, 1.0) {
            Nonemptiness::Nonempty { witness } => {
                assert!(witness.max_width() < 1e-12);
                let p = witness.midpoint();
                assert!((p[0] * p[1] - 0.1).abs() < 1e-12);
                // found on a diagonal ray
                assert!((p[0].abs() - 0.1f64.sqrt()).abs() < 1e-9);
                assert!(witness.norm_sq().hi < 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn circle_inside_unit_ball() {
        let g = parse_polynomial("x^2 + y^2", &["x", "y"]).unwrap();
        assert!(fibre_nonempty(&g, 0.5, 1.0).is_nonempty());
        assert_eq!(fibre_nonempty(&g, 1.5, 1.0), Nonemptiness::Empty);
    }

    #[test]
    fn level_set_off_the_rays() {
        // a small bump centred away from every star direction
        let g = parse_polynomial("(x - 3/10)^2 + (y - 7/10)^2", &["x", "y"]).unwrap();
        let r = fibre_nonempty(&g, 1e-4, 1.0);
        match r {
            Nonemptiness::Nonempty { witness } => {
                let p = witness.midpoint();
                let v = (p[0] - 0.3).powi(2) + (p[1] - 0.7).powi(2);
                assert!((v - 1e-4).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }
}
