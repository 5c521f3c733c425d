//! Integer homology of cubical complexes.

use num_bigint::BigInt;

use crate::complex::CubicalComplex;
use crate::snf::{sparse_smith_normal_form, SparseMatrix};
use crate::OracleError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    /// Rank of `H_k` for `k = 0..=d`.
    pub betti: Vec<usize>,
    /// Elementary divisors greater than one of `H_k`.
    pub torsion: Vec<Vec<BigInt>>,
}

impl HomologyResult {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }
}

/// Boundary matrix `∂_k` from k-cells (columns) to (k-1)-cells (rows), with
/// `∂Q = Σ_j (-1)^(j-1) (A_j^+ - A_j^-)` over the nondegenerate axes of `Q`
/// in increasing order.
fn boundary_matrix(c: &CubicalComplex, cells: &[Vec<usize>], position: &[u32], k: usize) -> SparseMatrix {
    let mut m = SparseMatrix::new(cells[k - 1].len(), cells[k].len());
    for (col, &idx) in cells[k].iter().enumerate() {
        let mut sign = 1i64;
        let mut last_axis = None;
        for (face, axis, upper) in c.faces(idx) {
            if last_axis.is_some_and(|a| a != axis) {
                sign = -sign;
            }
            last_axis = Some(axis);
            let row = position[face] as usize;
            m.cols[col].push((row, if upper { sign } else { -sign }));
        }
    }
    m
}

/// Rank of `∂_1`, the number of edges in a spanning forest.
fn graph_rank(c: &CubicalComplex, edges: &[usize], position: &[u32], vertices: usize) -> usize {
    let mut parent: Vec<u32> = (0..vertices as u32).collect();
    fn root(parent: &mut [u32], mut v: u32) -> u32 {
        while parent[v as usize] != v {
            let up = parent[parent[v as usize] as usize];
            parent[v as usize] = up;
            v = up;
        }
        v
    }
    let mut rank = 0;
    for &idx in edges {
        let ends: Vec<u32> = c.faces(idx).iter().map(|&(face, _, _)| position[face]).collect();
        let (a, b) = (root(&mut parent, ends[0]), root(&mut parent, ends[1]));
        if a != b {
            parent[a as usize] = b;
            rank += 1;
        }
    }
    rank
}

/// Betti numbers and torsion of a face-closed complex.
pub fn cubical_homology(c: &CubicalComplex) -> Result<HomologyResult, OracleError> {
    let d = c.ambient_dim();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); d + 1];
    let total = {
        let side = 2 * c.resolution() + 1;
        side.pow(d as u32)
    };
    let mut position = vec![u32::MAX; total];
    for idx in c.cell_indices() {
        let k = c.cell_dim(idx);
        position[idx] = cells[k].len() as u32;
        cells[k].push(idx);
    }
    // snf[k] describes ∂_k for k = 1..=d
    let mut ranks = vec![0usize; d + 2];
    let mut torsion = vec![Vec::new(); d + 1];
    for k in 1..=d {
        if cells[k].is_empty() || cells[k - 1].is_empty() {
            continue;
        }
        if k == 1 {
            // Incidence matrices of graphs are totally unimodular: H_0 is free
            // and the rank of ∂_1 is #vertices - #components.
            ranks[1] = graph_rank(c, &cells[1], &position, cells[0].len());
            continue;
        }
        let snf = sparse_smith_normal_form(&boundary_matrix(c, &cells, &position, k))?;
        ranks[k] = snf.rank();
        torsion[k - 1] = snf.nontrivial;
    }
    let betti = (0..=d)
        .map(|k| cells[k].len() - ranks[k] - ranks[k + 1])
        .collect();
    Ok(HomologyResult { betti, torsion })
}
