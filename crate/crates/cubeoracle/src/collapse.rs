//! Elementary collapses: a cell with exactly one coface is removed together
//! with that coface until no free face remains.

use std::collections::VecDeque;

use crate::complex::CubicalComplex;

/// Collapses `c` in place and returns the number of removed pairs. The
/// result is deterministic: candidates are visited in flat-index order.
pub fn collapse_in_place(c: &mut CubicalComplex) -> usize {
    let mut queue: VecDeque<usize> = c.cell_indices().collect();
    let mut pairs = 0;
    while let Some(s) = queue.pop_front() {
        if !c.is_present(s) {
            continue;
        }
        let cof = c.present_cofaces(s);
        if cof.len() != 1 {
            continue;
        }
        let t = cof[0];
        c.remove(s);
        c.remove(t);
        pairs += 1;
        for (f, _, _) in c.faces(t).into_iter().chain(c.faces(s)) {
            if c.is_present(f) {
                queue.push_back(f);
            }
        }
    }
    pairs
}

/// Collapsed copy of `c`.
pub fn collapse(c: &CubicalComplex) -> CubicalComplex {
    let mut out = c.clone();
    collapse_in_place(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::euler_characteristic;

    #[test]
    fn filled_square_collapses_to_a_vertex() {
        let s = CubicalComplex::from_top_cubes(2, 1, [vec![0, 0]]);
        let r = collapse(&s);
        assert_eq!(r.cell_counts(), vec![1, 0, 0]);
        assert!(r.is_face_closed());
    }

    #[test]
    fn hollow_square_has_no_free_faces() {
        let h = CubicalComplex::from_cells(2, 1, [vec![1, 0], vec![1, 2], vec![0, 1], vec![2, 1]]);
        assert_eq!(collapse(&h), h);
    }

    #[test]
    fn solid_block_collapses_to_a_point() {
        let cubes = (0..3).flat_map(|i| (0..3).flat_map(move |j| (0..3).map(move |k| vec![i, j, k])));
        let b = CubicalComplex::from_top_cubes(3, 3, cubes);
        let r = collapse(&b);
        assert_eq!(r.num_cells(), 1);
        assert_eq!(euler_characteristic(&b), 1);
    }

    #[test]
    fn ring_of_squares_collapses_to_a_cycle() {
        let cubes = (0..3)
            .flat_map(|i| (0..3).map(move |j| vec![i, j]))
            .filter(|v| v != &vec![1, 1]);
        let ring = CubicalComplex::from_top_cubes(2, 3, cubes);
        let r = collapse(&ring);
        assert!(r.is_face_closed());
        assert_eq!(euler_characteristic(&r), 0);
        assert_eq!(r.cell_counts()[2], 0);
    }
}
