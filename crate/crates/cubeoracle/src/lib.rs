//! Brute-force topology oracle: cubical approximations of regions
//! `{a <= g <= b} ∩ B_delta` on uniform grids, their Euler characteristics,
//! and integer homology through the Smith normal form.

pub mod collapse;
pub mod complex;
pub mod homology;
pub mod nonempty;
pub mod snf;
pub mod verify;

pub use collapse::{collapse, collapse_in_place};
pub use complex::{build_region_complex, euler_characteristic, CubicalComplex, Mode, RegionSpec};
pub use homology::{cubical_homology, HomologyResult};
pub use nonempty::{fibre_nonempty, Nonemptiness};
pub use snf::{smith_normal_form, smith_normal_form_i64, sparse_smith_normal_form, SnfResult, SparseMatrix};
pub use verify::{default_resolution, default_window, oracle_chi, verify_chi, ChiComparison, OracleConfig};

use morsefib::fibretop::Side;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("ambient dimension {0} unsupported (1 to 4)")]
    Dimension(usize),
    #[error("resolution {0} too small (at least 4)")]
    Resolution(usize),
    #[error("empty level window [{a}, {b}]")]
    Window { a: f64, b: f64 },
    #[error("{what} budget exceeded: {requested} > {cap}")]
    Budget {
        what: &'static str,
        requested: u64,
        cap: u64,
    },
    #[error("critical value {value} lies in the window [{}, {}]", window.0, window.1)]
    CriticalValueInWindow { value: f64, window: (f64, f64) },
    #[error("critical point without a certified index")]
    MissingIndex,
    #[error("{0}")]
    Topology(String),
    #[error("{side} fibre oracle unconverged: chi = {} at N = {} but {} at N = {}", coarse.1, coarse.0, fine.1, fine.0)]
    Unconverged {
        side: Side,
        coarse: (usize, i64),
        fine: (usize, i64),
    },
}
