//! Cross-validation of the index formula for `chi(F^±)` against cubical
//! approximations of thickened fibres.

use serde::{Deserialize, Serialize};

use morsefib::certfind::CertifiedCriticalPoint;
use morsefib::fibretop::{khimshiashvili_chi, Side};
use morsefib::Polynomial;

use crate::complex::{build_region_complex, euler_characteristic, Mode, RegionSpec};
use crate::OracleError;

/// Default grid resolution `N` per ambient dimension; the oracle also runs
/// at `2N`.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 128,
        3 => 32,
        _ => 12,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub resolution: Option<usize>,
    pub mode: Mode,
    /// Half-width `w` of the window `[±eta - w, ±eta + w]`.
    pub window: Option<f64>,
    /// Also compute `chi` of the filled region `{|f_t| <= eta}`.
    pub filled: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            resolution: None,
            mode: Mode::Center,
            window: None,
            filled: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiComparison {
    pub side: Side,
    pub formula: i64,
    /// `(N, chi)` pairs, coarse first.
    pub oracle: Vec<(usize, i64)>,
    pub window: (f64, f64),
    pub filled_chi: Option<i64>,
    pub agrees: bool,
}

/// `min(eta / 4, gap / 2)`, `gap` being the distance from `±eta` to the
/// nearest certified critical value.
pub fn default_window(eta: f64, points: &[CertifiedCriticalPoint], side: Side) -> f64 {
    let level = eta * side.sign() as f64;
    let gap = points
        .iter()
        .map(|p| {
            if p.value.contains(level) {
                0.0
            } else {
                (p.value.lo - level).abs().min((p.value.hi - level).abs())
            }
        })
        .fold(f64::INFINITY, f64::min);
    (eta / 4.0).min(gap / 2.0)
}

/// Euler characteristic of `{a <= g <= b} ∩ B_delta` at resolution `n`.
pub fn oracle_chi(g: &Polynomial, window: (f64, f64), delta: f64, n: usize, mode: Mode) -> Result<i64, OracleError> {
    let spec = RegionSpec {
        g: g.clone(),
        window,
        delta,
        resolution: n,
    };
    Ok(euler_characteristic(&build_region_complex(&spec, mode)?))
}

/// Compares the index formula for one fibre with the oracle at `N` and
/// `2N`; the oracle values must agree with each other before they are
/// compared with the formula.
pub fn verify_chi(
    f_t: &Polynomial,
    delta: f64,
    eta: f64,
    points: &[CertifiedCriticalPoint],
    side: Side,
    cfg: &OracleConfig,
) -> Result<ChiComparison, OracleError> {
    let d = f_t.nvars();
    if d == 0 {
        return Err(OracleError::Dimension(0));
    }
    let n_fibre = d - 1;
    let indices: Vec<usize> = points
        .iter()
        .map(|p| p.index.ok_or(OracleError::MissingIndex))
        .collect::<Result<_, _>>()?;
    let (chi_plus, chi_minus) = khimshiashvili_chi(&indices, n_fibre).map_err(|e| OracleError::Topology(e.to_string()))?;
    let formula = match side {
        Side::Positive => chi_plus,
        Side::Negative => chi_minus,
    };
    let w = cfg.window.unwrap_or_else(|| default_window(eta, points, side));
    let level = eta * side.sign() as f64;
    let window = (level - w, level + w);
    if !(w > 0.0) {
        return Err(OracleError::Window {
            a: window.0,
            b: window.1,
        });
    }
    if let Some(p) = points
        .iter()
        .find(|p| p.value.hi >= window.0 && p.value.lo <= window.1)
    {
        return Err(OracleError::CriticalValueInWindow {
            value: p.value.mid(),
            window,
        });
    }
    let n = cfg.resolution.unwrap_or_else(|| default_resolution(d));
    let mut oracle = Vec::with_capacity(2);
    for res in [n, 2 * n] {
        oracle.push((res, oracle_chi(f_t, window, delta, res, cfg.mode)?));
    }
    if oracle[0].1 != oracle[1].1 {
        return Err(OracleError::Unconverged {
            side,
            coarse: oracle[0],
            fine: oracle[1],
        });
    }
    let filled_chi = if cfg.filled {
        Some(oracle_chi(f_t, (-eta, eta), delta, n, cfg.mode)?)
    } else {
        None
    };
    Ok(ChiComparison {
        side,
        formula,
        agrees: oracle[1].1 == formula,
        oracle,
        window,
        filled_chi,
    })
}
