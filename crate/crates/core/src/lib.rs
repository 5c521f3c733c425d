//! Certified morsifications of real isolated hypersurface singularities and
//! the topology of their real Milnor fibres.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`polyring`]: exact polynomials, interval evaluation, derivatives;
//! * [`morsify`]: deformation families `F(x, t)` and strong/weak verdicts;
//! * [`certfind`]: certified critical points of `f_t` inside the Milnor ball,
//!   their Morse indices, and Milnor-scale selection;
//! * [`fibretop`]: Euler characteristics, handle data, Poincaré polynomials
//!   and vanishing-cycle degrees of the positive and negative fibres.

pub mod certfind;
pub mod fibretop;
pub mod interval;
pub mod morsify;
pub mod polyring;

pub use interval::{Interval, IntervalBox};
pub use polyring::{parse_polynomial, Polynomial};
