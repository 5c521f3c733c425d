//! Oracle runs on regions with known topology.

use cubeoracle::{
    build_region_complex, collapse, cubical_homology, euler_characteristic, fibre_nonempty, smith_normal_form_i64,
    verify_chi, Mode, Nonemptiness, OracleConfig, RegionSpec,
};
use morsefib::certfind::{certify_critical_points, Tolerances};
use morsefib::fibretop::Side;
use morsefib::parse_polynomial;

fn region(text: &str, vars: &[&str], window: (f64, f64), resolution: usize) -> cubeoracle::CubicalComplex {
    let spec = RegionSpec {
        g: parse_polynomial(text, vars).unwrap(),
        window,
        delta: 1.0,
        resolution,
    };
    build_region_complex(&spec, Mode::Center).unwrap()
}

#[test]
fn annulus_and_disc() {
    let annulus = region("x^2 + y^2", &["x", "y"], (0.2, 0.5), 64);
    let h = cubical_homology(&collapse(&annulus)).unwrap();
    assert_eq!(h.betti, vec![1, 1, 0]);
    assert_eq!(euler_characteristic(&annulus), 0);

    let disc = region("x^2 + y^2", &["x", "y"], (-1.0, 0.5), 64);
    assert_eq!(cubical_homology(&collapse(&disc)).unwrap().betti, vec![1, 0, 0]);
}

#[test]
fn spherical_shell() {
    let shell = region("x^2 + y^2 + z^2", &["x", "y", "z"], (0.2, 0.6), 24);
    let h = cubical_homology(&collapse(&shell)).unwrap();
    assert_eq!(h.betti, vec![1, 0, 1, 0]);
    assert!(h.is_torsion_free());
}

#[test]
fn saddle_chi_both_sides() {
    let f = parse_polynomial("x^2 - y^2", &["x", "y"]).unwrap();
    let pts = certify_critical_points(&f, 1.0, &Tolerances::default()).unwrap();
    for side in [Side::Positive, Side::Negative] {
        let r = verify_chi(&f, 1.0, 0.25, &pts, side, &OracleConfig::default()).unwrap();
        assert_eq!(r.formula, 2);
        assert!(r.agrees);
    }
}

#[test]
fn empty_negative_fibre_of_a_minimum() {
    let f = parse_polynomial("x^2 + y^2", &["x", "y"]).unwrap();
    assert_eq!(fibre_nonempty(&f, -0.25, 1.0), Nonemptiness::Empty);
    assert!(region("x^2 + y^2", &["x", "y"], (-0.3, -0.2), 32).is_empty());
}

#[test]
fn snf_of_a_torsion_matrix() {
    let s = smith_normal_form_i64(&[vec![2, 0], vec![0, 6]]);
    assert_eq!(s.rank(), 2);
    let d: Vec<String> = s.divisors().iter().map(ToString::to_string).collect();
    assert_eq!(d, vec!["2", "6"]);
    let s = smith_normal_form_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    let d: Vec<String> = s.divisors().iter().map(ToString::to_string).collect();
    assert_eq!(d, vec!["2", "6", "12"]);
}
