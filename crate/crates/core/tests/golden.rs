mod common;

use common::*;
use wrinkle_core::geometry::WrinkleDescriptor;
use wrinkle_core::homogenization::{homogenize_wrinkle, oracle_fine_average, Discretization};
use wrinkle_core::material::{
    effective_engineering_constants, stiffness_from_engineering, EngineeringConstants, Layup,
    StiffnessMatrix,
};

fn setup(f: &Fixture) -> (Layup, WrinkleDescriptor) {
    let layup = Layup::from_notation(
        f.notation,
        PLY_THICKNESS,
        EngineeringConstants::carbon_epoxy(),
    )
    .unwrap();
    let w = WrinkleDescriptor::for_layup(f.amplitude, f.wavelength, &layup).unwrap();
    (layup, w)
}

/// Largest deviation from the fixture, relative to each entry and floored
/// at `1e-6` of the largest entry.
fn deviation(c: &StiffnessMatrix, f: &Fixture) -> f64 {
    let rows = c.to_rows();
    let scale = f.entries.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for (i, row) in rows.iter().enumerate() {
        for (j, got) in row.iter().enumerate().skip(i) {
            let want = f
                .entries
                .iter()
                .find(|e| e.0 == (i, j))
                .map_or(0.0, |e| e.1);
            worst = worst.max((got - want).abs() / want.abs().max(1e-6 * scale));
        }
    }
    worst
}

#[test]
fn oracle_reproduces_frozen_values() {
    for f in [&SPECIMEN_II, &ROW1_LOW, &ROW3_SEVERE] {
        let (layup, w) = setup(f);
        let c = oracle_fine_average(&layup, &w).unwrap();
        assert!(
            deviation(&c, f) < 1e-10,
            "{}: {:e}",
            f.notation,
            deviation(&c, f)
        );
        let ex = effective_engineering_constants(&c).unwrap().e11;
        assert!((ex - f.e_x).abs() < 1e-10 * f.e_x);
    }
}

#[test]
fn default_discretization_is_close_to_oracle() {
    for f in [&SPECIMEN_II, &ROW1_LOW, &ROW3_SEVERE] {
        let (layup, w) = setup(f);
        let c = homogenize_wrinkle(&layup, &w, &Discretization::default()).unwrap();
        assert!(
            deviation(&c, f) < 1e-4,
            "{}: {}",
            f.notation,
            deviation(&c, f)
        );
    }
}

#[test]
fn specimen_two_is_softer_along_fibers() {
    let cbar = stiffness_from_engineering(&EngineeringConstants::carbon_epoxy()).unwrap();
    let c11 = SPECIMEN_II.entries[0].1;
    assert!(c11 < cbar.get(0, 0));
}

#[test]
fn e_x_sweep_matches_fixture() {
    let layup = Layup::from_notation(
        "[0]_30",
        PLY_THICKNESS,
        EngineeringConstants::carbon_epoxy(),
    )
    .unwrap();
    let mut last = f64::INFINITY;
    for (ratio, frozen) in E_X_SWEEP {
        let w = WrinkleDescriptor::for_layup(ratio * 5.0, 5.0, &layup).unwrap();
        let c = homogenize_wrinkle(&layup, &w, &Discretization::default()).unwrap();
        let ex = effective_engineering_constants(&c).unwrap().e11;
        assert!((ex - frozen).abs() < 1e-4 * frozen, "ratio {ratio}");
        assert!(ex < last);
        last = ex;
    }
}
