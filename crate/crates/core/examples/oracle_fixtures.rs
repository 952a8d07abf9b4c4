//! Prints brute-force reference values used as frozen test fixtures.
//!
//! Run with `cargo run --release -p wrinkle-core --example oracle_fixtures`.

use std::time::Instant;

use wrinkle_core::geometry::{WrinkleDescriptor, SEVERITY_TABLE};
use wrinkle_core::homogenization::{homogenize_wrinkle, oracle_fine_average, Discretization};
use wrinkle_core::material::{effective_engineering_constants, EngineeringConstants, Layup};

fn report(label: &str, notation: &str, wavelength: f64, amplitude: f64) {
    let layup = Layup::from_notation(notation, 0.25, EngineeringConstants::carbon_epoxy()).unwrap();
    let w = WrinkleDescriptor::for_layup(amplitude, wavelength, &layup).unwrap();
    let t = Instant::now();
    let c = oracle_fine_average(&layup, &w).unwrap();
    let elapsed = t.elapsed();
    let d = homogenize_wrinkle(&layup, &w, &Discretization::default()).unwrap();
    let ec = effective_engineering_constants(&c).unwrap();
    println!("{label}: {notation} lambda={wavelength} A={amplitude} ({elapsed:.2?})");
    for row in c.to_rows() {
        println!(
            "    [{}],",
            row.iter()
                .map(|v| format!("{v:.12e}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    println!(
        "    E_x = {:.12e}  default-vs-oracle = {:.3e}",
        ec.e11,
        d.relative_distance(&c)
    );
}

fn main() {
    report("specimen II", "[0]_30", 8.3, 1.0);
    report("table 3 row 1", "[0/90]_2s", 5.0, 0.5);
    report("table 3 row 3", "[0/90/±45/0]_3s", 5.0, 2.5);
    println!("E_x sweep, [0]_30, lambda = 5 mm:");
    let layup = Layup::from_notation("[0]_30", 0.25, EngineeringConstants::carbon_epoxy()).unwrap();
    for (ratio, _) in SEVERITY_TABLE {
        let w = WrinkleDescriptor::for_layup(ratio * 5.0, 5.0, &layup).unwrap();
        let c = oracle_fine_average(&layup, &w).unwrap();
        println!(
            "    ({ratio:.2}, {:.12e}),",
            effective_engineering_constants(&c).unwrap().e11
        );
    }
}
