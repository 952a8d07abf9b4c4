use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrinkle_core::fpp::{
    displacement_extract, regrid, regrid_with, GridSpec, PointCloud, RegridOptions,
};
use wrinkle_core::Error;

fn scatter(n: usize, h: f64, seed: u64, f: impl Fn(f64, f64) -> f64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n * n)
        .map(|k| {
            let x = ((k % n) as f64 + rng.gen_range(-0.35..0.35)) * h;
            let y = ((k / n) as f64 + rng.gen_range(-0.35..0.35)) * h;
            [x, y, f(x, y)]
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

#[test]
fn smooth_field_on_scatter() {
    let cloud = scatter(100, 0.1, 3, |x, y| x.sin() * y.cos());
    let grid = GridSpec::new([0.05, 0.05], [0.1, 0.1], [99, 99]).unwrap();
    let g = regrid(&cloud, &grid).unwrap();
    let mut worst = 0.0f64;
    for j in 0..99 {
        for i in 0..99 {
            if let Some(z) = g.get(j, i) {
                worst = worst.max((z - grid.x(i).sin() * grid.y(j).cos()).abs());
            }
        }
    }
    assert!(worst < 1e-3, "{worst}");
    assert!(g.valid_count() > 90 * 90);
}

#[test]
fn plane_on_scatter_is_exact() {
    let cloud = scatter(30, 0.2, 9, |x, y| 2.0 * x + 3.0 * y + 1.0);
    let grid = GridSpec::new([-1.0, -1.0], [0.13, 0.13], [60, 60]).unwrap();
    let g = regrid_with(
        &cloud,
        &grid,
        &RegridOptions {
            detect_lattice: false,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(g.get(0, 0).is_none());
    for ((j, i), &ok) in g.valid.indexed_iter() {
        if ok {
            assert!((g.values[(j, i)] - (2.0 * grid.x(i) + 3.0 * grid.y(j) + 1.0)).abs() < 1e-9);
        }
    }
}

#[test]
fn constant_lift_gives_constant_field() {
    let before = scatter(40, 0.1, 1, |x, y| (x * 3.0).cos() * y);
    let after = PointCloud::new(
        before
            .points
            .iter()
            .map(|p| [p[0], p[1], p[2] + 0.1])
            .collect(),
    )
    .unwrap();
    let grid = GridSpec::new([0.0, 0.0], [0.1, 0.1], [40, 40]).unwrap();
    let d = displacement_extract(&before, &after, &grid).unwrap();
    assert!(d
        .field
        .values
        .iter()
        .filter(|v| v.is_finite())
        .all(|v| (v - 0.1).abs() < 1e-12));
    assert!(!d.drift_warning);
}

#[test]
fn shifted_scan_warns_about_drift() {
    let before = scatter(40, 0.1, 1, |_, _| 0.0);
    let after = PointCloud::new(
        before
            .points
            .iter()
            .map(|p| [p[0] + 0.05, p[1], p[2]])
            .collect(),
    )
    .unwrap();
    let grid = GridSpec::new([0.0, 0.0], [0.1, 0.1], [40, 40]).unwrap();
    let d = displacement_extract(&before, &after, &grid).unwrap();
    assert!(d.drift_warning);
    assert!((d.in_plane_drift[0] - 0.05).abs() < 1e-12);
}

#[test]
fn partial_overlap_is_masked() {
    let left = scatter(20, 0.1, 4, |_, _| 1.0);
    let right = PointCloud::new(
        left.points
            .iter()
            .map(|p| [p[0] + 1.0, p[1], p[2]])
            .collect(),
    )
    .unwrap();
    let grid = GridSpec::new([0.0, 0.0], [0.1, 0.1], [30, 20]).unwrap();
    let d = displacement_extract(&left, &right, &grid).unwrap();
    assert!(d.field.get(10, 2).is_none());
    assert!(d.field.get(10, 15).is_some());
    let far = PointCloud::new(
        left.points
            .iter()
            .map(|p| [p[0] + 50.0, p[1], p[2]])
            .collect(),
    )
    .unwrap();
    assert!(matches!(
        displacement_extract(&left, &far, &grid),
        Err(Error::NoOverlap)
    ));
}
