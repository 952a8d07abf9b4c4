//! Reference implementations written without the library's linear algebra.
#![allow(dead_code)]

pub type M6 = [[f64; 6]; 6];

/// Voigt index of the symmetric pair `(i, j)`: xx, yy, zz, yz, zx, xy.
pub fn voigt(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        (0, 1) => 5,
        _ => unreachable!(),
    }
}

/// Rows are the material axes written in laminate coordinates: a ply at
/// in-plane angle `theta` whose fibers are then tilted by `phi` in x–z.
pub fn material_axes(theta: f64, phi: f64) -> [[f64; 3]; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let a_theta = [[ct, st, 0.0], [-st, ct, 0.0], [0.0, 0.0, 1.0]];
    let a_phi = [[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]];
    let mut a = [[0.0; 3]; 3];
    for p in 0..3 {
        for i in 0..3 {
            a[p][i] = (0..3).map(|k| a_theta[p][k] * a_phi[k][i]).sum();
        }
    }
    a
}

/// Rotates a Voigt stiffness (engineering shear strains) as a fourth-order
/// tensor: `C'_ijkl = a_pi a_qj a_rk a_sl C_pqrs`.
pub fn tensor_rotate(c: &M6, theta: f64, phi: f64) -> M6 {
    let a = material_axes(theta, phi);
    let t = |p: usize, q: usize, r: usize, s: usize| c[voigt(p, q)][voigt(r, s)];
    let pairs = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
    let mut out = [[0.0; 6]; 6];
    for (m, &(i, j)) in pairs.iter().enumerate() {
        for (n, &(k, l)) in pairs.iter().enumerate() {
            let mut acc = 0.0;
            for p in 0..3 {
                for q in 0..3 {
                    for r in 0..3 {
                        for s in 0..3 {
                            acc += a[p][i] * a[q][j] * a[r][k] * a[s][l] * t(p, q, r, s);
                        }
                    }
                }
            }
            out[m][n] = acc;
        }
    }
    out
}

/// Gauss–Jordan exchange of the variables in `idx`: for `y = M x`, the
/// result maps `(y_idx, x_rest)` to `(x_idx, y_rest)`. Applying it twice
/// returns `M`.
pub fn exchange(m: &M6, idx: &[usize]) -> M6 {
    let mut m = *m;
    for &k in idx {
        let p = m[k][k];
        assert!(p.abs() > 1e-300, "zero pivot");
        let mut n = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                n[i][j] = match (i == k, j == k) {
                    (true, true) => 1.0 / p,
                    (true, false) => -m[k][j] / p,
                    (false, true) => m[i][k] / p,
                    (false, false) => m[i][j] - m[i][k] * m[k][j] / p,
                };
            }
        }
        m = n;
    }
    m
}

/// Mixed average of layers `(weight, stiffness)` that share the strains
/// outside `stress_idx` and the stresses in `stress_idx`.
pub fn mixed_average(layers: &[(f64, M6)], stress_idx: &[usize]) -> M6 {
    let total: f64 = layers.iter().map(|l| l.0).sum();
    let mut acc = [[0.0; 6]; 6];
    for (w, c) in layers {
        let e = exchange(c, stress_idx);
        for i in 0..6 {
            for j in 0..6 {
                acc[i][j] += w / total * e[i][j];
            }
        }
    }
    exchange(&acc, stress_idx)
}

pub fn invert(m: &M6) -> M6 {
    exchange(m, &[0, 1, 2, 3, 4, 5])
}

/// Ply stiffness assembled directly from the published constants.
pub fn reference_ply_stiffness() -> M6 {
    let (e1, e2, e3) = (133.3, 9.09, 9.09);
    let (g23, g31, g12) = (3.16, 7.24, 7.23);
    let (nu21, nu32, nu31) = (0.261, 0.436, 0.261);
    let mut s = [[0.0; 6]; 6];
    s[0][0] = 1.0 / e1;
    s[1][1] = 1.0 / e2;
    s[2][2] = 1.0 / e3;
    s[3][3] = 1.0 / g23;
    s[4][4] = 1.0 / g31;
    s[5][5] = 1.0 / g12;
    s[0][1] = -nu21 / e1;
    s[1][0] = s[0][1];
    s[0][2] = -nu31 / e1;
    s[2][0] = s[0][2];
    s[1][2] = -nu32 / e2;
    s[2][1] = s[1][2];
    invert(&s)
}

/// Relabels x ↔ y: the stiffness of a 90° ply without trigonometry.
pub fn swap_xy(c: &M6) -> M6 {
    let perm = [1, 0, 2, 4, 3, 5];
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = c[perm[i]][perm[j]];
        }
    }
    out
}

pub fn frobenius_rel(a: &M6, b: &M6) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..6 {
        for j in 0..6 {
            num += (a[i][j] - b[i][j]).powi(2);
            den += b[i][j].powi(2);
        }
    }
    (num / den).sqrt()
}

pub fn to_rows(m: &nalgebra::Matrix6<f64>) -> M6 {
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

pub fn from_rows(m: &M6) -> nalgebra::Matrix6<f64> {
    nalgebra::Matrix6::from_fn(|i, j| m[i][j])
}

/// Frozen outputs of `oracle_fine_average` (4096 strips, 16 midpoint
/// z-samples per ply), upper triangle in row order, zeros omitted.
pub struct Fixture {
    pub notation: &'static str,
    pub wavelength: f64,
    pub amplitude: f64,
    pub entries: &'static [((usize, usize), f64)],
    pub e_x: f64,
}

pub const PLY_THICKNESS: f64 = 0.25;

pub const SPECIMEN_II: Fixture = Fixture {
    notation: "[0]_30",
    wavelength: 8.3,
    amplitude: 1.0,
    entries: &[
        ((0, 0), 7.949882528084e1),
        ((0, 1), 4.617614804221e0),
        ((0, 2), 4.024307647632e0),
        ((1, 1), 1.135647440653e1),
        ((1, 2), 5.026083524431e0),
        ((2, 2), 1.200025765331e1),
        ((3, 3), 3.335946854032e0),
        ((4, 4), 8.520332666073e0),
        ((5, 5), 6.848670257557e0),
    ],
    e_x: 7.721997283509e1,
};

pub const ROW1_LOW: Fixture = Fixture {
    notation: "[0/90]_2s",
    wavelength: 5.0,
    amplitude: 0.5,
    entries: &[
        ((0, 0), 5.569965254196e1),
        ((0, 1), 4.399649543397e0),
        ((0, 2), 4.579187116004e0),
        ((1, 1), 7.343265672153e1),
        ((1, 2), 4.647667083685e0),
        ((2, 2), 1.149856622846e1),
        ((3, 3), 4.511104756357e0),
        ((4, 4), 4.558619100392e0),
        ((5, 5), 7.112887787987e0),
    ],
    e_x: 5.378525063323e1,
};

pub const ROW3_SEVERE: Fixture = Fixture {
    notation: "[0/90/±45/0]_3s",
    wavelength: 5.0,
    amplitude: 2.5,
    entries: &[
        ((0, 0), 2.589623086739e1),
        ((0, 1), 6.791930657465e0),
        ((0, 2), 4.516311052356e0),
        ((0, 5), 3.565874247572e-1),
        ((1, 1), 4.195750807430e1),
        ((1, 2), 4.509092389947e0),
        ((1, 5), 3.167722989908e-1),
        ((2, 2), 1.423802589968e1),
        ((2, 5), -1.587009503904e-2),
        ((3, 3), 5.548031885353e0),
        ((3, 4), 1.503973628437e-2),
        ((4, 4), 5.444844071569e0),
        ((5, 5), 8.301532318433e0),
    ],
    e_x: 2.374209707883e1,
};

/// `E_x` of `[0]_30` at `λ = 5 mm` for `A/λ = 0.10, 0.15, …, 0.50`.
pub const E_X_SWEEP: [(f64, f64); 9] = [
    (0.10, 8.493796827797e1),
    (0.15, 6.834529746980e1),
    (0.20, 5.751858524647e1),
    (0.25, 5.002520259920e1),
    (0.30, 4.456509221507e1),
    (0.35, 4.042050556182e1),
    (0.40, 3.717095528941e1),
    (0.45, 3.455606011138e1),
    (0.50, 3.240675313003e1),
];

/// Every wrinkled configuration of the structural-parameter table:
/// `(notation, λ, A)`.
pub const WRINKLED_LAMINATES: [(&str, f64, f64); 7] = [
    ("[0/90]_2s", 5.0, 0.5),
    ("[0/90]_2s", 5.0, 0.75),
    ("[0/90]_4s", 5.0, 0.5),
    ("[0/90]_4s", 5.0, 1.0),
    ("[0/90/±45/0]_3s", 5.0, 1.0),
    ("[0/90/±45/0]_3s", 5.0, 1.75),
    ("[0/90/±45/0]_3s", 5.0, 2.5),
];
