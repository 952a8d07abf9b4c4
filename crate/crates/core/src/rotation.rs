//! Voigt transformation matrices and the two-stage ply stiffness rotation.
//!
//! Both matrices transform Voigt stress from the reference frame into a
//! rotated frame, `σ' = T σ`:
//!
//! * `T_θ` rotates about `z`, the new `x'` axis is `(cos θ, sin θ, 0)`;
//! * `T_φ` rotates in the `x–z` plane, the new `x'` axis is
//!   `(cos φ, 0, sin φ)`, so a positive `φ` tilts the fiber towards `+z`.
//!
//! Because strains are engineering strains, the stiffness transforms as
//! `C = T⁻¹ C̄ T⁻ᵀ`. The often-quoted form with `Tᵀ` in place of `T⁻ᵀ` does not
//! preserve symmetry for these stress matrices; see the rotation chapter of
//! the guide for the derivation.

use nalgebra::Matrix6;

use crate::material::StiffnessMatrix;

/// 6×6 Voigt stress transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformMatrix(Matrix6<f64>);

impl TransformMatrix {
    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Matrix6<f64> {
        self.0
    }
}

/// In-plane rotation by `theta` (radians) about `z`.
#[rustfmt::skip]
pub fn t_theta(theta: f64) -> TransformMatrix {
    let (s, c) = theta.sin_cos();
    TransformMatrix(Matrix6::new(
        c * c,      s * s,     0.0, 0.0, 0.0, 2.0 * s * c,
        s * s,      c * c,     0.0, 0.0, 0.0, -2.0 * s * c,
        0.0,        0.0,       1.0, 0.0, 0.0, 0.0,
        0.0,        0.0,       0.0, c,   -s,  0.0,
        0.0,        0.0,       0.0, s,   c,   0.0,
        -s * c,     s * c,     0.0, 0.0, 0.0, c * c - s * s,
    ))
}

/// Out-of-plane rotation by `phi` (radians) in the `x–z` plane.
#[rustfmt::skip]
pub fn t_phi(phi: f64) -> TransformMatrix {
    let (s, c) = phi.sin_cos();
    TransformMatrix(Matrix6::new(
        c * c,   0.0, s * s,  0.0, 2.0 * s * c,  0.0,
        0.0,     1.0, 0.0,    0.0, 0.0,          0.0,
        s * s,   0.0, c * c,  0.0, -2.0 * s * c, 0.0,
        0.0,     0.0, 0.0,    c,   0.0,          -s,
        -s * c,  0.0, s * c,  0.0, c * c - s * s, 0.0,
        0.0,     0.0, 0.0,    s,   0.0,          c,
    ))
}

/// `T⁻¹ C T⁻ᵀ`, with `T⁻¹` supplied by the caller.
fn transform(c: &Matrix6<f64>, t_inv: &Matrix6<f64>) -> Matrix6<f64> {
    t_inv * c * t_inv.transpose()
}

/// Raw rotation used by the homogenization inner loop; `T(α)⁻¹ = T(−α)`.
pub(crate) fn rotate_raw(cbar: &Matrix6<f64>, theta: f64, phi: f64) -> Matrix6<f64> {
    let mut c = *cbar;
    if theta != 0.0 {
        c = transform(&c, &t_theta(-theta).0);
    }
    if phi != 0.0 {
        c = transform(&c, &t_phi(-phi).0);
    }
    (c + c.transpose()) * 0.5
}

/// Stiffness of a ply with principal stiffness `cbar`, in-plane angle `theta`
/// and out-of-plane misalignment `phi`, expressed in laminate axes.
///
/// `theta = phi = 0` returns `cbar` unchanged.
pub fn rotate_stiffness(cbar: &StiffnessMatrix, theta: f64, phi: f64) -> StiffnessMatrix {
    if theta == 0.0 && phi == 0.0 {
        return *cbar;
    }
    // Congruence with an invertible matrix keeps symmetry and definiteness.
    StiffnessMatrix::new(rotate_raw(cbar.matrix(), theta, phi))
        .expect("congruence transform preserves positive definiteness")
}
