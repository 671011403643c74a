//! Quantum Fisher information for phase estimation through decohering
//! channels, in the Bloch-vector picture.
//!
//! Sign convention, fixed once for the whole crate: a state `a0|0> + a1|1>`
//! maps to `n = (2 Re(a0 conj a1), 2 Im(a0 conj a1), |a0|^2 - |a1|^2)`, so
//! the encoding `exp(i theta Z)` rotates the Bloch vector by `+2 theta`
//! about `z`. Fisher information is invariant under this choice.

use num_complex::Complex64;

use crate::error::{Result, WvaError};
use crate::qubit::{weak_approx_pointer, TwoLevelState};

/// States with `|n| >= 1 - TOL_PURE` take the pure-state QFI branch.
pub const TOL_PURE: f64 = 1e-9;
/// Mixed-branch evaluations with `|n|` above this are flagged as nearly
/// singular: the `1/(1 - |n|^2)` term is still computed but ill-conditioned.
pub const NEAR_SINGULAR: f64 = 1.0 - 1e-6;
/// Central-difference step for derivative-free paths.
pub const DEFAULT_FD_STEP: f64 = 1e-6;
/// Validity bound for the linear-phase pointer model in `qfi_dwm`.
pub const POINTER_MODEL_LIMIT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_state(state: &TwoLevelState) -> Self {
        let n = state.norm_sqr();
        let t = state.a0 * state.a1.conj();
        Self::new(
            2.0 * t.re / n,
            2.0 * t.im / n,
            (state.a0.norm_sqr() - state.a1.norm_sqr()) / n,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Density matrix `(I + n . sigma)/2` in this crate's sign convention.
    pub fn to_density(&self) -> DensityMatrix {
        let half = 0.5;
        DensityMatrix([
            [
                Complex64::new(half * (1.0 + self.z), 0.0),
                Complex64::new(half * self.x, half * self.y),
            ],
            [
                Complex64::new(half * self.x, -half * self.y),
                Complex64::new(half * (1.0 - self.z), 0.0),
            ],
        ])
    }
}

/// 2x2 density matrix; mostly a readout of [`BlochVector::to_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 2]; 2]);

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// `tr(rho^2) = (1 + |n|^2)/2`.
    pub fn purity(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[0][0] + m[0][1] * m[1][0] + m[1][0] * m[0][1] + m[1][1] * m[1][1]).re
    }
}

/// Affine qubit channel acting on Bloch vectors: `n -> E n + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    pub e: [[f64; 3]; 3],
    pub c: [f64; 3],
}

impl AffineChannel {
    /// Validates that the map keeps a deterministic sample of the unit
    /// sphere inside the (slightly padded) unit ball.
    pub fn new(e: [[f64; 3]; 3], c: [f64; 3]) -> Result<Self> {
        let ch = Self { e, c };
        for p in fibonacci_sphere(128) {
            let out = ch.apply_unchecked(&p);
            if out.norm() > 1.0 + 1e-9 {
                return Err(WvaError::UnphysicalOutput { norm: out.norm() });
            }
        }
        Ok(ch)
    }

    /// Phase flip with error probability `eta` in `[0, 1/2]`: shrinks the
    /// transverse components by `1 - 2 eta` and leaves `z` alone.
    pub fn phase_flip(eta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eta) {
            return Err(WvaError::InvalidInput(format!(
                "phase-flip probability {eta} outside [0, 0.5]"
            )));
        }
        let k = 1.0 - 2.0 * eta;
        Ok(Self {
            e: [[k, 0.0, 0.0], [0.0, k, 0.0], [0.0, 0.0, 1.0]],
            c: [0.0; 3],
        })
    }

    fn apply_unchecked(&self, n: &BlochVector) -> BlochVector {
        let v = [n.x, n.y, n.z];
        let mut out = [0.0; 3];
        for (i, row) in self.e.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + self.c[i];
        }
        BlochVector::new(out[0], out[1], out[2])
    }

    pub fn apply(&self, n: &BlochVector) -> Result<BlochVector> {
        let out = self.apply_unchecked(n);
        if out.norm() > 1.0 + 1e-9 {
            return Err(WvaError::UnphysicalOutput { norm: out.norm() });
        }
        Ok(out)
    }
}

fn fibonacci_sphere(count: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            BlochVector::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Result of one QFI evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiEvaluation {
    pub value: f64,
    /// Whether the pure-state branch `|d n|^2` was taken.
    pub pure_branch: bool,
    /// Mixed branch with `|n|` within 1e-6 of the sphere: the curvature
    /// term is computed but numerically delicate.
    pub near_singular: bool,
}

/// Bloch-picture QFI from the vector and its parameter derivative:
/// `F = |dn|^2 + (n . dn)^2 / (1 - |n|^2)`, falling back to `|dn|^2` on
/// the pure shell.
pub fn qfi_from_derivative(n: &BlochVector, dn: &BlochVector) -> Result<QfiEvaluation> {
    let norm = n.norm();
    if norm > 1.0 + 1e-9 {
        return Err(WvaError::UnphysicalOutput { norm });
    }
    let grad = dn.dot(dn);
    if norm >= 1.0 - TOL_PURE {
        return Ok(QfiEvaluation {
            value: grad,
            pure_branch: true,
            near_singular: false,
        });
    }
    let radial = n.dot(dn);
    let value = grad + radial * radial / (1.0 - norm * norm);
    Ok(QfiEvaluation {
        value,
        pure_branch: false,
        near_singular: norm > NEAR_SINGULAR,
    })
}

/// QFI for a Bloch path given only pointwise evaluations, using a central
/// finite difference of step `h` (default [`DEFAULT_FD_STEP`]).
pub fn qfi_finite_difference(
    path: &dyn Fn(f64) -> Result<BlochVector>,
    theta: f64,
    h: f64,
) -> Result<QfiEvaluation> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WvaError::InvalidInput(format!("step h = {h} must be positive")));
    }
    let n = path(theta)?;
    let fwd = path(theta + h)?;
    let bwd = path(theta - h)?;
    let dn = BlochVector::new(
        (fwd.x - bwd.x) / (2.0 * h),
        (fwd.y - bwd.y) / (2.0 * h),
        (fwd.z - bwd.z) / (2.0 * h),
    );
    qfi_from_derivative(&n, &dn)
}

/// Bloch vector of the weak-approximation pointer
/// `exp(i A_w theta)|0> + exp(-i A_w theta)|1>` (normalized).
///
/// With `a = Re A_w` and `b = Im A_w` this is
/// `(cos(2 a theta) sech(2 b theta), sin(2 a theta) sech(2 b theta),
/// -tanh(2 b theta))`. `a_w = 1` reproduces the plain interferometer state.
pub fn pointer_bloch(theta: f64, a_w: Complex64) -> Result<BlochVector> {
    let state = weak_approx_pointer(theta, a_w, &TwoLevelState::symmetric())?;
    Ok(BlochVector::from_state(&state))
}

/// QFI of the standard-interferometry probe under phase flip:
/// analytically `4 (1 - 2 eta)^2`, independent of `theta`.
pub fn qfi_si(theta: f64, eta: f64) -> Result<QfiEvaluation> {
    AffineChannel::phase_flip(eta)?;
    let k = 1.0 - 2.0 * eta;
    let (s, c) = (2.0 * theta).sin_cos();
    let n = BlochVector::new(k * c, k * s, 0.0);
    let dn = BlochVector::new(-2.0 * k * s, 2.0 * k * c, 0.0);
    qfi_from_derivative(&n, &dn)
}

/// QFI of the weak-value pointer under phase flip, referred back to the
/// bare phase: the pointer carries `theta' ~ A_w theta`, so the raw Fisher
/// information is multiplied by the attenuation `1/|A_w|^2`.
///
/// Valid only while the pointer model holds; enforced as
/// `|A_w| |theta| <=` [`POINTER_MODEL_LIMIT`].
pub fn qfi_dwm(theta: f64, a_w: Complex64, eta: f64) -> Result<QfiEvaluation> {
    let scale = a_w.norm() * theta.abs();
    if scale > POINTER_MODEL_LIMIT {
        return Err(WvaError::ApproximationDomain {
            quantity: "A_w * theta",
            value: scale,
            limit: POINTER_MODEL_LIMIT,
        });
    }
    if a_w.norm() == 0.0 {
        return Err(WvaError::InvalidInput("weak value must be nonzero".into()));
    }
    AffineChannel::phase_flip(eta)?;
    let k = 1.0 - 2.0 * eta;
    let a = a_w.re;
    let b = a_w.im;
    let (s2, c2) = (2.0 * a * theta).sin_cos();
    let sech = 1.0 / (2.0 * b * theta).cosh();
    let tanh = (2.0 * b * theta).tanh();
    let n = BlochVector::new(k * c2 * sech, k * s2 * sech, -tanh);
    let dn = BlochVector::new(
        k * (-2.0 * a * s2 * sech - 2.0 * b * c2 * sech * tanh),
        k * (2.0 * a * c2 * sech - 2.0 * b * s2 * sech * tanh),
        -2.0 * b * sech * sech,
    );
    let raw = qfi_from_derivative(&n, &dn)?;
    Ok(QfiEvaluation {
        value: raw.value / a_w.norm_sqr(),
        ..raw
    })
}

/// Single-shot bound in the form `1 / (sqrt(N) F)`.
pub fn cramer_rao(fisher: f64, n_repeats: u64) -> Result<f64> {
    if n_repeats == 0 {
        return Err(WvaError::InvalidInput("repeat count must be >= 1".into()));
    }
    if fisher.is_nan() || fisher <= 0.0 {
        return Err(WvaError::ZeroInformation { fisher });
    }
    Ok(1.0 / ((n_repeats as f64).sqrt() * fisher))
}

/// Conventional Cramer-Rao form `1 / sqrt(N F)`.
pub fn cramer_rao_conventional(fisher: f64, n_repeats: u64) -> Result<f64> {
    if n_repeats == 0 {
        return Err(WvaError::InvalidInput("repeat count must be >= 1".into()));
    }
    if fisher.is_nan() || fisher <= 0.0 {
        return Err(WvaError::ZeroInformation { fisher });
    }
    Ok(1.0 / ((n_repeats as f64) * fisher).sqrt())
}
