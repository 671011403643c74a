//! Exact two-level (qubit) algebra for weak-value experiments.
//!
//! States are raw complex amplitude pairs; nothing here ever linearizes in
//! the coupling strength, so this module doubles as the exact oracle that
//! the weak-approximation pointer model is tested against.

use num_complex::Complex64;

use crate::error::{Result, WvaError};

/// Overlaps below this are treated as orthogonal selections.
pub const ORTHOGONAL_OVERLAP_LIMIT: f64 = 1e-15;

/// Pure state of a two-level system, `a0|0> + a1|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl TwoLevelState {
    pub fn new(a0: Complex64, a1: Complex64) -> Self {
        Self { a0, a1 }
    }

    /// `(|0> + |1>)/sqrt(2)`, the canonical pre-selection.
    pub fn symmetric() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(r, r)
    }

    /// Real state at polar angle `alpha`: `cos(alpha)|0> + sin(alpha)|1>`.
    pub fn at_angle(alpha: f64) -> Self {
        Self::new(
            Complex64::new(alpha.cos(), 0.0),
            Complex64::new(alpha.sin(), 0.0),
        )
    }

    pub fn basis0() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn basis1() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    /// Returns the normalized state, or an error for a (near-)zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !n.is_finite() || n < 1e-300 {
            return Err(WvaError::DegenerateOutput { norm: n.sqrt() });
        }
        let s = n.sqrt();
        Ok(Self::new(self.a0 / s, self.a1 / s))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.a0 * c, self.a1 * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.a0 + other.a0, self.a1 + other.a1)
    }

    /// Population difference `|a0|^2 - |a1|^2` of the normalized state.
    pub fn population_z(&self) -> f64 {
        let n = self.norm_sqr();
        (self.a0.norm_sqr() - self.a1.norm_sqr()) / n
    }
}

/// Squared overlap `|<a|b>|^2` between the normalized versions of two states.
pub fn fidelity(a: &TwoLevelState, b: &TwoLevelState) -> f64 {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    a.inner(b).norm_sqr() / (na * nb)
}

/// Hermitian 2x2 observable squaring to the identity (eigenvalues +-1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliObservable {
    m: [[Complex64; 2]; 2],
}

impl PauliObservable {
    const TOL: f64 = 1e-12;

    /// Validates hermiticity and the involution property `M^2 = I`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        if (m[0][0] - m[0][0].conj()).norm() > Self::TOL
            || (m[1][1] - m[1][1].conj()).norm() > Self::TOL
            || (m[0][1] - m[1][0].conj()).norm() > Self::TOL
        {
            return Err(WvaError::InvalidInput(
                "observable is not Hermitian within 1e-12".into(),
            ));
        }
        let sq = [
            [
                m[0][0] * m[0][0] + m[0][1] * m[1][0],
                m[0][0] * m[0][1] + m[0][1] * m[1][1],
            ],
            [
                m[1][0] * m[0][0] + m[1][1] * m[1][0],
                m[1][0] * m[0][1] + m[1][1] * m[1][1],
            ],
        ];
        let id = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                if (sq[i][j] - id[i][j]).norm() > Self::TOL {
                    return Err(WvaError::InvalidInput(
                        "observable does not square to the identity within 1e-12".into(),
                    ));
                }
            }
        }
        Ok(Self { m })
    }

    pub fn x() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        Self { m: [[o, l], [l, o]] }
    }

    pub fn y() -> Self {
        let o = Complex64::new(0.0, 0.0);
        Self {
            m: [[o, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), o]],
        }
    }

    /// `|0><0| - |1><1|`, the path/polarization difference observable.
    pub fn z() -> Self {
        let o = Complex64::new(0.0, 0.0);
        Self {
            m: [[Complex64::new(1.0, 0.0), o], [o, Complex64::new(-1.0, 0.0)]],
        }
    }

    pub fn apply(&self, s: &TwoLevelState) -> TwoLevelState {
        TwoLevelState::new(
            self.m[0][0] * s.a0 + self.m[0][1] * s.a1,
            self.m[1][0] * s.a0 + self.m[1][1] * s.a1,
        )
    }

    /// Matrix element `<bra|M|ket>`.
    pub fn matrix_element(&self, bra: &TwoLevelState, ket: &TwoLevelState) -> Complex64 {
        bra.inner(&self.apply(ket))
    }
}

/// Weak value `<post|obs|pre> / <post|pre>`.
///
/// The result may lie far outside the observable's eigenvalue range and may
/// be complex; that anomaly is the amplification resource.
pub fn weak_value(
    pre: &TwoLevelState,
    post: &TwoLevelState,
    obs: &PauliObservable,
) -> Result<Complex64> {
    let overlap = post.inner(pre);
    let scale = (pre.norm_sqr() * post.norm_sqr()).sqrt();
    if overlap.norm() <= ORTHOGONAL_OVERLAP_LIMIT * scale.max(1.0) {
        return Err(WvaError::OrthogonalSelection {
            overlap: overlap.norm(),
            limit: ORTHOGONAL_OVERLAP_LIMIT,
        });
    }
    Ok(obs.matrix_element(post, pre) / overlap)
}

/// Inverts the weak-value map: finds a normalized post-selection whose weak
/// value with `pre` and `obs` equals `target`.
///
/// The condition `<s|(obs - target)|pre> = 0` fixes `s` as the orthogonal
/// complement of `v = (obs - target)|pre>`. The inversion fails when `v`
/// vanishes (`pre` is an eigenstate and `target` its eigenvalue) or when the
/// complement is orthogonal to `pre`, where the weak value diverges instead.
pub fn post_selection_for_weak_value(
    target: Complex64,
    pre: &TwoLevelState,
    obs: &PauliObservable,
) -> Result<TwoLevelState> {
    let v = obs.apply(pre).add(&pre.scale(-target));
    let vn = v.norm_sqr().sqrt();
    if vn <= 1e-14 * (1.0 + target.norm()) {
        return Err(WvaError::UnreachableWeakValue {
            target: format!("{target}"),
        });
    }
    let s = TwoLevelState::new(v.a1.conj(), -v.a0.conj()).normalized()?;
    if s.inner(pre).norm() <= ORTHOGONAL_OVERLAP_LIMIT {
        return Err(WvaError::UnreachableWeakValue {
            target: format!("{target}"),
        });
    }
    Ok(s)
}

/// A pre/post-selection pair together with its weak value.
#[derive(Debug, Clone, Copy)]
pub struct WeakValueSetting {
    pub pre: TwoLevelState,
    pub post: TwoLevelState,
    pub observable: PauliObservable,
    pub weak_value: Complex64,
}

impl WeakValueSetting {
    pub fn new(
        pre: TwoLevelState,
        post: TwoLevelState,
        observable: PauliObservable,
    ) -> Result<Self> {
        let weak_value = weak_value(&pre, &post, &observable)?;
        Ok(Self { pre, post, observable, weak_value })
    }

    /// Canonical configuration: symmetric pre-selection, post-selection at
    /// angle `-pi/4 + delta`, observable `Z`. Its weak value is exactly
    /// `cot(delta)`.
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= std::f64::consts::FRAC_PI_4) {
            return Err(WvaError::InvalidInput(format!(
                "delta = {delta} outside (0, pi/4]"
            )));
        }
        Self::new(
            TwoLevelState::symmetric(),
            TwoLevelState::at_angle(-std::f64::consts::FRAC_PI_4 + delta),
            PauliObservable::z(),
        )
    }

    /// Canonical configuration realizing an arbitrary (possibly complex)
    /// weak value on the symmetric pre-selection.
    pub fn from_target(target: Complex64) -> Result<Self> {
        let pre = TwoLevelState::symmetric();
        let obs = PauliObservable::z();
        let post = post_selection_for_weak_value(target, &pre, &obs)?;
        Self::new(pre, post, obs)
    }
}

/// Propagates `exp(i g A (x) B)` exactly and post-selects the system.
///
/// Because `A^2 = I`, the coupling is exactly
/// `cos(g) I(x)I + i sin(g) A(x)B`, so the unnormalized pointer after
/// post-selection is
/// `<post|pre> cos(g) |psi> + i sin(g) <post|A|pre> B|psi>`.
///
/// Returns the normalized pointer state and the post-selection probability
/// (the squared norm before normalization). All inputs must be normalized.
pub fn exact_postselected_pointer(
    g: f64,
    pre_sys: &TwoLevelState,
    post_sys: &TwoLevelState,
    pointer_in: &TwoLevelState,
    a_obs: &PauliObservable,
    b_obs: &PauliObservable,
) -> Result<(TwoLevelState, f64)> {
    let overlap = post_sys.inner(pre_sys);
    if overlap.norm() <= ORTHOGONAL_OVERLAP_LIMIT {
        return Err(WvaError::OrthogonalSelection {
            overlap: overlap.norm(),
            limit: ORTHOGONAL_OVERLAP_LIMIT,
        });
    }
    let coupling = post_sys.inner(&a_obs.apply(pre_sys));
    let direct = pointer_in.scale(overlap * g.cos());
    let kicked = b_obs
        .apply(pointer_in)
        .scale(Complex64::new(0.0, 1.0) * coupling * g.sin());
    let out = direct.add(&kicked);
    let probability = out.norm_sqr().clamp(0.0, 1.0);
    Ok((out.normalized()?, probability))
}

/// Weak-approximation pointer: applies `exp(+i A_w g)` and `exp(-i A_w g)`
/// to the two pointer amplitudes and renormalizes.
///
/// For complex `A_w` the map is non-unitary (the two phases have different
/// magnitudes), which is why renormalization is part of the contract. The
/// pointer must be expressed on the eigenbasis of the pointer observable.
pub fn weak_approx_pointer(
    g: f64,
    a_w: Complex64,
    pointer_in: &TwoLevelState,
) -> Result<TwoLevelState> {
    let i = Complex64::new(0.0, 1.0);
    let phase = i * a_w * g;
    let out = TwoLevelState::new(
        pointer_in.a0 * phase.exp(),
        pointer_in.a1 * (-phase).exp(),
    );
    out.normalized()
}
