//! Detection-noise budget: accuracy floors from recombiner misalignment and
//! precision floors from shot noise and relative intensity noise (RIN).
//!
//! Conventions follow the difference-measurement analysis: the detected
//! intensity behind the post-selection is `I_D = gamma^2 I0`, shot noise
//! scales as `alpha sqrt(I_D)`, RIN as `beta I_D`, and the two noises are
//! added linearly in the closed-form signal-to-noise ratios.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, WvaError};

/// Difference measurement vs standard interferometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Dwm,
    Si,
}

/// Schemes compared in the alignment-accuracy table; standard weak
/// measurement (SWM) only enters through its accuracy limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignmentScheme {
    Dwm,
    Si,
    Swm,
}

impl From<Scheme> for AlignmentScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Dwm => Self::Dwm,
            Scheme::Si => Self::Si,
        }
    }
}

/// Shot-noise and RIN coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Shot-noise coefficient: contributes `alpha_sn * sqrt(I_D)`.
    pub alpha_sn: f64,
    /// RIN coefficient: contributes `beta_rin * I_D`.
    pub beta_rin: f64,
}

impl NoiseParams {
    pub fn new(alpha_sn: f64, beta_rin: f64) -> Result<Self> {
        if !(alpha_sn.is_finite() && alpha_sn >= 0.0 && beta_rin.is_finite() && beta_rin >= 0.0)
        {
            return Err(WvaError::InvalidInput(
                "noise coefficients must be finite and non-negative".into(),
            ));
        }
        Ok(Self { alpha_sn, beta_rin })
    }

    /// Detected intensity at which shot noise and RIN are equal.
    pub fn crossover_intensity(&self) -> Option<f64> {
        if self.beta_rin > 0.0 {
            Some((self.alpha_sn / self.beta_rin).powi(2))
        } else {
            None
        }
    }
}

/// Time-domain (standard weak measurement) detector figure: the product of
/// carrier frequency and pulse-timing resolution, `omega0 * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwmDetectorSpec {
    pub omega0_dt: f64,
}

/// Whether the detectors can absorb the available intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SaturationRegime {
    /// Detectors comfortably below saturation: `I0` enters as given.
    HardToSaturate,
    /// Detectors limited to `i_max` per port; the attenuated scheme can
    /// compensate by raising the input until the detector fills up.
    EasyToSaturate { i_max: f64 },
}

/// Phase-accuracy floor set by a recombiner splitting bias `epsilon`.
///
/// DWM suppresses the misalignment by the post-selection attenuation:
/// `gamma * epsilon`, against `epsilon` for SI and `omega0 dt * epsilon`
/// for time-domain SWM readout.
pub fn accuracy_limit(
    scheme: AlignmentScheme,
    epsilon: f64,
    gamma: Option<f64>,
    swm: Option<&SwmDetectorSpec>,
) -> Result<f64> {
    match scheme {
        AlignmentScheme::Dwm => {
            let g = gamma.ok_or(WvaError::MissingParameter {
                name: "gamma",
                context: "the DWM accuracy limit",
            })?;
            Ok(g * epsilon)
        }
        AlignmentScheme::Si => Ok(epsilon),
        AlignmentScheme::Swm => {
            let spec = swm.ok_or(WvaError::MissingParameter {
                name: "swm detector spec",
                context: "the SWM accuracy limit",
            })?;
            Ok(spec.omega0_dt * epsilon)
        }
    }
}

/// `(shot, rin) = (alpha sqrt(I_D), beta I_D)` for a detected intensity.
pub fn noise_terms(i_d: f64, params: &NoiseParams) -> (f64, f64) {
    (params.alpha_sn * i_d.sqrt(), params.beta_rin * i_d)
}

fn noise_denominator(scheme: Scheme, gamma: f64, i0_effective: f64, params: &NoiseParams) -> f64 {
    let rin_weight = match scheme {
        Scheme::Dwm => gamma,
        Scheme::Si => 1.0,
    };
    params.alpha_sn * i0_effective.recip().sqrt() + params.beta_rin * rin_weight
}

/// Signal-to-noise ratio of the difference signal at phase `theta`:
/// `2 theta / (alpha sqrt(1/I0) + beta gamma)` for DWM and
/// `2 theta / (alpha sqrt(1/I0) + beta)` for SI.
pub fn snr(scheme: Scheme, theta: f64, gamma: f64, i0: f64, params: &NoiseParams) -> Result<f64> {
    if !(i0 > 0.0 && i0.is_finite()) {
        return Err(WvaError::InvalidInput(format!("i0 = {i0} must be positive")));
    }
    if scheme == Scheme::Dwm && !(gamma > 0.0 && gamma < 1.0) {
        return Err(WvaError::InvalidInput(format!(
            "gamma = {gamma} outside (0, 1)"
        )));
    }
    let denom = noise_denominator(scheme, gamma, i0, params);
    if denom == 0.0 {
        return Err(WvaError::DivideByZero {
            context: "noiseless SNR denominator",
        });
    }
    Ok(2.0 * theta / denom)
}

/// Smallest phase resolvable at a given SNR threshold.
pub fn resolvable_theta(
    scheme: Scheme,
    gamma: f64,
    i0: f64,
    params: &NoiseParams,
    snr_threshold: f64,
) -> Result<f64> {
    if snr_threshold.is_nan() || snr_threshold <= 0.0 {
        return Err(WvaError::InvalidInput(format!(
            "snr threshold {snr_threshold} must be positive"
        )));
    }
    let at_unit = snr(scheme, 1.0, gamma, i0, params)?;
    Ok(snr_threshold / at_unit)
}

/// Phase-precision floor (the phase at unit SNR, halved noise form):
/// `1/2 (alpha sqrt(1/I0_eff) + beta gamma)` for DWM and the `gamma -> 1`
/// form for SI.
///
/// In the easy-to-saturate regime each detector pins at `i_max`, so the
/// effective input is `i_max / gamma^2` for DWM (the post-selection throws
/// the rest away) and `i_max` for SI; the precision ratio DWM/SI is then
/// exactly `gamma`.
pub fn precision_limit(
    scheme: Scheme,
    gamma: f64,
    i0: f64,
    params: &NoiseParams,
    regime: SaturationRegime,
) -> Result<f64> {
    if scheme == Scheme::Dwm && !(gamma > 0.0 && gamma < 1.0) {
        return Err(WvaError::InvalidInput(format!(
            "gamma = {gamma} outside (0, 1)"
        )));
    }
    let i0_effective = match regime {
        SaturationRegime::HardToSaturate => i0,
        SaturationRegime::EasyToSaturate { i_max } => match scheme {
            Scheme::Dwm => i_max / (gamma * gamma),
            Scheme::Si => i_max,
        },
    };
    if !(i0_effective > 0.0 && i0_effective.is_finite()) {
        return Err(WvaError::InvalidInput(format!(
            "effective intensity {i0_effective} must be positive"
        )));
    }
    Ok(0.5 * noise_denominator(scheme, gamma, i0_effective, params))
}

/// One noisy detector reading: Gaussian around `i_d` with the shot and RIN
/// contributions combined in quadrature. Deterministic for a fixed seed.
pub fn sample_noisy_reading(i_d: f64, params: &NoiseParams, seed: u64) -> Result<f64> {
    if !(i_d >= 0.0 && i_d.is_finite()) {
        return Err(WvaError::InvalidInput(format!(
            "detected intensity {i_d} must be non-negative"
        )));
    }
    let (shot, rin) = noise_terms(i_d, params);
    let sigma = shot.hypot(rin);
    if sigma == 0.0 {
        return Ok(i_d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(i_d, sigma)
        .map_err(|e| WvaError::InvalidInput(format!("bad noise distribution: {e}")))?;
    Ok(normal.sample(&mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64) -> NoiseParams {
        NoiseParams::new(alpha, beta).unwrap()
    }

    #[test]
    fn accuracy_table_at_reference_parameters() {
        let swm = SwmDetectorSpec { omega0_dt: 1e4 };
        for &eps in &[1e-6, 1e-4, 1e-2] {
            let dwm = accuracy_limit(AlignmentScheme::Dwm, eps, Some(1e-2), None).unwrap();
            let si = accuracy_limit(AlignmentScheme::Si, eps, None, None).unwrap();
            let swm_v = accuracy_limit(AlignmentScheme::Swm, eps, None, Some(&swm)).unwrap();
            assert_eq!(dwm, 1e-2 * eps);
            assert_eq!(si, eps);
            assert_eq!(swm_v, 1e4 * eps);
        }
    }

    #[test]
    fn accuracy_missing_parameters() {
        assert!(matches!(
            accuracy_limit(AlignmentScheme::Dwm, 1e-3, None, None),
            Err(WvaError::MissingParameter { name: "gamma", .. })
        ));
        assert!(matches!(
            accuracy_limit(AlignmentScheme::Swm, 1e-3, None, None),
            Err(WvaError::MissingParameter { .. })
        ));
    }

    #[test]
    fn noise_crossover() {
        let p = params(1.0, 1e-2);
        let (shot, rin) = noise_terms(1e4, &p);
        assert!((shot - 100.0).abs() < 1e-12);
        assert!((rin - 100.0).abs() < 1e-12);
        assert_eq!(p.crossover_intensity(), Some(1e4));
    }

    #[test]
    fn snr_reference_values() {
        let p = params(1.0, 1e-2);
        let dwm = snr(Scheme::Dwm, 1e-3, 1e-2, 1e6, &p).unwrap();
        assert!((dwm - 2e-3 / 1.1e-3).abs() < 1e-12);
        let si = snr(Scheme::Si, 1e-3, 1e-2, 1e6, &p).unwrap();
        assert!((si - 2e-3 / 1.1e-2).abs() < 1e-12);
        // Identical input intensity: the attenuated scheme wins by ~1/gamma
        // once RIN dominates.
        assert!((dwm / si - 10.0).abs() < 1e-9);
    }

    #[test]
    fn snr_scales_linearly_in_theta() {
        let p = params(1.0, 1e-2);
        let one = snr(Scheme::Dwm, 1e-4, 1e-2, 1e6, &p).unwrap();
        let five = snr(Scheme::Dwm, 5e-4, 1e-2, 1e6, &p).unwrap();
        assert!((five / one - 5.0).abs() < 1e-12);
    }

    #[test]
    fn resolvable_theta_inverts_snr() {
        let p = params(1.0, 1e-2);
        let theta = resolvable_theta(Scheme::Si, 1e-2, 1e6, &p, 5.0).unwrap();
        let back = snr(Scheme::Si, theta, 1e-2, 1e6, &p).unwrap();
        assert!((back - 5.0).abs() < 1e-12);
    }

    #[test]
    fn saturation_regime_ratio_is_exactly_gamma() {
        let p = params(1.0, 1e-2);
        for &gamma in &[1e-1, 1e-2, 1e-3] {
            let regime = SaturationRegime::EasyToSaturate { i_max: 1e4 };
            let dwm = precision_limit(Scheme::Dwm, gamma, 1e6, &p, regime).unwrap();
            let si = precision_limit(Scheme::Si, gamma, 1e6, &p, regime).unwrap();
            assert!(
                (dwm / si - gamma).abs() < 1e-14 * gamma,
                "gamma {gamma}: ratio {}",
                dwm / si
            );
        }
    }

    #[test]
    fn rin_dominated_ratio_approaches_gamma() {
        let p = params(1.0, 1e-2);
        for &gamma in &[1e-1, 1e-2, 1e-3] {
            // Deep in the RIN-dominated regime for both schemes.
            let i0 = 1e6 * (p.alpha_sn / p.beta_rin).powi(2) / (gamma * gamma);
            let dwm =
                precision_limit(Scheme::Dwm, gamma, i0, &p, SaturationRegime::HardToSaturate)
                    .unwrap();
            let si =
                precision_limit(Scheme::Si, gamma, i0, &p, SaturationRegime::HardToSaturate)
                    .unwrap();
            assert!(
                (dwm / si / gamma - 1.0).abs() <= 1e-2,
                "gamma {gamma}: ratio {}",
                dwm / si
            );
        }
    }

    #[test]
    fn dwm_never_loses_at_equal_intensity() {
        let p = params(0.7, 3e-3);
        for &gamma in &[0.9, 0.5, 1e-2, 1e-4] {
            for &i0 in &[1.0, 1e4, 1e12] {
                let dwm =
                    precision_limit(Scheme::Dwm, gamma, i0, &p, SaturationRegime::HardToSaturate)
                        .unwrap();
                let si =
                    precision_limit(Scheme::Si, gamma, i0, &p, SaturationRegime::HardToSaturate)
                        .unwrap();
                assert!(dwm <= si + 1e-18);
            }
        }
    }

    #[test]
    fn sampler_is_deterministic_and_unbiased_at_zero_sigma() {
        let p = params(1.0, 1e-2);
        let a = sample_noisy_reading(1e4, &p, 42).unwrap();
        let b = sample_noisy_reading(1e4, &p, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_noisy_reading(1e4, &p, 43).unwrap();
        assert_ne!(a, c);
        let silent = params(0.0, 0.0);
        assert_eq!(sample_noisy_reading(1e4, &silent, 7).unwrap(), 1e4);
        assert!(sample_noisy_reading(-1.0, &p, 0).is_err());
    }
}
