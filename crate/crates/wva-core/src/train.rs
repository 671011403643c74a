//! Exact propagation through the difference-measurement interferometer.
//!
//! Geometry: a 50:50 splitter carrying the conventional `i` on reflection
//! feeds two paths that acquire opposite polarization phases `exp(+-i theta A)`,
//! both paths are projected onto the same post-selection, and a recombiner
//! interferes them onto two detectors. The quarter-wave offset between the
//! paths (the splitter's `i`) puts the detectors at the balanced quadrature
//! point: the normalized difference is `sin(2 theta')` with
//! `theta' = arg(cos theta + i A_w sin theta)`.

use num_complex::Complex64;

use crate::error::{Result, WvaError};
use crate::qubit::{TwoLevelState, WeakValueSetting};

/// How the post-selection is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeakValueSelection {
    /// Post-selection at angle `-pi/4 + delta`; weak value `cot(delta)`,
    /// attenuation `gamma = tan(delta)`. Requires `delta` in `(0, pi/4]`;
    /// the closed end is the unamplified (SI-equivalent) reference.
    Delta(f64),
    /// Any complex weak value, realized by inverting the weak-value map on
    /// the symmetric pre-selection.
    Target(Complex64),
}

impl WeakValueSelection {
    pub fn weak_value(&self) -> Complex64 {
        match self {
            Self::Delta(d) => Complex64::new(1.0 / d.tan(), 0.0),
            Self::Target(t) => *t,
        }
    }

    /// Attenuation `gamma = 1/A_w` (modulus for complex weak values).
    pub fn gamma(&self) -> f64 {
        match self {
            Self::Delta(d) => d.tan(),
            Self::Target(t) => t.norm().recip(),
        }
    }

    /// Equivalent post-selection offset angle `delta`.
    pub fn delta(&self) -> f64 {
        match self {
            Self::Delta(d) => *d,
            Self::Target(t) => t.norm().recip().atan(),
        }
    }

    pub fn setting(&self) -> Result<WeakValueSetting> {
        match self {
            Self::Delta(d) => WeakValueSetting::from_delta(*d),
            Self::Target(t) => WeakValueSetting::from_target(*t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Delta(d) => {
                if !(d.is_finite() && *d > 0.0 && *d <= std::f64::consts::FRAC_PI_4) {
                    return Err(WvaError::InvalidInput(format!(
                        "delta = {d} outside (0, pi/4]"
                    )));
                }
            }
            Self::Target(t) => {
                if !t.is_finite() || t.norm() == 0.0 {
                    return Err(WvaError::InvalidInput(format!(
                        "target weak value {t} must be finite and nonzero"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Full parameter set for one pass through the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Polarization phase to measure, radians.
    pub theta: f64,
    pub selection: WeakValueSelection,
    /// Recombiner splitting bias: intensity ratio `(1 + eps/2) : (1 - eps/2)`.
    pub epsilon: f64,
    /// Input intensity `I0` (photons or watts; units carried through).
    pub input_intensity: f64,
    /// Quantum efficiency of detectors D1 and D2.
    pub detector_efficiency: (f64, f64),
    /// Saturation threshold per detector, if any.
    pub i_max: Option<f64>,
}

impl TrainConfig {
    pub fn new(theta: f64, selection: WeakValueSelection) -> Result<Self> {
        let cfg = Self {
            theta,
            selection,
            epsilon: 0.0,
            input_intensity: 1.0,
            detector_efficiency: (1.0, 1.0),
            i_max: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(WvaError::InvalidInput("theta must be finite".into()));
        }
        self.selection.validate()?;
        if !(self.epsilon.is_finite() && self.epsilon.abs() < 1.0) {
            return Err(WvaError::InvalidInput(format!(
                "epsilon = {} outside (-1, 1)",
                self.epsilon
            )));
        }
        if !(self.input_intensity.is_finite() && self.input_intensity >= 0.0) {
            return Err(WvaError::InvalidInput(
                "input_intensity must be finite and non-negative".into(),
            ));
        }
        let (e1, e2) = self.detector_efficiency;
        if !((0.0..=1.0).contains(&e1) && (0.0..=1.0).contains(&e2)) {
            return Err(WvaError::InvalidInput(
                "detector efficiencies must lie in [0, 1]".into(),
            ));
        }
        if let Some(m) = self.i_max {
            if !(m.is_finite() && m > 0.0) {
                return Err(WvaError::InvalidInput("i_max must be positive".into()));
            }
        }
        Ok(())
    }

    /// Flat `key = value` rendering (one key per line, fixed order).
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("theta = {}\n", csv_float(self.theta)));
        match self.selection {
            WeakValueSelection::Delta(d) => out.push_str(&format!("delta = {}\n", csv_float(d))),
            WeakValueSelection::Target(t) => {
                out.push_str(&format!("aw_re = {}\n", csv_float(t.re)));
                out.push_str(&format!("aw_im = {}\n", csv_float(t.im)));
            }
        }
        out.push_str(&format!("epsilon = {}\n", csv_float(self.epsilon)));
        out.push_str(&format!(
            "input_intensity = {}\n",
            csv_float(self.input_intensity)
        ));
        out.push_str(&format!(
            "efficiency_d1 = {}\n",
            csv_float(self.detector_efficiency.0)
        ));
        out.push_str(&format!(
            "efficiency_d2 = {}\n",
            csv_float(self.detector_efficiency.1)
        ));
        if let Some(m) = self.i_max {
            out.push_str(&format!("i_max = {}\n", csv_float(m)));
        }
        out
    }

    /// Parses the `to_kv` format. Unknown keys are rejected.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                WvaError::InvalidInput(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| map.remove(key);
        let parse = |key: &str, v: String| {
            v.parse::<f64>()
                .map_err(|_| WvaError::InvalidInput(format!("key `{key}`: bad float `{v}`")))
        };
        let theta = parse(
            "theta",
            take("theta").ok_or(WvaError::MissingParameter {
                name: "theta",
                context: "train config",
            })?,
        )?;
        let selection = match (take("delta"), take("aw_re"), take("aw_im")) {
            (Some(d), None, None) => WeakValueSelection::Delta(parse("delta", d)?),
            (None, Some(re), im) => WeakValueSelection::Target(Complex64::new(
                parse("aw_re", re)?,
                im.map(|v| parse("aw_im", v)).transpose()?.unwrap_or(0.0),
            )),
            _ => {
                return Err(WvaError::InvalidInput(
                    "specify either `delta` or `aw_re`/`aw_im`".into(),
                ))
            }
        };
        let mut cfg = TrainConfig::new(theta, selection)?;
        if let Some(v) = take("epsilon") {
            cfg.epsilon = parse("epsilon", v)?;
        }
        if let Some(v) = take("input_intensity") {
            cfg.input_intensity = parse("input_intensity", v)?;
        }
        if let Some(v) = take("efficiency_d1") {
            cfg.detector_efficiency.0 = parse("efficiency_d1", v)?;
        }
        if let Some(v) = take("efficiency_d2") {
            cfg.detector_efficiency.1 = parse("efficiency_d2", v)?;
        }
        if let Some(v) = take("i_max") {
            cfg.i_max = Some(parse("i_max", v)?);
        }
        if let Some(key) = map.keys().next() {
            return Err(WvaError::InvalidInput(format!("unknown key `{key}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Amplified phase and its normalization factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifiedPhase {
    /// `arg(cos theta + i A_w sin theta)`.
    pub theta_prime: f64,
    /// `|cos theta + i A_w sin theta|`.
    pub n_prime: f64,
}

/// Post-selected output phase: `theta' = arg(cos theta + i A_w sin theta)`.
///
/// For real `A_w` this reduces to `atan(A_w tan theta)`: a phase measured as
/// `theta'` corresponds to a true phase `A_w` times smaller.
pub fn amplified_phase(theta: f64, a_w: Complex64) -> Result<AmplifiedPhase> {
    if !(theta.is_finite() && theta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(WvaError::InvalidInput(format!(
            "theta = {theta} outside (-pi/2, pi/2)"
        )));
    }
    let z = Complex64::new(theta.cos(), 0.0) + Complex64::new(0.0, 1.0) * a_w * theta.sin();
    Ok(AmplifiedPhase {
        theta_prime: z.arg(),
        n_prime: z.norm(),
    })
}

/// Small-signal detection probabilities
/// `P_{D1,2} = (gamma^2 / 2) (1 +- sin(2 A_w theta))` for the
/// `delta`-parameterized selection.
pub fn detection_probabilities(theta: f64, delta: f64) -> (f64, f64) {
    let gamma = delta.tan();
    let a_w = 1.0 / gamma;
    let half = 0.5 * gamma * gamma;
    let s = (2.0 * a_w * theta).sin();
    (half * (1.0 + s), half * (1.0 - s))
}

/// Detector-plane outcome of one exact propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorReadings {
    /// Fraction of the input intensity arriving at each detector.
    pub p_d1: f64,
    pub p_d2: f64,
    /// Detected intensities, `i_d = p_d * I0 * efficiency`.
    pub i_d1: f64,
    pub i_d2: f64,
    /// Whether each detected intensity exceeds the saturation threshold.
    pub saturated: (bool, bool),
    /// Intensity rejected by the post-selection (ideal-detector units).
    pub rejected_intensity: f64,
    /// Amplified phase of this configuration.
    pub theta_prime: f64,
}

impl DetectorReadings {
    /// Difference signal `i_d1 - i_d2`.
    pub fn signal(&self) -> f64 {
        self.i_d1 - self.i_d2
    }

    /// `(i_d1 - i_d2) / (i_d1 + i_d2)`; equals `sin(2 theta')` at zero bias
    /// with equal efficiencies and real weak value.
    pub fn normalized_signal(&self) -> Result<f64> {
        let sum = self.i_d1 + self.i_d2;
        if sum <= 0.0 {
            return Err(WvaError::DivideByZero {
                context: "normalized difference with zero total intensity",
            });
        }
        Ok((self.i_d1 - self.i_d2) / sum)
    }
}

/// Runs the full interferometer without any small-quantity approximation.
///
/// The two post-selected path amplitudes are interfered on a 50:50
/// recombiner; the splitting bias `eps` is applied as intensity weights
/// `(1 +- eps/2)` on the detector couplings and renormalized so the total
/// detected-plus-rejected intensity still equals `I0`. At `eps = 0` the
/// normalized difference is exactly `sin(2 theta')`; the bias adds an offset
/// of `eps/2` at `theta = 0`, which is the alignment error floor.
pub fn propagate_exact(config: &TrainConfig) -> Result<DetectorReadings> {
    config.validate()?;
    let setting = config.selection.setting()?;
    let theta = config.theta;
    let i0 = config.input_intensity;

    // Polarization phases along the two paths: exp(+-i theta A) with A = Z.
    let rot = |sign: f64| {
        let ph = Complex64::new(0.0, sign * theta).exp();
        TwoLevelState::new(setting.pre.a0 * ph, setting.pre.a1 * ph.conj())
    };
    let u_plus = rot(1.0);
    let u_minus = rot(-1.0);

    // Post-selection on both paths; track the rejected component exactly.
    let c_plus = setting.post.inner(&u_plus);
    let c_minus = setting.post.inner(&u_minus);
    let rejected_fraction =
        0.5 * ((1.0 - c_plus.norm_sqr()) + (1.0 - c_minus.norm_sqr()));

    // Path fields entering the recombiner; the `i` is BS1's reflection.
    let e_plus = Complex64::new(0.0, 1.0) * c_plus * std::f64::consts::FRAC_1_SQRT_2;
    let e_minus = c_minus * std::f64::consts::FRAC_1_SQRT_2;

    // Ideal 50:50 recombination, then biased detector couplings.
    let b1 = (e_plus - e_minus) * std::f64::consts::FRAC_1_SQRT_2;
    let b2 = (e_plus + e_minus) * std::f64::consts::FRAC_1_SQRT_2;
    let w1 = 1.0 + 0.5 * config.epsilon;
    let w2 = 1.0 - 0.5 * config.epsilon;
    let raw1 = w1 * b1.norm_sqr();
    let raw2 = w2 * b2.norm_sqr();
    let total = b1.norm_sqr() + b2.norm_sqr();
    let scale = if raw1 + raw2 > 0.0 { total / (raw1 + raw2) } else { 0.0 };

    let p_d1 = scale * raw1;
    let p_d2 = scale * raw2;
    let i_d1 = p_d1 * i0 * config.detector_efficiency.0;
    let i_d2 = p_d2 * i0 * config.detector_efficiency.1;
    let saturated = match config.i_max {
        Some(m) => (i_d1 > m, i_d2 > m),
        None => (false, false),
    };

    Ok(DetectorReadings {
        p_d1,
        p_d2,
        i_d1,
        i_d2,
        saturated,
        rejected_intensity: rejected_fraction * i0,
        theta_prime: amplified_phase(theta, setting.weak_value)?.theta_prime,
    })
}

/// Exact difference signal `i_d1 - i_d2`.
pub fn difference_signal(config: &TrainConfig) -> Result<f64> {
    Ok(propagate_exact(config)?.signal())
}

/// Small-signal closed form of the difference signal,
/// `2 gamma^2 I0 A_w theta` (real weak values).
pub fn difference_signal_estimate(config: &TrainConfig) -> f64 {
    let gamma = config.selection.gamma();
    2.0 * gamma * gamma
        * config.input_intensity
        * config.selection.weak_value().re
        * config.theta
}

/// Relative deviation of the amplified phase from its linear model:
/// `D = |1 - theta' / (A_w theta)|`, with `D(0) = 0` by continuity.
pub fn nonlinearity(theta: f64, a_w: f64) -> Result<f64> {
    if !(a_w.is_finite() && a_w != 0.0) {
        return Err(WvaError::InvalidInput(format!(
            "weak value {a_w} must be finite and nonzero"
        )));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let phase = amplified_phase(theta, Complex64::new(a_w, 0.0))?;
    Ok((1.0 - phase.theta_prime / (a_w * theta)).abs())
}

/// Largest phase whose nonlinearity stays at or below `d_threshold`,
/// located by bisection to 1e-12 rad.
///
/// At `a_w = 1` the deviation vanishes identically (`theta' = theta`), so
/// the search degenerates; the returned bound is then the large-`A_w` limit
/// `sqrt(3 d)` of the same criterion, which is the bound the amplified
/// phase itself must respect in the unamplified scheme.
pub fn max_measurable_phase(a_w: f64, d_threshold: f64) -> Result<f64> {
    if !(d_threshold > 0.0 && d_threshold < 0.1) {
        return Err(WvaError::InvalidInput(format!(
            "d_threshold = {d_threshold} outside (0, 0.1)"
        )));
    }
    if !(a_w.is_finite() && a_w >= 1.0) {
        return Err(WvaError::InvalidInput(format!(
            "weak value {a_w} must be >= 1"
        )));
    }
    if (a_w - 1.0).abs() <= 1e-9 {
        return Ok((3.0 * d_threshold).sqrt());
    }
    let hi_limit = std::f64::consts::FRAC_PI_4;
    if nonlinearity(hi_limit, a_w)? <= d_threshold {
        return Ok(hi_limit);
    }
    let mut lo = 0.0_f64;
    let mut hi = hi_limit;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if nonlinearity(mid, a_w)? <= d_threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Open-loop dynamic range `theta_max / theta_min`.
pub fn dynamic_range(theta_max: f64, theta_min: f64) -> Result<f64> {
    if theta_min == 0.0 {
        return Err(WvaError::DivideByZero {
            context: "dynamic range with zero minimum phase",
        });
    }
    Ok((theta_max / theta_min).abs())
}

/// Shortest-round-trip scientific rendering used by every CSV emitter.
pub fn csv_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:e}")
    }
}

/// Column schema for detector-reading rows.
pub fn readings_csv_header() -> &'static str {
    "theta,delta,epsilon,p_d1,p_d2,i_d1,i_d2,signal,theta_prime"
}

/// One CSV row in the [`readings_csv_header`] schema. The `signal` column
/// carries the normalized difference (the plotted ratio, `sin(2 theta')`
/// at zero bias); a dark interferometer leaves the field empty.
pub fn readings_csv_row(config: &TrainConfig, readings: &DetectorReadings) -> String {
    [
        csv_float(config.theta),
        csv_float(config.selection.delta()),
        csv_float(config.epsilon),
        csv_float(readings.p_d1),
        csv_float(readings.p_d2),
        csv_float(readings.i_d1),
        csv_float(readings.i_d2),
        readings
            .normalized_signal()
            .map(csv_float)
            .unwrap_or_default(),
        csv_float(readings.theta_prime),
    ]
    .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_cfg(theta: f64, delta: f64) -> TrainConfig {
        TrainConfig::new(theta, WeakValueSelection::Delta(delta)).unwrap()
    }

    #[test]
    fn amplified_phase_matches_arctan_form() {
        let phase = amplified_phase(1e-4, Complex64::new(100.0, 0.0)).unwrap();
        let reference = (100.0 * 1e-4_f64.tan()).atan();
        assert!((phase.theta_prime - reference).abs() < 1e-15);
        assert!((phase.theta_prime - 9.99967e-3).abs() < 5e-9);
        let z = Complex64::new(1e-4_f64.cos(), 100.0 * 1e-4_f64.sin());
        assert!((phase.n_prime - z.norm()).abs() < 1e-15);
    }

    #[test]
    fn complex_weak_value_shifts_amplified_phase() {
        let real = amplified_phase(1e-4, Complex64::new(100.0, 0.0)).unwrap();
        let complex = amplified_phase(1e-4, Complex64::new(100.0, 10.0)).unwrap();
        assert!((real.theta_prime - complex.theta_prime).abs() > 1e-6);
    }

    #[test]
    fn amplified_phase_domain() {
        assert!(amplified_phase(1.6, Complex64::new(10.0, 0.0)).is_err());
    }

    #[test]
    fn detection_probabilities_small_signal_form() {
        let delta = 0.01_f64;
        let (p1, p2) = detection_probabilities(1e-4, delta);
        let gamma2 = delta.tan().powi(2);
        assert!((p1 + p2 - gamma2).abs() < 1e-15);
        let asym = (p1 - p2) / (p1 + p2);
        let expected = (2.0 * 1e-4 / delta.tan()).sin();
        assert!((asym - expected).abs() < 1e-15);
        assert!((asym - 0.0200).abs() < 1e-4);
    }

    #[test]
    fn normalized_difference_is_sine_of_doubled_amplified_phase() {
        for &theta in &[1e-5, 1e-3, 0.05, 0.2, -0.15] {
            let cfg = delta_cfg(theta, 0.01);
            let readings = propagate_exact(&cfg).unwrap();
            let expected = (2.0 * readings.theta_prime).sin();
            let got = readings.normalized_signal().unwrap();
            assert!(
                (got - expected).abs() < 1e-12,
                "theta = {theta}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn path_amplitude_identity() {
        // The state-level propagation must reproduce the scalar form
        // <post|pre> (cos theta +- i A_w sin theta) on each path.
        let setting = WeakValueSelection::Target(Complex64::new(100.0, 10.0))
            .setting()
            .unwrap();
        let theta = 3e-3;
        let ph = Complex64::new(0.0, theta).exp();
        let u_plus = TwoLevelState::new(setting.pre.a0 * ph, setting.pre.a1 * ph.conj());
        let c_plus = setting.post.inner(&u_plus);
        let s = setting.post.inner(&setting.pre);
        let shortcut = s
            * (Complex64::new(theta.cos(), 0.0)
                + Complex64::new(0.0, 1.0) * setting.weak_value * theta.sin());
        assert!((c_plus - shortcut).norm() < 1e-12 * shortcut.norm());
    }

    #[test]
    fn energy_is_conserved_with_ideal_detectors() {
        for &theta in &[0.0, 1e-4, 0.1, -0.25] {
            for &eps in &[0.0, 0.01, 0.5] {
                let mut cfg = delta_cfg(theta, 0.02);
                cfg.epsilon = eps;
                cfg.input_intensity = 2.5;
                let r = propagate_exact(&cfg).unwrap();
                let total = r.i_d1 + r.i_d2 + r.rejected_intensity;
                assert!(
                    (total - cfg.input_intensity).abs() < 1e-10 * cfg.input_intensity,
                    "theta {theta} eps {eps}: {total}"
                );
            }
        }
    }

    #[test]
    fn bias_offset_at_zero_phase_is_half_epsilon() {
        let mut cfg = delta_cfg(0.0, 0.01);
        cfg.epsilon = 0.01;
        let r = propagate_exact(&cfg).unwrap();
        let offset = r.normalized_signal().unwrap();
        assert!((offset - 0.005).abs() < 1e-12);
        // Same order as the bias itself: the alignment error floor.
        assert!(offset > 0.4 * cfg.epsilon && offset < 0.6 * cfg.epsilon);
    }

    #[test]
    fn detected_intensity_scales_with_efficiency() {
        let mut cfg = delta_cfg(2e-3, 0.01);
        cfg.input_intensity = 1e4;
        cfg.detector_efficiency = (0.9, 0.8);
        let r = propagate_exact(&cfg).unwrap();
        assert!((r.i_d1 - r.p_d1 * 1e4 * 0.9).abs() < 1e-12 * r.i_d1.abs().max(1.0));
        assert!((r.i_d2 - r.p_d2 * 1e4 * 0.8).abs() < 1e-12 * r.i_d2.abs().max(1.0));
    }

    #[test]
    fn saturation_flags_follow_threshold() {
        let mut cfg = delta_cfg(1e-3, 0.01);
        cfg.input_intensity = 1e6;
        let unbounded = propagate_exact(&cfg).unwrap();
        cfg.i_max = Some(unbounded.i_d1 * 0.5);
        let r = propagate_exact(&cfg).unwrap();
        assert!(r.saturated.0);
        cfg.i_max = Some(unbounded.i_d1 * 10.0);
        let r = propagate_exact(&cfg).unwrap();
        assert!(!r.saturated.0 && !r.saturated.1);
    }

    #[test]
    fn closed_form_difference_signal_tracks_exact() {
        // gamma = 0.01 (delta = atan 0.01, A_w = 100), I0 = 1e6, theta = 1e-5.
        let mut cfg = delta_cfg(1e-5, 0.01_f64.atan());
        cfg.input_intensity = 1e6;
        let estimate = difference_signal_estimate(&cfg);
        assert!((estimate - 0.2).abs() < 1e-12);
        let exact = difference_signal(&cfg).unwrap();
        assert!(
            ((exact - estimate) / estimate).abs() < 1e-3,
            "exact {exact} vs estimate {estimate}"
        );
    }

    #[test]
    fn nonlinearity_leading_order() {
        let d = nonlinearity(1e-4, 100.0).unwrap();
        assert!((d - 3.3328e-5).abs() < 1e-9);
        let leading = (100.0_f64 * 1e-4).powi(2) / 3.0;
        assert!(((d - leading) / leading).abs() < 1e-3);
        assert_eq!(nonlinearity(0.0, 100.0).unwrap(), 0.0);
        assert!((nonlinearity(-1e-4, 100.0).unwrap() - d).abs() < 1e-18);
        assert!(nonlinearity(1e-4, 0.0).is_err());
    }

    #[test]
    fn max_phase_tracks_paper_bound() {
        for &a_w in &[10.0, 50.0, 100.0] {
            let theta_max = max_measurable_phase(a_w, 1e-4).unwrap();
            let product = a_w * theta_max;
            assert!(
                ((product - 0.0175) / 0.0175).abs() <= 0.02,
                "A_w = {a_w}: A_w theta_max = {product}"
            );
            assert!(nonlinearity(theta_max, a_w).unwrap() <= 1e-4);
            assert!(nonlinearity(theta_max + 1e-9, a_w).unwrap() > 1e-4);
        }
        // Unamplified reference: same bound applies to the phase directly.
        let si = max_measurable_phase(1.0, 1e-4).unwrap();
        assert!(((si - 0.0175) / 0.0175).abs() <= 0.02);
        assert!(max_measurable_phase(100.0, 0.5).is_err());
    }

    #[test]
    fn dynamic_range_ratio() {
        assert!((dynamic_range(1.75e-4, 1e-8).unwrap() - 1.75e4).abs() < 1e-8);
        assert!(matches!(
            dynamic_range(1.0, 0.0),
            Err(WvaError::DivideByZero { .. })
        ));
    }

    #[test]
    fn config_kv_round_trip() {
        let mut cfg = delta_cfg(1e-3, 0.01);
        cfg.epsilon = 0.02;
        cfg.input_intensity = 1e6;
        cfg.detector_efficiency = (0.95, 0.9);
        cfg.i_max = Some(1e4);
        let back = TrainConfig::from_kv(&cfg.to_kv()).unwrap();
        assert_eq!(cfg, back);

        let complex = TrainConfig::new(
            5e-4,
            WeakValueSelection::Target(Complex64::new(100.0, 10.0)),
        )
        .unwrap();
        assert_eq!(complex, TrainConfig::from_kv(&complex.to_kv()).unwrap());

        assert!(TrainConfig::from_kv("theta = 1e-3\ndelta = 0.01\nbogus = 1\n").is_err());
        assert!(TrainConfig::from_kv("delta = 0.01\n").is_err());
    }

    #[test]
    fn readings_csv_schema_is_pinned() {
        assert_eq!(
            readings_csv_header(),
            "theta,delta,epsilon,p_d1,p_d2,i_d1,i_d2,signal,theta_prime"
        );
        let cfg = delta_cfg(1e-3, 0.01);
        let readings = propagate_exact(&cfg).unwrap();
        let row = readings_csv_row(&cfg, &readings);
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 9);
        // The signal column is the normalized ratio, not the raw difference.
        let signal: f64 = fields[7].parse().unwrap();
        assert!((signal - readings.normalized_signal().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn config_validation_rejects_bad_domains() {
        assert!(TrainConfig::new(1e-3, WeakValueSelection::Delta(0.0)).is_err());
        assert!(TrainConfig::new(1e-3, WeakValueSelection::Delta(1.0)).is_err());
        let mut cfg = delta_cfg(1e-3, 0.01);
        cfg.epsilon = 1.5;
        assert!(cfg.validate().is_err());
        cfg.epsilon = 0.0;
        cfg.detector_efficiency = (1.2, 1.0);
        assert!(cfg.validate().is_err());
    }
}
