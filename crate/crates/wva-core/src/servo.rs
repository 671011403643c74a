//! Closed-loop phase compensation.
//!
//! A feedback modulator drives the measured phase toward zero: each
//! iteration reads the normalized difference signal at the residual phase
//! `theta_true - gamma_eff * phi_hat` and nudges the compensator setting
//! `phi_hat` by `gain * signal`. The weak-value scheme works the actuator
//! at the amplified scale, so one actuator quantum `phi_min` resolves a
//! bare phase of `gamma * phi_min`; standard interferometry runs the same
//! loop with unit scale factor.

use crate::error::{Result, WvaError};
use crate::noise::{sample_noisy_reading, NoiseParams, Scheme};
use crate::train::{amplified_phase, propagate_exact, TrainConfig, WeakValueSelection};

/// Loop gain giving deadbeat settling for the small-signal slope of 2.
pub const DEFAULT_GAIN: f64 = 0.5;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoConfig {
    pub scheme: Scheme,
    /// Update factor on the raw signal; stable for values in (0, 1),
    /// monotone (no overshoot) up to [`DEFAULT_GAIN`].
    pub gain: f64,
    /// Actuator quantization step, in compensator units.
    pub phi_min: f64,
    /// Actuator limit: `|phi_hat| <= modulator_range`.
    pub modulator_range: f64,
    pub max_iterations: usize,
    /// Residual bare phase accepted as settled. Defaults to one actuator
    /// quantum referred to the bare phase, `gamma_eff * phi_min`; smaller
    /// requests are rejected as unresolvable.
    pub settle_tolerance: Option<f64>,
    /// Detector noise applied to both ports, with a base RNG seed that is
    /// advanced deterministically per iteration.
    pub noise: Option<(NoiseParams, u64)>,
}

impl ServoConfig {
    pub fn new(scheme: Scheme, phi_min: f64, modulator_range: f64) -> Self {
        Self {
            scheme,
            gain: DEFAULT_GAIN,
            phi_min,
            modulator_range,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            settle_tolerance: None,
            noise: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain > 0.0 && self.gain < 1.0) {
            return Err(WvaError::InvalidInput(format!(
                "gain {} outside the stable interval (0, 1)",
                self.gain
            )));
        }
        if !(self.phi_min > 0.0 && self.phi_min.is_finite()) {
            return Err(WvaError::InvalidInput(format!(
                "actuator quantum {} must be positive",
                self.phi_min
            )));
        }
        if !(self.modulator_range >= self.phi_min && self.modulator_range.is_finite()) {
            return Err(WvaError::InvalidInput(format!(
                "modulator range {} must be at least one quantum {}",
                self.modulator_range, self.phi_min
            )));
        }
        if self.max_iterations == 0 {
            return Err(WvaError::InvalidInput("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// One recorded loop iteration; `phi_hat` and `theta_hat_running` are the
/// values in force when `signal` was read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoStep {
    pub iteration: usize,
    pub phi_hat: f64,
    pub signal: f64,
    pub theta_hat_running: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServoTrace {
    pub steps: Vec<ServoStep>,
    /// Settled: the residual signal fell below the tolerance, or the
    /// quantized actuator stopped moving.
    pub converged: bool,
    /// The quantized update underflowed `phi_min` before the tolerance
    /// was met; the loop is at its resolution floor.
    pub stalled: bool,
    pub iterations: usize,
    pub phi_hat: f64,
    /// Phase estimate `gamma_eff * phi_hat`.
    pub theta_hat: f64,
}

pub fn trace_csv_header() -> &'static str {
    "iteration,phi_hat,signal,theta_hat_running"
}

pub fn trace_csv_row(step: &ServoStep) -> String {
    format!(
        "{},{},{},{}",
        step.iteration,
        crate::train::csv_float(step.phi_hat),
        crate::train::csv_float(step.signal),
        crate::train::csv_float(step.theta_hat_running)
    )
}

fn quantize(phi: f64, quantum: f64, range: f64) -> f64 {
    ((phi / quantum).round() * quantum).clamp(-range, range)
}

/// Runs the feedback loop against the exact optical model.
///
/// The compensable window is `|theta_true| <= modulator_range * gamma_eff`;
/// outside it the actuator saturates before nulling the signal and the run
/// is refused up front.
pub fn run_servo(theta_true: f64, train: &TrainConfig, cfg: &ServoConfig) -> Result<ServoTrace> {
    cfg.validate()?;
    train.validate()?;
    if !theta_true.is_finite() {
        return Err(WvaError::InvalidInput(format!(
            "phase to compensate must be finite, got {theta_true}"
        )));
    }

    // Standard interferometry reuses the same train with the half-angle
    // selection, whose weak value and scale factor are exactly 1.
    let selection = match cfg.scheme {
        Scheme::Dwm => train.selection,
        Scheme::Si => WeakValueSelection::Delta(std::f64::consts::FRAC_PI_4),
    };
    selection.validate()?;
    let gamma_eff = selection.gamma();
    let a_w = selection.weak_value();

    let reach = cfg.modulator_range * gamma_eff;
    if theta_true.abs() > reach {
        return Err(WvaError::NotCompensable {
            theta: theta_true,
            range: reach,
        });
    }

    let tol_theta = match cfg.settle_tolerance {
        Some(t) => {
            if !(t >= gamma_eff * cfg.phi_min && t.is_finite()) {
                return Err(WvaError::InvalidInput(format!(
                    "settle tolerance {t} below the actuator resolution {}",
                    gamma_eff * cfg.phi_min
                )));
            }
            t
        }
        None => gamma_eff * cfg.phi_min,
    };
    // Residual phase maps to the ideal curve value sin(2 theta').
    let signal_tol = (2.0 * amplified_phase(tol_theta, a_w)?.theta_prime).sin().abs();

    let mut phi_hat = 0.0_f64;
    let mut steps = Vec::new();
    let mut converged = false;
    let mut stalled = false;

    for k in 0..cfg.max_iterations {
        let mut stage = *train;
        stage.selection = selection;
        stage.theta = theta_true - gamma_eff * phi_hat;
        let readings = propagate_exact(&stage)?;
        let signal = match &cfg.noise {
            None => readings.normalized_signal()?,
            Some((params, base_seed)) => {
                let s1 = base_seed.wrapping_add(2 * k as u64);
                let s2 = base_seed.wrapping_add(2 * k as u64 + 1);
                let i1 = sample_noisy_reading(readings.i_d1, params, s1)?;
                let i2 = sample_noisy_reading(readings.i_d2, params, s2)?;
                let sum = i1 + i2;
                if sum <= 0.0 {
                    return Err(WvaError::DivideByZero {
                        context: "noisy detector sum",
                    });
                }
                (i1 - i2) / sum
            }
        };

        steps.push(ServoStep {
            iteration: k,
            phi_hat,
            signal,
            theta_hat_running: gamma_eff * phi_hat,
        });

        if signal.abs() <= signal_tol {
            converged = true;
            break;
        }

        let next = quantize(phi_hat + cfg.gain * signal, cfg.phi_min, cfg.modulator_range);
        if next == phi_hat {
            stalled = true;
            converged = true;
            break;
        }
        phi_hat = next;
    }

    let iterations = steps.len();
    Ok(ServoTrace {
        steps,
        converged,
        stalled,
        iterations,
        phi_hat,
        theta_hat: gamma_eff * phi_hat,
    })
}

fn scale_factor(scheme: Scheme, gamma: f64) -> Result<f64> {
    match scheme {
        Scheme::Dwm => {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(WvaError::InvalidInput(format!(
                    "scale factor gamma {gamma} outside (0, 1)"
                )));
            }
            Ok(gamma)
        }
        Scheme::Si => Ok(1.0),
    }
}

/// Smallest resolvable bare phase of the closed loop: one actuator quantum
/// referred through the scheme's scale factor.
pub fn closed_loop_precision(scheme: Scheme, gamma: f64, phi_min: f64) -> Result<f64> {
    if !(phi_min > 0.0 && phi_min.is_finite()) {
        return Err(WvaError::InvalidInput(format!(
            "actuator quantum {phi_min} must be positive"
        )));
    }
    Ok(scale_factor(scheme, gamma)? * phi_min)
}

/// Compensable phase window and span ratio `(theta_max, theta_max / precision)`.
///
/// The span ratio equals `modulator_range / phi_min` for both schemes: the
/// scale factor trades range for resolution without changing the count of
/// distinguishable settings.
pub fn closed_loop_dynamic_range(
    scheme: Scheme,
    gamma: f64,
    phi_min: f64,
    modulator_range: f64,
) -> Result<(f64, f64)> {
    if !(modulator_range > 0.0 && modulator_range.is_finite()) {
        return Err(WvaError::InvalidInput(format!(
            "modulator range {modulator_range} must be positive"
        )));
    }
    let precision = closed_loop_precision(scheme, gamma, phi_min)?;
    let theta_max = scale_factor(scheme, gamma)? * modulator_range;
    Ok((theta_max, theta_max / precision))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_gamma_train() -> TrainConfig {
        TrainConfig::new(0.0, WeakValueSelection::Delta(0.01_f64.atan())).unwrap()
    }

    #[test]
    fn small_phase_settles_to_quantum_accuracy() {
        let train = small_gamma_train();
        let cfg = ServoConfig::new(Scheme::Dwm, 1e-6, 1.0);
        let gamma = train.selection.gamma();
        let theta = 1e-3;
        let trace = run_servo(theta, &train, &cfg).unwrap();
        assert!(trace.converged);
        assert!(trace.iterations < 50, "took {}", trace.iterations);
        assert!(
            (trace.theta_hat - theta).abs() <= gamma * cfg.phi_min,
            "estimate {} vs {theta}",
            trace.theta_hat
        );
        // The estimator is exact up to quantization: no model correction
        // is needed even though the raw curve is nonlinear.
        assert!((trace.phi_hat - theta / gamma).abs() <= cfg.phi_min);
    }

    #[test]
    fn large_phase_needs_matching_range() {
        let train = small_gamma_train();
        let theta = 0.5;

        // Range 2 pi reaches only |theta| <= 2 pi * 0.01.
        let narrow = ServoConfig::new(Scheme::Dwm, 1e-6, 2.0 * std::f64::consts::PI);
        match run_servo(theta, &train, &narrow) {
            Err(WvaError::NotCompensable { range, .. }) => {
                assert!((range - 2.0 * std::f64::consts::PI * 0.01).abs() < 1e-12)
            }
            other => panic!("expected NotCompensable, got {other:?}"),
        }

        let wide = ServoConfig::new(Scheme::Dwm, 1e-6, 100.0);
        let trace = run_servo(theta, &train, &wide).unwrap();
        let gamma = train.selection.gamma();
        assert!(trace.converged, "iterations {}", trace.iterations);
        assert!(
            (trace.theta_hat - theta).abs() <= gamma * wide.phi_min,
            "estimate {}",
            trace.theta_hat
        );
    }

    #[test]
    fn accuracy_holds_across_the_compensable_window() {
        let train = small_gamma_train();
        let cfg = ServoConfig::new(Scheme::Dwm, 1e-6, 100.0);
        let gamma = train.selection.gamma();
        for &theta in &[-0.9, -0.3, -1e-4, 3e-5, 0.05, 0.7] {
            let trace = run_servo(theta, &train, &cfg).unwrap();
            assert!(trace.converged, "theta {theta}");
            assert!(
                (trace.theta_hat - theta).abs() <= gamma * cfg.phi_min,
                "theta {theta}: estimate {}",
                trace.theta_hat
            );
        }
    }

    #[test]
    fn gains_up_to_deadbeat_converge() {
        let train = small_gamma_train();
        let gamma = train.selection.gamma();
        for &gain in &[0.1_f64, 0.25, 0.5] {
            let mut cfg = ServoConfig::new(Scheme::Dwm, 1e-6, 1.0);
            cfg.gain = gain;
            let trace = run_servo(2e-3, &train, &cfg).unwrap();
            assert!(trace.converged, "gain {gain}");
            // Below deadbeat the actuator can stall up to
            // gamma phi_min / (4 gain) short of the target.
            let bound = gamma * cfg.phi_min * (0.5 / gain + 1.0);
            assert!(
                (trace.theta_hat - 2e-3).abs() <= bound,
                "gain {gain}: estimate {}",
                trace.theta_hat
            );
        }
        let mut bad = ServoConfig::new(Scheme::Dwm, 1e-6, 1.0);
        bad.gain = 1.5;
        assert!(run_servo(1e-3, &train, &bad).is_err());
    }

    #[test]
    fn overdriven_gain_limit_cycles_on_a_coarse_actuator() {
        let train = small_gamma_train();
        let mut cfg = ServoConfig::new(Scheme::Dwm, 1e-2, 1.0);
        cfg.gain = 0.9;
        cfg.max_iterations = 300;
        let trace = run_servo(1.5e-3, &train, &cfg).unwrap();
        // The quantized actuator hops between settings straddling the
        // target without ever nulling the signal.
        assert!(!trace.converged);
        assert_eq!(trace.iterations, 300);
    }

    #[test]
    fn coarse_actuator_stalls_at_its_resolution_floor() {
        // At deadbeat gain the update always clears half a quantum before
        // the tolerance is met, so a stall needs a weaker gain.
        let train = small_gamma_train();
        let mut cfg = ServoConfig::new(Scheme::Dwm, 0.03, 1.0);
        cfg.gain = 0.1;
        let gamma = train.selection.gamma();
        let trace = run_servo(1e-3, &train, &cfg).unwrap();
        assert!(trace.stalled && trace.converged);
        // Residual bounded by the quantized-update underflow window.
        let bound = gamma * cfg.phi_min * (0.5 / cfg.gain + 1.0);
        assert!((trace.theta_hat - 1e-3).abs() <= bound);
    }

    #[test]
    fn si_scheme_runs_at_unit_scale() {
        // The DWM selection in the train is ignored under Scheme::Si.
        let train = small_gamma_train();
        let cfg = ServoConfig::new(Scheme::Si, 1e-6, 1.0);
        let theta = 0.05;
        let trace = run_servo(theta, &train, &cfg).unwrap();
        assert!(trace.converged);
        assert!((trace.theta_hat - theta).abs() <= cfg.phi_min);
        assert!((trace.phi_hat - theta).abs() <= cfg.phi_min);
    }

    #[test]
    fn settle_tolerance_below_resolution_is_rejected() {
        let train = small_gamma_train();
        let mut cfg = ServoConfig::new(Scheme::Dwm, 1e-6, 1.0);
        cfg.settle_tolerance = Some(1e-12);
        assert!(matches!(
            run_servo(1e-3, &train, &cfg),
            Err(WvaError::InvalidInput(_))
        ));
        cfg.settle_tolerance = Some(1e-6);
        assert!(run_servo(1e-3, &train, &cfg).is_ok());
    }

    #[test]
    fn noisy_runs_are_seed_deterministic() {
        let train = TrainConfig {
            input_intensity: 1e8,
            ..small_gamma_train()
        };
        let params = NoiseParams::new(1e-3, 0.0).unwrap();
        let mut cfg = ServoConfig::new(Scheme::Dwm, 1e-6, 1.0);
        cfg.noise = Some((params, 7));
        // Noise floors the usable tolerance well above one quantum.
        cfg.settle_tolerance = Some(5e-6);
        let a = run_servo(1e-3, &train, &cfg).unwrap();
        let b = run_servo(1e-3, &train, &cfg).unwrap();
        assert_eq!(a, b);
        cfg.noise = Some((params, 8));
        let c = run_servo(1e-3, &train, &cfg).unwrap();
        assert_ne!(a.steps, c.steps);
        assert!((a.theta_hat - 1e-3).abs() < 1e-4);
    }

    #[test]
    fn precision_and_range_helpers() {
        let (theta_max_dwm, ratio_dwm) =
            closed_loop_dynamic_range(Scheme::Dwm, 0.01, 1e-6, 2.0 * std::f64::consts::PI)
                .unwrap();
        let (theta_max_si, ratio_si) =
            closed_loop_dynamic_range(Scheme::Si, 0.01, 1e-6, 2.0 * std::f64::consts::PI).unwrap();
        assert!((theta_max_dwm - 0.01 * 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!((theta_max_si - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        // Same number of distinguishable settings for both schemes.
        assert!((ratio_dwm - ratio_si).abs() / ratio_si < 1e-12);

        let p_dwm = closed_loop_precision(Scheme::Dwm, 0.01, 1e-6).unwrap();
        let p_si = closed_loop_precision(Scheme::Si, 0.01, 1e-6).unwrap();
        assert!((p_dwm - 1e-8).abs() < 1e-22);
        assert!((p_si / p_dwm - 100.0).abs() < 1e-9);

        assert!(closed_loop_precision(Scheme::Dwm, 1.5, 1e-6).is_err());
        assert!(closed_loop_precision(Scheme::Dwm, 0.01, 0.0).is_err());
    }

    #[test]
    fn trace_csv_schema_is_pinned() {
        assert_eq!(trace_csv_header(), "iteration,phi_hat,signal,theta_hat_running");
        let step = ServoStep {
            iteration: 3,
            phi_hat: 0.25,
            signal: 0.0,
            theta_hat_running: 2.5e-3,
        };
        assert_eq!(trace_csv_row(&step), "3,2.5e-1,0,2.5e-3");
    }
}
