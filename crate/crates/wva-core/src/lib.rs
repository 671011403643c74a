//! Numerical laboratory for weak-value amplified phase estimation.
//!
//! The crate is organized around the signal chain of a difference weak
//! measurement: a two-level system is pre-selected, coupled weakly to a
//! pointer, post-selected near-orthogonally, and read out by balanced
//! difference detection behind a Mach-Zehnder recombiner.
//!
//! * [`qubit`] - exact two-level state algebra, weak values, and the
//!   system-pointer coupling with and without the weak approximation.
//! * [`train`] - Jones-calculus propagation through the interferometer,
//!   amplified phase, detector readings, and nonlinearity bounds.
//! * [`noise`] - shot-noise / relative-intensity-noise budgets, SNR, and
//!   accuracy/precision limits for the competing schemes.
//! * [`qfi`] - Bloch-vector channels and quantum Fisher information under
//!   phase-flip decoherence, with Cramer-Rao bounds.
//! * [`servo`] - closed-loop phase compensation with a quantized modulator.

pub mod error;
pub mod noise;
pub mod qfi;
pub mod qubit;
pub mod servo;
pub mod train;

pub use error::{Result, WvaError};
pub use noise::{
    accuracy_limit, noise_terms, precision_limit, resolvable_theta, sample_noisy_reading, snr,
    AlignmentScheme, NoiseParams, SaturationRegime, Scheme, SwmDetectorSpec,
};
pub use qfi::{
    cramer_rao, cramer_rao_conventional, pointer_bloch, qfi_dwm, qfi_finite_difference,
    qfi_from_derivative, qfi_si, AffineChannel, BlochVector, DensityMatrix, QfiEvaluation,
};
pub use qubit::{
    exact_postselected_pointer, fidelity, post_selection_for_weak_value, weak_approx_pointer,
    weak_value, PauliObservable, TwoLevelState, WeakValueSetting,
};
pub use servo::{
    closed_loop_dynamic_range, closed_loop_precision, run_servo, trace_csv_header, trace_csv_row,
    ServoConfig, ServoStep, ServoTrace,
};
pub use train::{
    amplified_phase, csv_float, detection_probabilities, difference_signal,
    difference_signal_estimate, dynamic_range, max_measurable_phase, nonlinearity,
    propagate_exact, readings_csv_header, readings_csv_row, AmplifiedPhase, DetectorReadings,
    TrainConfig, WeakValueSelection,
};
