//! Lively discrete-time quantum walks on cycles.
//!
//! A lively walk uses a three-state coin: directions 0 and 1 step the walker
//! by −1 and +1 around a cycle of `n` nodes, direction 2 jumps by the
//! liveliness `a`. This crate builds the walk operators (including a variant
//! with one ring edge removed), evolves pure and mixed states, diagonalizes
//! the walk either through its Fourier blocks or densely, and derives
//! observables: time-averaged distributions, their periodicity, the coin
//! marginal, the drift of the mean position and the Chernoff information
//! between intact and broken networks.

pub mod analysis;
pub mod detection;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod spectral;

pub use analysis::{
    coin_marginal, mean_position_drift, periodicity_report, time_averaged_distribution, DriftReport, PeriodicityReport,
};
pub use detection::{
    advantage_bound, chernoff_information, detect_broken_link, required_samples, ChernoffInformation, DetectionReport,
    HypothesisPair, SampleCount,
};
pub use error::{Result, WalkError};
pub use evolution::{
    evolve, evolve_ensemble, line_embed, position_distribution, prepare_initial, step, Distribution, EnsembleState,
    Geometry, PreparedState, PureState,
};
pub use linalg::{CoinMatrix, C64};
pub use model::{
    build_broken_shift, build_grover_coin, build_shift, build_walk_operator, gcd, BrokenShift, CoinSpec,
    InitialStateSpec, LivelyShift, SchedulePolicy, WalkConfig, WalkOperator,
};
pub use spectral::{
    block_eigensystem, closed_form_eigenvalues, fourier_block, full_spectrum, full_spectrum_with,
    limiting_distribution_spectral, FourierBlock, SpectralDecomposition, SpectrumMethod, SpectrumSource,
};
