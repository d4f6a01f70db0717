//! Distinguishing an intact network from one with a broken link using the
//! limiting distributions of the two walks.
//!
//! The Chernoff information `C = −min_λ log₂ Σ p0^λ p1^{1−λ}` sets the error
//! exponent of the optimal test, so about `1/C` measurements give the best
//! advantage `1 − 2^{−qC}`. Logarithms are base 2 to match that exponent.

use crate::error::{Result, WalkError};
use crate::evolution::{prepare_initial, Distribution, NORM_TOL};
use crate::model::WalkConfig;
use crate::optimize::golden_section_minimize;
use crate::spectral::{full_spectrum_with, limiting_distribution_prepared, SpectrumMethod};

/// Search interval for λ.
pub const LAMBDA_MIN: f64 = 1e-9;
pub const LAMBDA_MAX: f64 = 1.0 - 1e-9;
/// Golden-section stopping width.
pub const LAMBDA_WIDTH: f64 = 1e-12;
/// Chernoff values below this are rounding noise of the `p0 = p1` case.
pub const CHERNOFF_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChernoffInformation {
    Finite {
        value: f64,
        lambda_star: f64,
    },
    /// Disjoint supports: a single sample decides.
    Infinite,
}

impl ChernoffInformation {
    pub fn value(&self) -> f64 {
        match *self {
            ChernoffInformation::Finite { value, .. } => value,
            ChernoffInformation::Infinite => f64::INFINITY,
        }
    }

    pub fn lambda_star(&self) -> Option<f64> {
        match *self {
            ChernoffInformation::Finite { lambda_star, .. } => Some(lambda_star),
            ChernoffInformation::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleCount {
    Finite(u64),
    /// Indistinguishable distributions.
    Infinite,
}

impl std::fmt::Display for SampleCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleCount::Finite(q) => write!(f, "{q}"),
            SampleCount::Infinite => f.write_str("inf"),
        }
    }
}

/// Intact (`p0`) and broken-link (`p1`) distributions over the same nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    pub p0: Distribution,
    pub p1: Distribution,
}

impl HypothesisPair {
    pub fn new(p0: Distribution, p1: Distribution) -> Result<Self> {
        if p0.len() != p1.len() {
            return Err(WalkError::param(format!(
                "distributions have lengths {} and {}",
                p0.len(),
                p1.len()
            )));
        }
        for (name, d) in [("p0", &p0), ("p1", &p1)] {
            if (d.total() - 1.0).abs() > NORM_TOL {
                return Err(WalkError::param(format!("{name} sums to {}", d.total())));
            }
        }
        Ok(HypothesisPair { p0, p1 })
    }

    /// Nonzero-in-both bins as `(ln p0, ln p1)`.
    fn shared_support(&self) -> Vec<(f64, f64)> {
        self.p0
            .probabilities()
            .iter()
            .zip(self.p1.probabilities())
            .filter(|(p, q)| **p > 0.0 && **q > 0.0)
            .map(|(p, q)| (p.ln(), q.ln()))
            .collect()
    }
}

/// `log₂ Σ_i p0(i)^λ p1(i)^{1−λ}`, with 0^λ = 0 for λ in (0, 1).
pub fn chernoff_objective(p0: &Distribution, p1: &Distribution, lambda: f64) -> f64 {
    let s: f64 = p0
        .probabilities()
        .iter()
        .zip(p1.probabilities())
        .filter(|(p, q)| **p > 0.0 && **q > 0.0)
        .map(|(p, q)| (lambda * p.ln() + (1.0 - lambda) * q.ln()).exp())
        .sum();
    s.log2()
}

pub fn chernoff_information(p0: &Distribution, p1: &Distribution) -> Result<ChernoffInformation> {
    let pair = HypothesisPair::new(p0.clone(), p1.clone())?;
    Ok(chernoff_of_pair(&pair))
}

pub fn chernoff_of_pair(pair: &HypothesisPair) -> ChernoffInformation {
    let logs = pair.shared_support();
    if logs.is_empty() {
        return ChernoffInformation::Infinite;
    }
    let objective = |lambda: f64| {
        logs.iter()
            .map(|(lp, lq)| (lambda * lp + (1.0 - lambda) * lq).exp())
            .sum::<f64>()
            .log2()
    };
    let m = golden_section_minimize(objective, LAMBDA_MIN, LAMBDA_MAX, LAMBDA_WIDTH);
    let value = if -m.value < CHERNOFF_FLOOR { 0.0 } else { -m.value };
    ChernoffInformation::Finite {
        value,
        lambda_star: m.x,
    }
}

/// `⌈1/C⌉`; infinite when `C = 0`, one when `C = ∞`.
pub fn samples_for(c: &ChernoffInformation) -> SampleCount {
    match *c {
        ChernoffInformation::Infinite => SampleCount::Finite(1),
        ChernoffInformation::Finite { value, .. } if value <= 0.0 => SampleCount::Infinite,
        ChernoffInformation::Finite { value, .. } => {
            let q = (1.0 / value).ceil();
            if q >= u64::MAX as f64 {
                SampleCount::Infinite
            } else {
                SampleCount::Finite((q as u64).max(1))
            }
        }
    }
}

pub fn required_samples(p0: &Distribution, p1: &Distribution) -> Result<SampleCount> {
    Ok(samples_for(&chernoff_information(p0, p1)?))
}

/// Asymptotic best advantage `1 − 2^{−q·C}` after `q` samples.
pub fn advantage_bound(q: u64, chernoff: f64) -> f64 {
    if q == 0 || chernoff <= 0.0 {
        return 0.0;
    }
    1.0 - (-(q as f64) * chernoff).exp2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub chernoff: ChernoffInformation,
    pub required_samples: SampleCount,
    /// Advantage bound at `required_samples`; `1 − 1/2` when `q = 1/C` exactly.
    pub advantage_at_q: f64,
}

impl DetectionReport {
    pub fn from_pair(pair: &HypothesisPair) -> Self {
        let chernoff = chernoff_of_pair(pair);
        let required_samples = samples_for(&chernoff);
        let advantage_at_q = match required_samples {
            SampleCount::Finite(q) => advantage_bound(q, chernoff.value()),
            SampleCount::Infinite => 0.0,
        };
        DetectionReport {
            chernoff,
            required_samples,
            advantage_at_q,
        }
    }
}

/// Limiting distributions of the intact walk and of the same walk with
/// `config.broken_edge` removed, from `config.initial`.
pub fn detection_hypotheses(config: &WalkConfig, grouping_tol: f64) -> Result<HypothesisPair> {
    if config.broken_edge.is_none() {
        return Err(WalkError::param("detection needs a broken edge"));
    }
    config.validate()?;
    let initial = prepare_initial(&config.initial, config.n)?;
    let intact = WalkConfig {
        broken_edge: None,
        ..config.clone()
    };
    let p0 = limiting_distribution_prepared(
        &full_spectrum_with(&intact, grouping_tol, SpectrumMethod::Auto)?,
        &initial,
    )?;
    let p1 = limiting_distribution_prepared(
        &full_spectrum_with(config, grouping_tol, SpectrumMethod::Dense)?,
        &initial,
    )?;
    HypothesisPair::new(p0, p1)
}

pub fn detect_broken_link(config: &WalkConfig, grouping_tol: f64) -> Result<DetectionReport> {
    Ok(DetectionReport::from_pair(&detection_hypotheses(config, grouping_tol)?))
}
