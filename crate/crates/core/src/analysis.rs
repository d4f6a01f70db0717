//! Observables: empirical time averages, periodicity checks, coin-register
//! marginals and the drift of the mean position.

use crate::error::{Result, WalkError};
use crate::evolution::{
    line_embed_ensemble, position_weights, Distribution, EnsembleState, Geometry, Propagator, PureState,
};
use crate::linalg::{c64, CoinMatrix, ZERO};
use crate::model::WalkConfig;

/// `(1/(N+1)) Σ_{t=0}^{N} P(x, t)` from a single trajectory.
pub fn time_averaged_distribution(config: &WalkConfig, initial: &PureState, steps: usize) -> Result<Distribution> {
    let prop = Propagator::new(config)?;
    let sites = initial.sites();
    let mut acc = vec![0.0; sites];
    prop.run(initial, 0, steps, |_, s| {
        for (a, p) in acc.iter_mut().zip(position_weights(s.amplitudes(), sites)) {
            *a += p;
        }
    })?;
    let terms = (steps + 1) as f64;
    Distribution::from_probabilities(acc.into_iter().map(|a| a / terms).collect())
}

/// Weighted time average over the members of an ensemble.
pub fn time_averaged_ensemble(config: &WalkConfig, initial: &EnsembleState, steps: usize) -> Result<Distribution> {
    let sites = initial.geometry().sites();
    let mut acc = vec![0.0; sites];
    for (w, s) in initial.members() {
        let d = time_averaged_distribution(config, s, steps)?;
        for (a, p) in acc.iter_mut().zip(d.probabilities()) {
            *a += w * p;
        }
    }
    Distribution::from_probabilities(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityReport {
    pub period: usize,
    /// `max_x |Π(x) − Π((x + g) mod n)|`.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub periodic: bool,
}

pub fn periodicity_report(dist: &Distribution, g: usize, tol: f64) -> Result<PeriodicityReport> {
    let n = dist.len();
    if g == 0 || !n.is_multiple_of(g) {
        return Err(WalkError::param(format!("period {g} does not divide {n}")));
    }
    let p = dist.probabilities();
    let max_deviation = (0..n).map(|x| (p[x] - p[(x + g) % n]).abs()).fold(0.0, f64::max);
    Ok(PeriodicityReport {
        period: g,
        max_deviation,
        tolerance: tol,
        periodic: max_deviation < tol,
    })
}

/// Reduced coin-register matrix `tr_P ρ`.
pub fn coin_marginal(ensemble: &EnsembleState) -> CoinMatrix {
    let sites = ensemble.geometry().sites();
    let mut rho = CoinMatrix::from_element(ZERO);
    for (w, s) in ensemble.members() {
        let amps = s.amplitudes();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = ZERO;
                for x in 0..sites {
                    acc += amps[i * sites + x] * amps[j * sites + x].conj();
                }
                rho[(i, j)] += acc * *w;
            }
        }
    }
    rho
}

/// `max |ρ_C − 1/3|` entrywise.
pub fn maximally_mixed_deviation(rho: &CoinMatrix) -> f64 {
    let target = CoinMatrix::identity() * c64(1.0 / 3.0, 0.0);
    (rho - target).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Mean-position trajectory of the equal coin mixture on the unwrapped line.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    /// `E(X_t)` for `t = 0..=t_max`, in cycle coordinates without wrap-around.
    pub expectations: Vec<f64>,
    /// `E(X_{t+1}) − E(X_t)`.
    pub increments: Vec<f64>,
    /// `a/3`.
    pub theoretical_drift: f64,
}

impl DriftReport {
    /// Largest `|increment − a/3|`.
    pub fn max_increment_error(&self) -> f64 {
        self.increments
            .iter()
            .map(|d| (d - self.theoretical_drift).abs())
            .fold(0.0, f64::max)
    }
}

/// Run the mixed-coin state at `x0` for `t_max` steps under `config`'s coin
/// (or schedule) on a line embedding and record the mean position.
pub fn mean_position_drift(config: &WalkConfig, x0: usize, t_max: usize) -> Result<DriftReport> {
    if x0 >= config.n {
        return Err(WalkError::param(format!("x0 = {x0} outside 0..{}", config.n)));
    }
    let line_cfg = WalkConfig {
        broken_edge: None,
        ..config.clone()
    };
    let ensemble = line_embed_ensemble(&EnsembleState::mixed_coin(config.n, x0), t_max, config.a)?;
    let prop = Propagator::new(&line_cfg)?;
    let mut expectations = vec![0.0; t_max + 1];
    for (w, member) in ensemble.members() {
        let (offset, len) = match member.geometry() {
            Geometry::Line { offset, len, .. } => (offset, len),
            Geometry::Cycle { .. } => unreachable!("line_embed returns line states"),
        };
        prop.run(member, 0, t_max, |t, s| {
            let p = position_weights(s.amplitudes(), len);
            let mean: f64 = p
                .iter()
                .enumerate()
                .map(|(site, q)| (site as f64 - offset as f64) * q)
                .sum();
            expectations[t] += w * mean;
        })?;
    }
    let increments = expectations.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(DriftReport {
        expectations,
        increments,
        theoretical_drift: config.a as f64 / 3.0,
    })
}

/// Deviation of the coin marginal from `1/3` after each of `steps` steps on
/// the cycle, starting from the mixed-coin state at `x0`. Entry 0 is the
/// initial state.
pub fn coin_marginal_trace(config: &WalkConfig, x0: usize, steps: usize) -> Result<Vec<f64>> {
    let prop = Propagator::new(config)?;
    let start = EnsembleState::mixed_coin(config.n, x0);
    let mut members: Vec<(f64, PureState)> = start.members().to_vec();
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(maximally_mixed_deviation(&coin_marginal(&start)));
    for t in 0..steps {
        for (_, s) in members.iter_mut() {
            *s = prop.step(s, t)?;
        }
        let ens = EnsembleState::new(members.clone())?;
        trace.push(maximally_mixed_deviation(&coin_marginal(&ens)));
    }
    Ok(trace)
}
