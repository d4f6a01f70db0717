//! Pure-state and ensemble evolution on the cycle and on an unwrapped line.

use crate::error::{Result, WalkError};
use crate::linalg::{c64, C64, ONE, ZERO};
use crate::model::{basis_index, build_walk_operator, InitialStateSpec, WalkConfig, WalkOperator};

/// Squared norm of a [`PureState`] must be within this of 1.
pub const NORM_TOL: f64 = 1e-10;
/// Probabilities down to this negative value are rounding noise and clamp to 0.
pub const NEGATIVE_CLAMP: f64 = -1e-14;
/// Ensemble weights must sum to 1 within this.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Lattice a state lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Cycle {
        n: usize,
    },
    /// Open segment of `len` sites. Cycle position `x` sits at site `offset + x`.
    /// `remaining` counts the steps left before a walker could reach an end.
    Line {
        offset: usize,
        len: usize,
        a: usize,
        remaining: usize,
    },
}

impl Geometry {
    pub fn sites(&self) -> usize {
        match *self {
            Geometry::Cycle { n } => n,
            Geometry::Line { len, .. } => len,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    geometry: Geometry,
}

impl PureState {
    pub fn from_amplitudes(amplitudes: Vec<C64>, geometry: Geometry) -> Result<Self> {
        if amplitudes.len() != 3 * geometry.sites() {
            return Err(WalkError::Geometry(format!(
                "{} amplitudes for {} sites",
                amplitudes.len(),
                geometry.sites()
            )));
        }
        let state = PureState { amplitudes, geometry };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
            return Err(WalkError::Validation(format!("state has squared norm {norm}")));
        }
        Ok(state)
    }

    /// `|coin⟩ ⊗ |x⟩` on a cycle of `n` nodes.
    pub fn basis(n: usize, coin: usize, x: usize) -> Self {
        let mut amplitudes = vec![ZERO; 3 * n];
        amplitudes[basis_index(coin, x, n)] = ONE;
        PureState {
            amplitudes,
            geometry: Geometry::Cycle { n },
        }
    }

    /// `(|0⟩ + |1⟩ + |2⟩)/√3 ⊗ |x0⟩` on a cycle of `n` nodes.
    pub fn uniform_coin(n: usize, x0: usize) -> Self {
        let mut amplitudes = vec![ZERO; 3 * n];
        let amp = c64(1.0 / 3f64.sqrt(), 0.0);
        for c in 0..3 {
            amplitudes[basis_index(c, x0, n)] = amp;
        }
        PureState {
            amplitudes,
            geometry: Geometry::Cycle { n },
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn sites(&self) -> usize {
        self.geometry.sites()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Multiply every amplitude by `e^{iφ}`.
    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let p = C64::from_polar(1.0, phi);
        self.amplitudes.iter_mut().for_each(|z| *z *= p);
        self
    }

    /// Position distribution `P(x) = Σ_c |ψ(c, x)|²`.
    pub fn position_distribution(&self) -> Distribution {
        Distribution {
            probabilities: position_weights(&self.amplitudes, self.sites()),
        }
    }
}

pub(crate) fn position_weights(amplitudes: &[C64], sites: usize) -> Vec<f64> {
    (0..sites)
        .map(|x| amplitudes[x].norm_sqr() + amplitudes[sites + x].norm_sqr() + amplitudes[2 * sites + x].norm_sqr())
        .collect()
}

/// Weighted mixture of pure states, standing in for a density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    members: Vec<(f64, PureState)>,
}

impl EnsembleState {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(WalkError::param("ensemble needs at least one member"));
        }
        let geometry = members[0].1.geometry();
        if members.iter().any(|(_, s)| s.geometry() != geometry) {
            return Err(WalkError::Geometry("ensemble members on different lattices".into()));
        }
        if members.iter().any(|(w, _)| w.is_nan() || *w < 0.0) {
            return Err(WalkError::Validation("negative ensemble weight".into()));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(WalkError::Validation(format!("ensemble weights sum to {total}")));
        }
        Ok(EnsembleState { members })
    }

    pub fn single(state: PureState) -> Self {
        EnsembleState {
            members: vec![(1.0, state)],
        }
    }

    /// `(1/3) Σ_c |c⟩⟨c| ⊗ |x0⟩⟨x0|`.
    pub fn mixed_coin(n: usize, x0: usize) -> Self {
        EnsembleState {
            members: (0..3).map(|c| (1.0 / 3.0, PureState::basis(n, c, x0))).collect(),
        }
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn geometry(&self) -> Geometry {
        self.members[0].1.geometry()
    }

    pub fn position_distribution(&self) -> Distribution {
        let sites = self.geometry().sites();
        let mut probabilities = vec![0.0; sites];
        for (w, s) in &self.members {
            for (acc, p) in probabilities.iter_mut().zip(position_weights(s.amplitudes(), sites)) {
                *acc += w * p;
            }
        }
        Distribution { probabilities }
    }
}

/// Initial state prepared from an [`InitialStateSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum PreparedState {
    Pure(PureState),
    Mixed(EnsembleState),
}

impl PreparedState {
    pub fn position_distribution(&self) -> Distribution {
        match self {
            PreparedState::Pure(s) => s.position_distribution(),
            PreparedState::Mixed(e) => e.position_distribution(),
        }
    }

    pub fn into_ensemble(self) -> EnsembleState {
        match self {
            PreparedState::Pure(s) => EnsembleState::single(s),
            PreparedState::Mixed(e) => e,
        }
    }
}

pub fn prepare_initial(spec: &InitialStateSpec, n: usize) -> Result<PreparedState> {
    spec.validate(n)?;
    Ok(match spec {
        InitialStateSpec::UniformCoin { x0 } => PreparedState::Pure(PureState::uniform_coin(n, *x0)),
        InitialStateSpec::Basis { coin, x0 } => PreparedState::Pure(PureState::basis(n, *coin, *x0)),
        InitialStateSpec::MixedCoin { x0 } => PreparedState::Mixed(EnsembleState::mixed_coin(n, *x0)),
        InitialStateSpec::Custom(amps) => {
            PreparedState::Pure(PureState::from_amplitudes(amps.clone(), Geometry::Cycle { n })?)
        }
    })
}

/// Probability vector over positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Validates and clamps: entries in `[−1e−14, 0)` become 0, more negative
    /// entries or a total off by more than 1e−10 are errors.
    pub fn from_probabilities(mut probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(WalkError::param("empty distribution"));
        }
        for (i, p) in probabilities.iter_mut().enumerate() {
            if !p.is_finite() || *p < NEGATIVE_CLAMP {
                return Err(WalkError::Numeric(format!("probability {p} at index {i}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(WalkError::Numeric(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { probabilities })
    }

    pub fn uniform(len: usize) -> Self {
        Distribution {
            probabilities: vec![1.0 / len as f64; len],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }
}

/// Anything with a position marginal.
pub trait PositionMarginal {
    fn position_distribution(&self) -> Distribution;
}

impl PositionMarginal for PureState {
    fn position_distribution(&self) -> Distribution {
        PureState::position_distribution(self)
    }
}

impl PositionMarginal for EnsembleState {
    fn position_distribution(&self) -> Distribution {
        EnsembleState::position_distribution(self)
    }
}

impl PositionMarginal for PreparedState {
    fn position_distribution(&self) -> Distribution {
        PreparedState::position_distribution(self)
    }
}

pub fn position_distribution<S: PositionMarginal + ?Sized>(state: &S) -> Distribution {
    state.position_distribution()
}

/// Reusable one-step propagator for a config; picks cycle or line stepping
/// from the state it is handed.
pub struct Propagator<'c> {
    config: &'c WalkConfig,
    cycle: WalkOperator,
}

impl<'c> Propagator<'c> {
    pub fn new(config: &'c WalkConfig) -> Result<Self> {
        Ok(Propagator {
            config,
            cycle: build_walk_operator(config)?,
        })
    }

    pub fn operator(&self) -> &WalkOperator {
        &self.cycle
    }

    pub fn step(&self, state: &PureState, t: usize) -> Result<PureState> {
        let mut out = vec![ZERO; state.amplitudes.len()];
        let geometry = self.step_into(state, &mut out, t)?;
        Ok(PureState {
            amplitudes: out,
            geometry,
        })
    }

    /// Step `state` at time `t`, writing into `out`, and return the new geometry.
    fn step_into(&self, state: &PureState, out: &mut [C64], t: usize) -> Result<Geometry> {
        match state.geometry {
            Geometry::Cycle { n } => {
                if n != self.config.n {
                    return Err(WalkError::Geometry(format!(
                        "state on cycle of {n} nodes, walk has {}",
                        self.config.n
                    )));
                }
                self.cycle.apply_into(&state.amplitudes, out, t);
                Ok(state.geometry)
            }
            Geometry::Line {
                offset,
                len,
                a,
                remaining,
            } => {
                if a != self.config.a {
                    return Err(WalkError::Geometry(format!(
                        "line embedding built for a = {a}, walk has a = {}",
                        self.config.a
                    )));
                }
                if self.config.broken_edge.is_some() {
                    return Err(WalkError::Geometry("line embedding has no ring edges to break".into()));
                }
                if remaining == 0 {
                    return Err(WalkError::param("line embedding step budget exhausted"));
                }
                let mut mixed = vec![ZERO; 3 * len];
                self.config.coin.apply(t, &state.amplitudes, &mut mixed, len);
                out.iter_mut().for_each(|z| *z = ZERO);
                let moves: [isize; 3] = [-1, 1, a as isize];
                for (c, &d) in moves.iter().enumerate() {
                    for s in 0..len {
                        let z = mixed[c * len + s];
                        if z == ZERO {
                            continue;
                        }
                        let target = s as isize + d;
                        if target < 0 || target >= len as isize {
                            return Err(WalkError::Numeric(format!(
                                "amplitude left the line segment at site {s}"
                            )));
                        }
                        out[c * len + target as usize] = z;
                    }
                }
                Ok(Geometry::Line {
                    offset,
                    len,
                    a,
                    remaining: remaining - 1,
                })
            }
        }
    }

    /// Undo [`step`](Self::step) at time `t` on the cycle.
    pub fn step_back(&self, state: &PureState, t: usize) -> Result<PureState> {
        match state.geometry {
            Geometry::Cycle { n } if n == self.config.n => {
                let mut out = vec![ZERO; state.amplitudes.len()];
                self.cycle.apply_inverse_into(&state.amplitudes, &mut out, t);
                Ok(PureState {
                    amplitudes: out,
                    geometry: state.geometry,
                })
            }
            _ => Err(WalkError::Geometry("step_back acts on cycle states of the walk".into())),
        }
    }

    /// Steps `start .. start + steps`, calling `observe(t, state)` for t = start
    /// (before any step) and after each step.
    pub fn run<F>(&self, initial: &PureState, start: usize, steps: usize, mut observe: F) -> Result<PureState>
    where
        F: FnMut(usize, &PureState),
    {
        let mut cur = initial.clone();
        let mut next = vec![ZERO; cur.amplitudes.len()];
        observe(start, &cur);
        for t in start..start + steps {
            let geometry = self.step_into(&cur, &mut next, t)?;
            std::mem::swap(&mut cur.amplitudes, &mut next);
            cur.geometry = geometry;
            observe(t + 1, &cur);
        }
        Ok(cur)
    }
}

/// One step `U_t = S (C_t ⊗ 1)`.
pub fn step(state: &PureState, config: &WalkConfig, t: usize) -> Result<PureState> {
    Propagator::new(config)?.step(state, t)
}

/// `U_{t−1} ⋯ U_0 |ψ⟩`.
pub fn evolve(initial: &PureState, config: &WalkConfig, t: usize) -> Result<PureState> {
    Propagator::new(config)?.run(initial, 0, t, |_, _| {})
}

/// Evolve every member under the same unitary sequence; weights are unchanged.
pub fn evolve_ensemble(initial: &EnsembleState, config: &WalkConfig, t: usize) -> Result<EnsembleState> {
    let prop = Propagator::new(config)?;
    let members = initial
        .members
        .iter()
        .map(|(w, s)| prop.run(s, 0, t, |_, _| {}).map(|s| (*w, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleState { members })
}

/// Embed a cycle state in an open line segment wide enough that `t_max` steps
/// of moves −1, +1, +a never reach its ends.
pub fn line_embed(initial: &PureState, t_max: usize, a: usize) -> Result<PureState> {
    let n = match initial.geometry {
        Geometry::Cycle { n } => n,
        Geometry::Line { .. } => return Err(WalkError::Geometry("state is already on a line".into())),
    };
    let offset = t_max * a.max(1);
    let len = n + 2 * offset;
    let mut amplitudes = vec![ZERO; 3 * len];
    for c in 0..3 {
        for x in 0..n {
            amplitudes[c * len + offset + x] = initial.amplitudes[basis_index(c, x, n)];
        }
    }
    Ok(PureState {
        amplitudes,
        geometry: Geometry::Line {
            offset,
            len,
            a,
            remaining: t_max,
        },
    })
}

pub fn line_embed_ensemble(initial: &EnsembleState, t_max: usize, a: usize) -> Result<EnsembleState> {
    let members = initial
        .members
        .iter()
        .map(|(w, s)| line_embed(s, t_max, a).map(|s| (*w, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleState { members })
}
