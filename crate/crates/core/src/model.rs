//! Operators of the lively walk: shifts, coins and the composed walk unitary.
//!
//! Basis states `(c, x)` of the coin ⊗ position lattice are indexed coin-major,
//! `index = c·n + x`. Shifts are stored as permutations of these indices and
//! only materialized as dense matrices on request.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, WalkError};
use crate::linalg::{c64, coin_unitarity_defect, random_unitary, CoinMatrix, C64, ONE, ZERO};

/// Coin matrices must satisfy `max|C†C − I| < COIN_UNITARITY_TOL`.
pub const COIN_UNITARITY_TOL: f64 = 1e-10;

/// Coin-major index of basis state `(coin, position)` on a lattice of `n` positions.
#[inline]
pub fn basis_index(coin: usize, position: usize, n: usize) -> usize {
    coin * n + position
}

/// Greatest common divisor, with `gcd(0, n) = n`.
pub fn gcd(a: usize, n: usize) -> usize {
    let (mut x, mut y) = (a, n);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

/// The reflection `2|c₁⟩⟨c₁| − 1` about the uniform coin vector.
pub fn build_grover_coin() -> CoinMatrix {
    CoinMatrix::from_fn(|i, j| {
        if i == j {
            c64(-1.0 / 3.0, 0.0)
        } else {
            c64(2.0 / 3.0, 0.0)
        }
    })
}

/// How a coin schedule is extended past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchedulePolicy {
    /// Step `t` uses entry `t mod len`.
    #[default]
    Cycle,
    /// Steps past the end reuse the final entry.
    RepeatLast,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoinSpec {
    Grover,
    Identity,
    Custom(CoinMatrix),
    Schedule {
        coins: Vec<CoinMatrix>,
        policy: SchedulePolicy,
    },
}

impl CoinSpec {
    /// A schedule of `len` independent Haar-random coins drawn from a ChaCha8
    /// stream seeded with `seed`.
    pub fn seeded_schedule(seed: u64, len: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coins = (0..len.max(1)).map(|_| random_unitary(&mut rng)).collect();
        CoinSpec::Schedule {
            coins,
            policy: SchedulePolicy::Cycle,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |m: &CoinMatrix, what: &str| {
            let defect = coin_unitarity_defect(m);
            if defect < COIN_UNITARITY_TOL && defect.is_finite() {
                Ok(())
            } else {
                Err(WalkError::Validation(format!(
                    "{what} is not unitary: max|C†C − I| = {defect:.3e}"
                )))
            }
        };
        match self {
            CoinSpec::Grover | CoinSpec::Identity => Ok(()),
            CoinSpec::Custom(m) => check(m, "custom coin"),
            CoinSpec::Schedule { coins, .. } => {
                if coins.is_empty() {
                    return Err(WalkError::Validation("empty coin schedule".into()));
                }
                coins
                    .iter()
                    .enumerate()
                    .try_for_each(|(t, m)| check(m, &format!("scheduled coin {t}")))
            }
        }
    }

    /// True when every step uses the same coin.
    pub fn is_time_independent(&self) -> bool {
        match self {
            CoinSpec::Schedule { coins, .. } => coins.len() == 1,
            _ => true,
        }
    }

    /// Apply the coin of step `t` to every site of a coin-major buffer.
    pub(crate) fn apply(&self, t: usize, input: &[C64], out: &mut [C64], sites: usize) {
        match self {
            CoinSpec::Grover => apply_grover(input, out, sites),
            CoinSpec::Identity => out.copy_from_slice(input),
            _ => apply_coin(&self.coin_at(t), input, out, sites),
        }
    }

    /// Coin applied at step `t`.
    pub fn coin_at(&self, t: usize) -> CoinMatrix {
        match self {
            CoinSpec::Grover => build_grover_coin(),
            CoinSpec::Identity => CoinMatrix::identity(),
            CoinSpec::Custom(m) => *m,
            CoinSpec::Schedule { coins, policy } => match policy {
                SchedulePolicy::Cycle => coins[t % coins.len()],
                SchedulePolicy::RepeatLast => coins[t.min(coins.len() - 1)],
            },
        }
    }
}

/// Initial states used by the experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialStateSpec {
    /// `(|0⟩ + |1⟩ + |2⟩)/√3 ⊗ |x0⟩`.
    UniformCoin { x0: usize },
    /// `|coin⟩ ⊗ |x0⟩`.
    Basis { coin: usize, x0: usize },
    /// Equal mixture of the three coin basis states at `x0`.
    MixedCoin { x0: usize },
    /// Explicit coin-major amplitudes of length `3n`.
    Custom(Vec<C64>),
}

impl Default for InitialStateSpec {
    fn default() -> Self {
        InitialStateSpec::UniformCoin { x0: 0 }
    }
}

impl InitialStateSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        let check_x = |x0: usize| {
            if x0 < n {
                Ok(())
            } else {
                Err(WalkError::param(format!("initial position {x0} outside 0..{n}")))
            }
        };
        match self {
            InitialStateSpec::UniformCoin { x0 } | InitialStateSpec::MixedCoin { x0 } => check_x(*x0),
            InitialStateSpec::Basis { coin, x0 } => {
                if *coin > 2 {
                    return Err(WalkError::param(format!("coin index {coin} outside 0..3")));
                }
                check_x(*x0)
            }
            InitialStateSpec::Custom(amps) => {
                if amps.len() != 3 * n {
                    return Err(WalkError::param(format!(
                        "custom state has {} amplitudes, expected {}",
                        amps.len(),
                        3 * n
                    )));
                }
                let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(WalkError::Validation(format!("custom state has squared norm {norm}")));
                }
                Ok(())
            }
        }
    }
}

/// Full description of one walk experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub n: usize,
    pub a: usize,
    pub coin: CoinSpec,
    pub initial: InitialStateSpec,
    /// Node `b` such that the ring edge `(b, b+1 mod n)` is missing.
    pub broken_edge: Option<usize>,
}

impl WalkConfig {
    /// Grover-coin walk from the uniform coin state at position 0.
    pub fn new(n: usize, a: usize) -> Result<Self> {
        let cfg = WalkConfig {
            n,
            a,
            coin: CoinSpec::Grover,
            initial: InitialStateSpec::default(),
            broken_edge: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_coin(mut self, coin: CoinSpec) -> Self {
        self.coin = coin;
        self
    }

    pub fn with_initial(mut self, initial: InitialStateSpec) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_broken_edge(mut self, edge: Option<usize>) -> Self {
        self.broken_edge = edge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_na(self.n, self.a)?;
        if let Some(b) = self.broken_edge {
            check_edge(self.n, b)?;
        }
        self.coin.validate()?;
        self.initial.validate(self.n)
    }
}

fn check_na(n: usize, a: usize) -> Result<()> {
    if n < 2 {
        return Err(WalkError::param(format!("cycle size n = {n} must be at least 2")));
    }
    if a >= n {
        return Err(WalkError::param(format!("liveliness a = {a} outside 0..{n}")));
    }
    Ok(())
}

fn check_edge(n: usize, b: usize) -> Result<()> {
    if b >= n {
        return Err(WalkError::param(format!("broken edge index {b} outside 0..{n}")));
    }
    Ok(())
}

/// A bijection of basis indices: `images[i]` is where index `i` is sent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &j in &images {
            if j >= images.len() || std::mem::replace(&mut seen[j], true) {
                return Err(WalkError::Numeric("map is not a permutation".into()));
            }
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `out[π(i)] = input[i]`.
    pub fn apply_into(&self, input: &[C64], out: &mut [C64]) {
        for (i, &j) in self.images.iter().enumerate() {
            out[j] = input[i];
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let d = self.images.len();
        let mut m = DMatrix::from_element(d, d, ZERO);
        for (i, &j) in self.images.iter().enumerate() {
            m[(j, i)] = ONE;
        }
        m
    }
}

/// Displacement of coin direction `c`: −1, +1 and +a.
fn displacement(c: usize, a: usize, n: usize) -> usize {
    match c {
        0 => n - 1,
        1 => 1,
        _ => a,
    }
}

/// The intact lively shift on a cycle of `n` nodes with jump length `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LivelyShift {
    pub n: usize,
    pub a: usize,
    perm: Permutation,
}

impl LivelyShift {
    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// `(c, x) ↦ (c, x')`.
    pub fn map(&self, coin: usize, x: usize) -> (usize, usize) {
        let j = self.perm.image(basis_index(coin, x, self.n));
        (j / self.n, j % self.n)
    }
}

pub fn build_shift(n: usize, a: usize) -> Result<LivelyShift> {
    check_na(n, a)?;
    let mut images = vec![0; 3 * n];
    for c in 0..3 {
        let d = displacement(c, a, n);
        for x in 0..n {
            images[basis_index(c, x, n)] = basis_index(c, (x + d) % n, n);
        }
    }
    Ok(LivelyShift {
        n,
        a,
        perm: Permutation::from_images(images)?,
    })
}

/// Lively shift with the ring edge `(b, b+1 mod n)` removed.
///
/// The ±1 moves that would cross the missing edge leave the walker in place and
/// swap coin directions 0 and 1. Jump moves are chords and are unaffected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrokenShift {
    pub n: usize,
    pub a: usize,
    pub edge: usize,
    perm: Permutation,
}

impl BrokenShift {
    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn map(&self, coin: usize, x: usize) -> (usize, usize) {
        let j = self.perm.image(basis_index(coin, x, self.n));
        (j / self.n, j % self.n)
    }
}

pub fn build_broken_shift(n: usize, a: usize, b: usize) -> Result<BrokenShift> {
    let intact = build_shift(n, a)?;
    check_edge(n, b)?;
    let mut images = intact.perm.images;
    let right = (b + 1) % n;
    images[basis_index(0, right, n)] = basis_index(1, right, n);
    images[basis_index(1, b, n)] = basis_index(0, b, n);
    Ok(BrokenShift {
        n,
        a,
        edge: b,
        perm: Permutation::from_images(images)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shift {
    Lively(LivelyShift),
    Broken(BrokenShift),
}

impl Shift {
    pub fn permutation(&self) -> &Permutation {
        match self {
            Shift::Lively(s) => &s.perm,
            Shift::Broken(s) => &s.perm,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Shift::Lively(s) => s.n,
            Shift::Broken(s) => s.n,
        }
    }

    pub fn is_broken(&self) -> bool {
        matches!(self, Shift::Broken(_))
    }
}

/// `U_t = S (C_t ⊗ 1)`, with the dense matrix built lazily for time-independent coins.
#[derive(Debug)]
pub struct WalkOperator {
    shift: Shift,
    coin: CoinSpec,
    inverse: Permutation,
    dense: OnceLock<DMatrix<C64>>,
}

pub fn build_walk_operator(config: &WalkConfig) -> Result<WalkOperator> {
    check_na(config.n, config.a)?;
    config.coin.validate()?;
    let shift = match config.broken_edge {
        Some(b) => Shift::Broken(build_broken_shift(config.n, config.a, b)?),
        None => Shift::Lively(build_shift(config.n, config.a)?),
    };
    Ok(WalkOperator::new(shift, config.coin.clone()))
}

impl WalkOperator {
    pub fn new(shift: Shift, coin: CoinSpec) -> Self {
        let inverse = shift.permutation().inverse();
        WalkOperator {
            shift,
            coin,
            inverse,
            dense: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.shift.n()
    }

    pub fn dim(&self) -> usize {
        3 * self.n()
    }

    pub fn shift(&self) -> &Shift {
        &self.shift
    }

    pub fn coin(&self) -> &CoinSpec {
        &self.coin
    }

    /// One step at time `t`: coin on every position, then the shift.
    pub fn apply_into(&self, input: &[C64], out: &mut [C64], t: usize) {
        let n = self.n();
        let mut mixed = vec![ZERO; 3 * n];
        self.coin.apply(t, input, &mut mixed, n);
        self.shift.permutation().apply_into(&mixed, out);
    }

    /// Inverse of [`apply_into`](Self::apply_into) for the same `t`.
    pub fn apply_inverse_into(&self, input: &[C64], out: &mut [C64], t: usize) {
        let n = self.n();
        let coin = self.coin.coin_at(t).adjoint();
        let mut unshifted = vec![ZERO; 3 * n];
        self.inverse.apply_into(input, &mut unshifted);
        apply_coin(&coin, &unshifted, out, n);
    }

    /// Dense `3n × 3n` matrix of the step at time `t`.
    pub fn dense_at(&self, t: usize) -> DMatrix<C64> {
        let n = self.n();
        let d = 3 * n;
        let coin = self.coin.coin_at(t);
        let perm = self.shift.permutation();
        let mut u = DMatrix::from_element(d, d, ZERO);
        // column (c, x) of U is Σ_c' C[c', c] S|c', x⟩
        for c in 0..3 {
            for x in 0..n {
                let col = basis_index(c, x, n);
                for cp in 0..3 {
                    u[(perm.image(basis_index(cp, x, n)), col)] += coin[(cp, c)];
                }
            }
        }
        u
    }

    /// Dense matrix of the time-independent walk, cached after the first call.
    pub fn dense(&self) -> Result<&DMatrix<C64>> {
        if !self.coin.is_time_independent() {
            return Err(WalkError::param(
                "dense walk operator requested for a time-dependent coin schedule",
            ));
        }
        Ok(self.dense.get_or_init(|| self.dense_at(0)))
    }
}

/// Grover reflection as `2·mean − v`. Rounded entries of the dense matrix
/// would shrink the norm systematically over long runs.
fn apply_grover(input: &[C64], out: &mut [C64], sites: usize) {
    for x in 0..sites {
        let v = [input[x], input[sites + x], input[2 * sites + x]];
        let m = (v[0] + v[1] + v[2]) * 2.0 / 3.0;
        for c in 0..3 {
            out[c * sites + x] = m - v[c];
        }
    }
}

/// `out(c, x) = Σ_c' coin[c, c'] input(c', x)`.
pub(crate) fn apply_coin(coin: &CoinMatrix, input: &[C64], out: &mut [C64], sites: usize) {
    for x in 0..sites {
        let v = [input[x], input[sites + x], input[2 * sites + x]];
        for c in 0..3 {
            out[c * sites + x] = coin[(c, 0)] * v[0] + coin[(c, 1)] * v[1] + coin[(c, 2)] * v[2];
        }
    }
}
