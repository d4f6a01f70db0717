//! Spectral decomposition of the walk unitary and the time-averaged
//! distribution it implies.
//!
//! An intact walk commutes with translations, so in the momentum basis
//! `|φ_k⟩ = n^{-1/2} Σ_x e^{−ikx}|x⟩`, `k = 2πl/n`, it splits into 3×3 blocks
//! `diag(e^{−ik}, e^{ik}, e^{ika}) · C`. Broken-link walks have no such
//! symmetry and are diagonalized densely.
//!
//! The limiting distribution keeps the cross terms between eigenvectors that
//! share an eigenvalue, so eigenphases are clustered first and `|ψ0⟩` is
//! projected onto each cluster's eigenspace.

use std::f64::consts::TAU;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Result, WalkError};
use crate::evolution::{position_weights, Distribution, Geometry, PreparedState, PureState};
use crate::linalg::{phase_of, unitary_eigen, CoinMatrix, C64, ZERO};
use crate::model::{basis_index, build_walk_operator, WalkConfig};

/// Default angular tolerance for treating two eigenphases as equal.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-8;
/// A cluster wider than this multiple of the grouping tolerance is rejected.
pub const DIAMETER_FACTOR: f64 = 10.0;

/// The walk restricted to momentum sector `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBlock {
    pub l: usize,
    /// `k = 2πl/n`.
    pub k: f64,
    pub a: usize,
    pub matrix: CoinMatrix,
}

impl FourierBlock {
    pub fn determinant(&self) -> C64 {
        self.matrix.determinant()
    }
}

/// Grover-coin block for sector `l`.
pub fn fourier_block(n: usize, a: usize, l: usize) -> Result<FourierBlock> {
    fourier_block_with_coin(n, a, l, &crate::model::build_grover_coin())
}

pub fn fourier_block_with_coin(n: usize, a: usize, l: usize, coin: &CoinMatrix) -> Result<FourierBlock> {
    if l >= n {
        return Err(WalkError::param(format!("momentum index l = {l} outside 0..{n}")));
    }
    let k = TAU * l as f64 / n as f64;
    // k·a reduced mod n before scaling so large a·l stays exact
    let ka = TAU * ((l * a) % n) as f64 / n as f64;
    let phases = [
        C64::from_polar(1.0, -k),
        C64::from_polar(1.0, k),
        C64::from_polar(1.0, ka),
    ];
    let matrix = CoinMatrix::from_fn(|i, j| phases[i] * coin[(i, j)]);
    Ok(FourierBlock { l, k, a, matrix })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEigenpair {
    pub value: C64,
    /// Eigenphase in `[0, 2π)`.
    pub phase: f64,
    pub vector: Vector3<C64>,
}

/// Eigenpairs of a block, ordered by eigenphase.
pub fn block_eigensystem(block: &FourierBlock) -> Result<Vec<BlockEigenpair>> {
    let m = DMatrix::from_fn(3, 3, |i, j| block.matrix[(i, j)]);
    let eig = unitary_eigen(&m)?;
    let mut pairs: Vec<BlockEigenpair> = (0..3)
        .map(|i| {
            let v = eig.vectors.column(i);
            BlockEigenpair {
                value: eig.values[i],
                phase: phase_of(eig.values[i]),
                vector: Vector3::new(v[0], v[1], v[2]),
            }
        })
        .collect();
    pairs.sort_by(|p, q| p.phase.total_cmp(&q.phase));
    Ok(pairs)
}

/// Closed-form Grover block eigenvalues for sectors with `e^{ika} = 1`,
/// as functions of `ω = e^{ik}`: `1` and
/// `−(ω² + 4ω ± (ω−1)√(ω(ω+10)+1) + 1)/(6ω)` with the principal square root.
pub fn closed_form_eigenvalues(omega: C64) -> Result<[C64; 3]> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(WalkError::param(format!("|ω| = {} is not 1", omega.norm())));
    }
    let one = C64::new(1.0, 0.0);
    let root = (omega * (omega + C64::new(10.0, 0.0)) + one).sqrt();
    let base = omega * omega + omega * 4.0 + one;
    let tail = (omega - one) * root;
    let denom = omega * 6.0;
    Ok([one, -(base + tail) / denom, -(base - tail) / denom])
}

/// Normalized momentum vector `n^{-1/2} Σ_x e^{−ikx}|x⟩`.
pub fn fourier_vector(n: usize, l: usize) -> DVector<C64> {
    let scale = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |x, _| C64::from_polar(scale, -TAU * ((l * x) % n) as f64 / n as f64))
}

/// Where a decomposition came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    FourierAssembled,
    DenseDiagonalized,
}

/// Which route [`full_spectrum_with`] should take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumMethod {
    /// Fourier assembly for intact walks, dense otherwise.
    #[default]
    Auto,
    Fourier,
    Dense,
}

/// A group of eigenvectors sharing one eigenphase.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub phase: f64,
    /// Columns of [`SpectralDecomposition::vectors`] in this cluster.
    pub members: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub source: SpectrumSource,
    pub n: usize,
    /// Orthonormal eigenvectors as columns, cluster by cluster.
    pub vectors: DMatrix<C64>,
    pub eigenvalues: Vec<C64>,
    /// Per-column `(l, j)` sector labels; present for Fourier assembly.
    pub labels: Option<Vec<(usize, usize)>>,
    pub clusters: Vec<EigenCluster>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| phase_of(*z)).collect()
    }

    /// All eigenphases sorted ascending.
    pub fn sorted_phases(&self) -> Vec<f64> {
        let mut p = self.phases();
        p.sort_by(f64::total_cmp);
        p
    }

    pub fn vector(&self, i: usize) -> DVector<C64> {
        self.vectors.column(i).into_owned()
    }

    pub fn cluster_of(&self, col: usize) -> usize {
        self.clusters
            .iter()
            .position(|c| c.members.contains(&col))
            .expect("column belongs to a cluster")
    }

    /// Max absolute entry of `V†V − I`.
    pub fn orthonormality_defect(&self) -> f64 {
        crate::linalg::unitarity_defect(&self.vectors)
    }

    /// Time-averaged position distribution of `initial`.
    pub fn limiting_distribution(&self, initial: &PureState) -> Result<Distribution> {
        let n = self.n;
        if initial.geometry() != (Geometry::Cycle { n }) {
            return Err(WalkError::Geometry(format!(
                "initial state must live on the cycle of {n} nodes"
            )));
        }
        let dim = 3 * n;
        let psi = DVector::from_column_slice(initial.amplitudes());
        let coeffs = self.vectors.ad_mul(&psi);
        let mut pi = vec![0.0; n];
        let mut projected = vec![ZERO; dim];
        for cluster in &self.clusters {
            projected.iter_mut().for_each(|z| *z = ZERO);
            for col in cluster.members.clone() {
                let a = coeffs[col];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for (p, v) in projected.iter_mut().zip(self.vectors.column(col).iter()) {
                    *p += a * v;
                }
            }
            for (acc, w) in pi.iter_mut().zip(position_weights(&projected, n)) {
                *acc += w;
            }
        }
        Distribution::from_probabilities(pi)
    }
}

/// Cluster eigenphases: sort, join neighbours closer than `tol` (also across
/// the 0/2π seam), and reject clusters whose diameter exceeds
/// `DIAMETER_FACTOR · tol`. Returns groups of input indices in phase order.
pub fn group_phases(phases: &[f64], tol: f64) -> Result<Vec<Vec<usize>>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(WalkError::param("grouping tolerance must be positive"));
    }
    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&i, &j| phases[i].total_cmp(&phases[j]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(g) if phases[idx] - phases[*g.last().unwrap()] <= tol => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    if groups.len() > 1 {
        let first = phases[groups[0][0]];
        let last = phases[*groups.last().unwrap().last().unwrap()];
        if first + TAU - last <= tol {
            let tail = groups.pop().unwrap();
            groups[0].splice(0..0, tail);
        }
    }
    let limit = DIAMETER_FACTOR * tol;
    for g in &groups {
        let lo = phases[g[0]];
        let hi = phases[*g.last().unwrap()];
        let diameter = if hi >= lo { hi - lo } else { hi + TAU - lo };
        if diameter > limit {
            return Err(WalkError::Grouping {
                phase: circular_mean(g.iter().map(|&i| phases[i])),
                diameter,
                limit,
                size: g.len(),
            });
        }
    }
    Ok(groups)
}

fn circular_mean(phases: impl Iterator<Item = f64>) -> f64 {
    let s: C64 = phases.map(|p| C64::from_polar(1.0, p)).sum();
    phase_of(s)
}

fn static_coin(config: &WalkConfig) -> Result<CoinMatrix> {
    if config.coin.is_time_independent() {
        Ok(config.coin.coin_at(0))
    } else {
        Err(WalkError::param("spectral analysis needs a time-independent coin"))
    }
}

pub fn full_spectrum(config: &WalkConfig, grouping_tol: f64) -> Result<SpectralDecomposition> {
    full_spectrum_with(config, grouping_tol, SpectrumMethod::Auto)
}

pub fn full_spectrum_with(
    config: &WalkConfig,
    grouping_tol: f64,
    method: SpectrumMethod,
) -> Result<SpectralDecomposition> {
    config.validate()?;
    let coin = static_coin(config)?;
    let broken = config.broken_edge.is_some();
    match method {
        SpectrumMethod::Fourier if broken => Err(WalkError::param(
            "broken-link walks have no translation symmetry; use dense diagonalization",
        )),
        SpectrumMethod::Dense => dense_spectrum(config, grouping_tol),
        SpectrumMethod::Auto if broken => dense_spectrum(config, grouping_tol),
        _ => fourier_spectrum(config.n, config.a, &coin, grouping_tol),
    }
}

fn fourier_spectrum(n: usize, a: usize, coin: &CoinMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let dim = 3 * n;
    let mut values = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    let mut block_vectors = Vec::with_capacity(dim);
    for l in 0..n {
        let block = fourier_block_with_coin(n, a, l, coin)?;
        for (j, pair) in block_eigensystem(&block)?.into_iter().enumerate() {
            values.push(pair.value);
            labels.push((l, j));
            block_vectors.push(pair.vector);
        }
    }
    let phases: Vec<f64> = values.iter().map(|z| phase_of(*z)).collect();
    let groups = group_phases(&phases, tol)?;

    let mut vectors = DMatrix::from_element(dim, dim, ZERO);
    let mut out_values = Vec::with_capacity(dim);
    let mut out_labels = Vec::with_capacity(dim);
    let mut clusters = Vec::with_capacity(groups.len());
    let mut col = 0;
    for g in groups {
        let start = col;
        for &i in &g {
            let (l, _) = labels[i];
            let phi = fourier_vector(n, l);
            let v = &block_vectors[i];
            for c in 0..3 {
                for x in 0..n {
                    vectors[(basis_index(c, x, n), col)] = v[c] * phi[x];
                }
            }
            out_values.push(values[i]);
            out_labels.push(labels[i]);
            col += 1;
        }
        clusters.push(EigenCluster {
            phase: circular_mean(g.iter().map(|&i| phases[i])),
            members: start..col,
        });
    }
    Ok(SpectralDecomposition {
        source: SpectrumSource::FourierAssembled,
        n,
        vectors,
        eigenvalues: out_values,
        labels: Some(out_labels),
        clusters,
    })
}

fn dense_spectrum(config: &WalkConfig, tol: f64) -> Result<SpectralDecomposition> {
    let n = config.n;
    let dim = 3 * n;
    let op = build_walk_operator(config)?;
    let u = op.dense()?;
    let eig = unitary_eigen(u)?;
    let phases: Vec<f64> = eig.values.iter().map(|z| phase_of(*z)).collect();
    let groups = group_phases(&phases, tol)?;
    let mut vectors = DMatrix::from_element(dim, dim, ZERO);
    let mut values = Vec::with_capacity(dim);
    let mut clusters = Vec::with_capacity(groups.len());
    let mut col = 0;
    for g in groups {
        let start = col;
        for &i in &g {
            vectors.set_column(col, &eig.vectors.column(i));
            values.push(eig.values[i]);
            col += 1;
        }
        clusters.push(EigenCluster {
            phase: circular_mean(g.iter().map(|&i| phases[i])),
            members: start..col,
        });
    }
    Ok(SpectralDecomposition {
        source: SpectrumSource::DenseDiagonalized,
        n,
        vectors,
        eigenvalues: values,
        labels: None,
        clusters,
    })
}

/// Limiting distribution of `config` started from `initial`, using the
/// default grouping tolerance and automatic source choice.
pub fn limiting_distribution_spectral(config: &WalkConfig, initial: &PureState) -> Result<Distribution> {
    full_spectrum(config, DEFAULT_GROUPING_TOL)?.limiting_distribution(initial)
}

/// Limiting distribution for a pure or mixed initial state; mixtures average
/// their members' limits.
pub fn limiting_distribution_prepared(
    decomposition: &SpectralDecomposition,
    initial: &PreparedState,
) -> Result<Distribution> {
    match initial {
        PreparedState::Pure(s) => decomposition.limiting_distribution(s),
        PreparedState::Mixed(e) => {
            let mut acc = vec![0.0; decomposition.n];
            for (w, s) in e.members() {
                let d = decomposition.limiting_distribution(s)?;
                for (a, p) in acc.iter_mut().zip(d.probabilities()) {
                    *a += w * p;
                }
            }
            Distribution::from_probabilities(acc)
        }
    }
}

/// True when `e^{ika} = 1` for sector `l`, i.e. `n | l·a`.
pub fn is_degenerate_sector(n: usize, a: usize, l: usize) -> bool {
    (l * a).is_multiple_of(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::model::CoinSpec;

    #[test]
    fn l_zero_block_is_grover() {
        let b = fourier_block(5, 2, 0).unwrap();
        assert!((b.matrix - crate::model::build_grover_coin()).norm() < 1e-15);
        let e = block_eigensystem(&b).unwrap();
        assert!((e[0].value - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((e[1].value + c64(1.0, 0.0)).norm() < 1e-12);
        assert!((e[2].value + c64(1.0, 0.0)).norm() < 1e-12);
        assert!(e.windows(2).all(|w| w[0].phase <= w[1].phase));
    }

    #[test]
    fn block_out_of_range() {
        assert!(fourier_block(5, 2, 5).is_err());
    }

    #[test]
    fn closed_form_at_one() {
        let v = closed_form_eigenvalues(c64(1.0, 0.0)).unwrap();
        assert!((v[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((v[1] + c64(1.0, 0.0)).norm() < 1e-12);
        assert!((v[2] + c64(1.0, 0.0)).norm() < 1e-12);
        assert!(closed_form_eigenvalues(c64(1.1, 0.0)).is_err());
    }

    #[test]
    fn grouping_wraps_seam() {
        let g = group_phases(&[TAU - 1e-9, 1.0, 1e-9, 3.0], 1e-8).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].len(), 2);
    }

    #[test]
    fn grouping_diameter_guard() {
        let phases: Vec<f64> = (0..20).map(|i| 1.0 + i as f64 * 0.9e-8).collect();
        let err = group_phases(&phases, 1e-8).unwrap_err();
        assert!(matches!(err, WalkError::Grouping { size: 20, .. }));
    }

    #[test]
    fn fourier_vector_unit_norm() {
        for l in 0..7 {
            assert!((fourier_vector(7, l).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_rejected_for_spectrum() {
        let cfg = WalkConfig::new(5, 2)
            .unwrap()
            .with_coin(CoinSpec::seeded_schedule(1, 3));
        assert!(full_spectrum(&cfg, DEFAULT_GROUPING_TOL).is_err());
    }

    #[test]
    fn broken_requires_dense() {
        let cfg = WalkConfig::new(7, 2).unwrap().with_broken_edge(Some(3));
        assert!(full_spectrum_with(&cfg, 1e-8, SpectrumMethod::Fourier).is_err());
        let s = full_spectrum(&cfg, 1e-8).unwrap();
        assert_eq!(s.source, SpectrumSource::DenseDiagonalized);
        assert!(s.labels.is_none());
    }
}
