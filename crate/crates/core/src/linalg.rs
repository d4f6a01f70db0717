//! Small linear-algebra layer: complex scalar aliases, unitarity checks,
//! seeded random unitaries and an eigensolver for unitary matrices.
//!
//! The eigensolver never runs a general (non-normal) eigenvalue algorithm.
//! A unitary `U` is normal, so its Hermitian part `(U + U†)/2` shares its
//! eigenvectors. Eigenspaces of the Hermitian part mix the conjugate phases
//! `e^{±iθ}`; each such group is then split by diagonalizing the
//! anti-Hermitian part `(U − U†)/2i` restricted to the group. Both steps are
//! Hermitian, so the returned eigenvectors are orthonormal to rounding even
//! inside degenerate eigenspaces.

use std::f64::consts::TAU;

use nalgebra::{Complex, DMatrix, DVector, Matrix3, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, WalkError};

pub type C64 = Complex<f64>;

/// A 3×3 complex coin operator.
pub type CoinMatrix = Matrix3<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Eigenvalues of the Hermitian part closer than this are treated as one group
/// before the anti-Hermitian split.
const HERMITIAN_GROUP_TOL: f64 = 1e-9;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Max absolute entry of `M†M − I`.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let prod = m.adjoint() * m;
    max_identity_deviation(&prod)
}

pub fn coin_unitarity_defect(m: &CoinMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

fn max_identity_deviation(prod: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..prod.ncols() {
        for i in 0..prod.nrows() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Argument of `z` mapped into `[0, 2π)`. Values within rounding of `2π` map to 0.
pub fn phase_of(z: C64) -> f64 {
    let theta = z.im.atan2(z.re).rem_euclid(TAU);
    if theta >= TAU - 1e-14 {
        0.0
    } else {
        theta
    }
}

/// Shortest distance between two angles on the circle.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Haar-distributed 3×3 unitary: a complex Gaussian matrix orthonormalized
/// column by column (modified Gram–Schmidt), with the phases of the implied
/// R diagonal fixed to be positive.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> CoinMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CoinMatrix::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * scale, im * scale)
    });
    for j in 0..3 {
        for k in 0..j {
            let proj: C64 = (0..3).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..3 {
                let v = m[(i, k)];
                m[(i, j)] -= proj * v;
            }
        }
        let norm = (0..3).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..3 {
            m[(i, j)] /= norm;
        }
    }
    m
}

/// Eigenpairs of a unitary matrix. Column `i` of `vectors` belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub values: Vec<C64>,
    pub vectors: DMatrix<C64>,
}

fn hermitian_eigen(m: DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let dim = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 10_000 * dim.max(1))
        .ok_or_else(|| WalkError::Numeric(format!("Hermitian eigensolver did not converge (dim {dim})")))?;
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Diagonalize a unitary matrix. The input is not checked for unitarity; use
/// [`unitarity_defect`] first when the source is untrusted.
pub fn unitary_eigen(u: &DMatrix<C64>) -> Result<UnitaryEigen> {
    let dim = u.nrows();
    if dim != u.ncols() {
        return Err(WalkError::param("unitary_eigen needs a square matrix"));
    }
    let adj = u.adjoint();
    let half = c64(0.5, 0.0);
    let herm = (u + &adj) * half;
    let (cosines, basis) = hermitian_eigen(herm)?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| cosines[i].total_cmp(&cosines[j]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(g) if cosines[idx] - cosines[*g.last().unwrap()] <= HERMITIAN_GROUP_TOL => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }

    let mut values = Vec::with_capacity(dim);
    let mut vectors = DMatrix::<C64>::zeros(dim, dim);
    let mut col = 0;
    for group in groups {
        let m = group.len();
        let w = DMatrix::from_fn(dim, m, |r, c| basis[(r, group[c])]);
        let uw = u * &w;
        let block = w.adjoint() * &uw;
        if m == 1 {
            values.push(block[(0, 0)]);
            vectors.set_column(col, &w.column(0));
            col += 1;
            continue;
        }
        // (B − B†)/2i is Hermitian with eigenvalues sin θ.
        let anti = (&block - block.adjoint()) * c64(0.0, -0.5);
        let (_, rot) = hermitian_eigen(anti)?;
        let refined = &w * &rot;
        for c in 0..m {
            let v: DVector<C64> = refined.column(c).into_owned();
            let lambda = v.dotc(&(u * &v));
            values.push(lambda);
            vectors.set_column(col, &v);
            col += 1;
        }
    }
    Ok(UnitaryEigen { values, vectors })
}
