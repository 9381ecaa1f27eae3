//! Random states, unitaries and orthogonal matrices for sampling and tests.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, RMatrix};
use crate::states::{DensityMatrix, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-distributed pure state.
pub fn haar_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let n: usize = dims.iter().product();
    let v = CVector::from_fn(n, |_, _| c(gaussian(rng), gaussian(rng)));
    PureState::normalized(v, dims.to_vec())
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Haar-distributed real orthogonal matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let qr = RMatrix::from_fn(n, n, |_, _| gaussian(rng)).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// Uniform point on the probability simplex of size `n`.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// `Σ_{k<r} √λ_k U|k⟩ ⊗ V|k⟩` with uniform `λ` and Haar local unitaries.
pub fn random_schmidt_rank_state<R: Rng + ?Sized>(da: usize, db: usize, r: usize, rng: &mut R) -> Result<PureState> {
    if r == 0 || r > da.min(db) {
        return Err(Error::InvalidRank { rank: r, dim: da.min(db) });
    }
    let lambda = random_simplex(r, rng);
    let u = haar_unitary(da, rng);
    let v = haar_unitary(db, rng);
    let mut psi = CVector::zeros(da * db);
    for (k, l) in lambda.iter().enumerate() {
        let s = l.sqrt();
        for i in 0..da {
            for j in 0..db {
                psi[i * db + j] += u[(i, k)] * v[(j, k)] * s;
            }
        }
    }
    PureState::normalized(psi, vec![da, db])
}

/// `G G† / tr(G G†)` for a `n × rank` Ginibre matrix `G`.
pub fn random_mixed_state<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let n: usize = dims.iter().product();
    if rank == 0 || rank > n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    let g = ginibre(n, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr), dims.to_vec())
}

/// Mixture of `terms` random pure states of Schmidt rank at most `r`; its Schmidt number is at most `r`.
pub fn random_bounded_schmidt_mixture<R: Rng + ?Sized>(d: usize, r: usize, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    let weights = random_simplex(terms.max(1), rng);
    let mut m = CMatrix::zeros(d * d, d * d);
    for w in weights {
        let rank = rng.gen_range(1..=r);
        let psi = random_schmidt_rank_state(d, d, rank, rng)?;
        m += psi.to_density().matrix().scale(w);
    }
    DensityMatrix::new(m, vec![d, d])
}

/// The basis recombined by a Haar-random orthogonal matrix.
pub fn random_basis_rotation<R: Rng + ?Sized>(basis: &BasisSet, rng: &mut R) -> Result<BasisSet> {
    basis.recombine(&random_orthogonal(basis.len(), rng))
}
