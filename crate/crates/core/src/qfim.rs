//! Quantum Fisher information for unitary encodings `exp(−i Σ θ_k H_k)`.
//!
//! Everything is evaluated in the eigenbasis of the state. Only eigenvectors
//! with non-negligible weight are kept, so the cost scales with the rank.

use rayon::prelude::*;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, RMatrix};
use crate::states::{DensityMatrix, PureState};

/// Hermiticity tolerance for generators.
pub const OP_HERMITIAN_TOL: f64 = 1e-10;
/// Pairs with `λ_l + λ_m ≤ SUPPORT_CUTOFF · tr ρ` do not contribute.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

fn check_ops(dim: usize, ops: &[CMatrix]) -> Result<()> {
    for op in ops {
        linalg::ensure_hermitian(op, OP_HERMITIAN_TOL)?;
        if op.nrows() != dim {
            return Err(Error::InvalidArgument(format!(
                "operator of dimension {} for a state of dimension {dim}",
                op.nrows()
            )));
        }
    }
    Ok(())
}

/// Eigenvalues clamped at zero and eigenvectors of a density matrix.
struct Spectrum {
    values: Vec<f64>,
    vectors: CMatrix,
    /// indices with `λ > ε/2`
    support: Vec<usize>,
    eps: f64,
}

impl Spectrum {
    fn of(rho: &CMatrix) -> Self {
        let (mut values, vectors) = linalg::eigh(rho);
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        let tr: f64 = values.iter().sum();
        let eps = SUPPORT_CUTOFF * tr;
        let support = (0..values.len()).filter(|&l| values[l] > eps / 2.0).collect();
        Self { values, vectors, support, eps }
    }

    fn support_vectors(&self) -> CMatrix {
        CMatrix::from_fn(self.vectors.nrows(), self.support.len(), |i, k| self.vectors[(i, self.support[k])])
    }
}

/// `F_jk = Σ_{l,m} 2(λ_l − λ_m)²/(λ_l + λ_m) Re(⟨l|H_j|m⟩⟨m|H_k|l⟩)`.
pub fn qfim(rho: &DensityMatrix, ops: &[CMatrix]) -> Result<RMatrix> {
    check_ops(rho.dim(), ops)?;
    Ok(qfim_unchecked(rho.matrix(), ops))
}

pub(crate) fn qfim_unchecked(rho: &CMatrix, ops: &[CMatrix]) -> RMatrix {
    let spectrum = Spectrum::of(rho);
    let n = rho.nrows();
    let vs = spectrum.support_vectors();
    let in_support: Vec<bool> = {
        let mut flags = vec![false; n];
        spectrum.support.iter().for_each(|&l| flags[l] = true);
        flags
    };
    // weights for (l over all, m over support); l outside the support counts twice
    let mut weights = Vec::with_capacity(n * spectrum.support.len());
    for (k, &m) in spectrum.support.iter().enumerate() {
        for l in 0..n {
            let (a, b) = (spectrum.values[l], spectrum.values[m]);
            let w = if a + b > spectrum.eps { 2.0 * (a - b).powi(2) / (a + b) } else { 0.0 };
            let factor = if in_support[l] { 1.0 } else { 2.0 };
            weights.push((l, k, (factor * w).sqrt()));
        }
    }
    let weights: Vec<_> = weights.into_iter().filter(|&(_, _, w)| w > 0.0).collect();
    let v_adj = spectrum.vectors.adjoint();
    let rows: Vec<Vec<f64>> = ops
        .par_iter()
        .map(|h| {
            let b = &v_adj * (h * &vs);
            let mut row = Vec::with_capacity(2 * weights.len());
            for &(l, k, w) in &weights {
                let z = b[(l, k)] * w;
                row.push(z.re);
                row.push(z.im);
            }
            row
        })
        .collect();
    gram_of_rows(&rows)
}

fn gram_of_rows(rows: &[Vec<f64>]) -> RMatrix {
    let k = rows.len();
    let len = rows.first().map_or(0, Vec::len);
    let c = RMatrix::from_fn(k, len, |i, j| rows[i][j]);
    let g = &c * c.transpose();
    (&g + g.transpose()) * 0.5
}

/// Single-generator QFI.
pub fn qfi(rho: &DensityMatrix, h: &CMatrix) -> Result<f64> {
    Ok(qfim(rho, std::slice::from_ref(h))?[(0, 0)].max(0.0))
}

/// Symmetrized covariance `Γ_jk = ½⟨{g_j, g_k}⟩ − ⟨g_j⟩⟨g_k⟩`.
pub fn covariance_matrix(rho: &DensityMatrix, ops: &[CMatrix]) -> Result<RMatrix> {
    check_ops(rho.dim(), ops)?;
    let spectrum = Spectrum::of(rho.matrix());
    let vs = spectrum.support_vectors();
    let sqrt_l: Vec<f64> = spectrum.support.iter().map(|&l| spectrum.values[l].sqrt()).collect();
    let half = CMatrix::from_fn(vs.nrows(), vs.ncols(), |i, k| vs[(i, k)] * sqrt_l[k]);
    let data: Vec<(Vec<f64>, f64)> = ops
        .par_iter()
        .map(|g| {
            let y = g * &half;
            let mean = linalg::hs_inner(&half, &y).re;
            let flat = y.iter().flat_map(|z| [z.re, z.im]).collect();
            (flat, mean)
        })
        .collect();
    let rows: Vec<Vec<f64>> = data.iter().map(|(r, _)| r.clone()).collect();
    let mut gamma = gram_of_rows(&rows);
    for j in 0..ops.len() {
        for k in 0..ops.len() {
            gamma[(j, k)] -= data[j].1 * data[k].1;
        }
    }
    Ok(gamma)
}

/// `4 Γ` evaluated directly on the state vector.
pub fn qfim_pure(psi: &PureState, ops: &[CMatrix]) -> Result<RMatrix> {
    check_ops(psi.dim(), ops)?;
    let v = psi.amplitudes();
    let applied: Vec<CVector> = ops.par_iter().map(|g| g * v).collect();
    let means: Vec<f64> = applied.iter().map(|gv| v.dotc(gv).re).collect();
    let k = ops.len();
    Ok(RMatrix::from_fn(k, k, |a, b| {
        4.0 * (applied[a].dotc(&applied[b]).re - means[a] * means[b])
    }))
}

/// Sum of singular values.
pub fn trace_norm(m: &RMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().sum()
}

/// QFIM over `{g^a_k ⊗ 𝟙} ∪ {𝟙 ⊗ g^b_l}` split into its blocks.
#[derive(Debug, Clone)]
pub struct QfimBlocks {
    pub f_a: RMatrix,
    pub f_b: RMatrix,
    pub x: RMatrix,
    pub basis_a: BasisSet,
    pub basis_b: BasisSet,
}

impl QfimBlocks {
    /// `[[F_a, X], [Xᵀ, F_b]]`.
    pub fn full(&self) -> RMatrix {
        let (na, nb) = (self.f_a.nrows(), self.f_b.nrows());
        let mut m = RMatrix::zeros(na + nb, na + nb);
        m.view_mut((0, 0), (na, na)).copy_from(&self.f_a);
        m.view_mut((na, na), (nb, nb)).copy_from(&self.f_b);
        m.view_mut((0, na), (na, nb)).copy_from(&self.x);
        m.view_mut((na, 0), (nb, na)).copy_from(&self.x.transpose());
        m
    }

    pub fn tr_fa(&self) -> f64 {
        self.f_a.trace()
    }

    pub fn tr_fb(&self) -> f64 {
        self.f_b.trace()
    }

    pub fn tr_x(&self) -> f64 {
        self.x.trace()
    }

    pub fn trace_norm_x(&self) -> f64 {
        trace_norm(&self.x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue_sym(&self.full())
    }
}

fn bipartite_dims(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<(usize, usize)> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::InvalidArgument(format!("expected a bipartite state, got dims {dims:?}")));
    }
    if basis_a.dim() != dims[0] || basis_b.dim() != dims[1] {
        return Err(Error::InvalidArgument(format!(
            "bases of dimension ({}, {}) for subsystems {dims:?}",
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    Ok((dims[0], dims[1]))
}

pub fn qfim_blocks(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<QfimBlocks> {
    let (da, db) = bipartite_dims(rho, basis_a, basis_b)?;
    let mut ops = basis_a.lift_left(db);
    ops.extend(basis_b.lift_right(da));
    let full = qfim_unchecked(rho.matrix(), &ops);
    let (na, nb) = (basis_a.len(), basis_b.len());
    Ok(QfimBlocks {
        f_a: full.view((0, 0), (na, na)).into_owned(),
        f_b: full.view((na, na), (nb, nb)).into_owned(),
        x: full.view((0, na), (na, nb)).into_owned(),
        basis_a: basis_a.clone(),
        basis_b: basis_b.clone(),
    })
}

/// Same layout as [`qfim_blocks`] for the covariance matrix.
pub fn covariance_blocks(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<QfimBlocks> {
    let (da, db) = bipartite_dims(rho, basis_a, basis_b)?;
    let mut ops = basis_a.lift_left(db);
    ops.extend(basis_b.lift_right(da));
    let full = covariance_matrix(rho, &ops)?;
    let (na, nb) = (basis_a.len(), basis_b.len());
    Ok(QfimBlocks {
        f_a: full.view((0, 0), (na, na)).into_owned(),
        f_b: full.view((na, na), (nb, nb)).into_owned(),
        x: full.view((0, na), (na, nb)).into_owned(),
        basis_a: basis_a.clone(),
        basis_b: basis_b.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gellmann_basis;
    use crate::linalg::{c, ZERO};
    use crate::states::{mes_state, rho_s};

    fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, ZERO, c(-1.0, 0.0)])
    }

    #[test]
    fn bell_collective_z() {
        let rho = mes_state(2, 2).unwrap().to_density();
        let z = sigma_z();
        let h = linalg::kron(&z, &linalg::identity(2)) + linalg::kron(&linalg::identity(2), &z);
        assert!((qfi(&rho, &h).unwrap() - 16.0).abs() < 1e-10);
        assert!(qfi(&rho, &linalg::identity(4)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_has_no_information() {
        let rho = DensityMatrix::maximally_mixed(&[2]).unwrap();
        assert!(qfi(&rho, &sigma_z()).unwrap().abs() < 1e-14);
        let rho3 = DensityMatrix::maximally_mixed(&[3]).unwrap();
        let gm = gellmann_basis(3, false).unwrap();
        let f = qfim(&rho3, gm.elements()).unwrap();
        assert!(f.amax() < 1e-14);
        let cov = covariance_matrix(&rho3, gm.elements()).unwrap();
        assert!(linalg::max_abs_diff_real(&cov, &RMatrix::identity(8, 8).unscale(3.0)) < 1e-12);
    }

    #[test]
    fn qubit_zero_covariance() {
        let rho = PureState::basis(&[2], &[0]).unwrap().to_density();
        let gm = gellmann_basis(2, false).unwrap();
        let cov = covariance_matrix(&rho, gm.elements()).unwrap();
        let expected = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.5, 0.0]));
        assert!(linalg::max_abs_diff_real(&cov, &expected) < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let rho = DensityMatrix::maximally_mixed(&[2]).unwrap();
        let mut bad = sigma_z();
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(qfi(&rho, &bad), Err(Error::InvalidObservable(_))));
        assert!(matches!(qfi(&rho, &linalg::identity(3)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn mes_block_traces() {
        for d in 2..=4 {
            let ga = gellmann_basis(d, false).unwrap();
            for r in 1..=d {
                let rho = mes_state(d, r).unwrap().to_density();
                let blocks = qfim_blocks(&rho, &ga, &ga).unwrap();
                let expected = 4.0 * (d as f64 - 1.0 / r as f64);
                assert!((blocks.tr_fa() - expected).abs() < 1e-8);
                assert!((blocks.tr_fb() - expected).abs() < 1e-8);
                let tn = 4.0 * (r as f64 - 1.0 / r as f64);
                assert!((blocks.trace_norm_x() - tn).abs() < 1e-8, "d={d} r={r}");
            }
        }
    }

    #[test]
    fn product_state_has_no_cross_block() {
        let psi = PureState::basis(&[3, 3], &[1, 2]).unwrap();
        let g = gellmann_basis(3, true).unwrap();
        let blocks = qfim_blocks(&psi.to_density(), &g, &g).unwrap();
        assert!(blocks.x.amax() < 1e-10);
    }

    #[test]
    fn rho_s_blocks_are_psd() {
        let rho = rho_s([1.0 / 3.0; 3]).unwrap();
        let g = gellmann_basis(3, false).unwrap();
        assert!(qfim_blocks(&rho, &g, &g).unwrap().min_eigenvalue() > -1e-8);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&RMatrix::identity(5, 5)) - 5.0).abs() < 1e-12);
        let m = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -4.0]));
        assert!((trace_norm(&m) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn pure_paths_agree() {
        let psi = mes_state(3, 2).unwrap();
        let g = gellmann_basis(3, false).unwrap();
        let ops = g.lift_left(3);
        let a = qfim(&psi.to_density(), &ops).unwrap();
        let b = qfim_pure(&psi, &ops).unwrap();
        let cov = covariance_matrix(&psi.to_density(), &ops).unwrap() * 4.0;
        assert!(linalg::max_abs_diff_real(&a, &b) < 1e-10);
        assert!(linalg::max_abs_diff_real(&a, &cov) < 1e-10);
    }
}
