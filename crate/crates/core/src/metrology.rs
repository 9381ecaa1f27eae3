//! Precision limits for estimating phases `θ_k` of `exp(−i Σ θ_k H_k)`.

use serde::Serialize;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qfim;
use crate::states::DensityMatrix;

/// Readout variances at or below this are treated as zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;
/// Relative singular-value cutoff of the QFIM pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EstimationScenario {
    pub generators: Vec<CMatrix>,
    pub probe: DensityMatrix,
    pub readout: Option<CMatrix>,
}

impl EstimationScenario {
    pub fn new(generators: Vec<CMatrix>, probe: DensityMatrix, readout: Option<CMatrix>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("at least one generator is required".into()));
        }
        for g in generators.iter().chain(readout.iter()) {
            linalg::ensure_hermitian(g, qfim::OP_HERMITIAN_TOL)?;
            if g.nrows() != probe.dim() {
                return Err(Error::InvalidArgument(format!(
                    "operator of dimension {} for a probe of dimension {}",
                    g.nrows(),
                    probe.dim()
                )));
            }
        }
        Ok(Self { generators, probe, readout })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcrbReport {
    pub parameters: usize,
    /// `Σ_i F(H_i)`.
    pub fisher_sum: f64,
    /// `K² / Σ_i F(H_i)`, a lower bound on the summed variances.
    pub trace_bound: f64,
    /// `tr F⁻¹`; infinite when some parameter combination is not identifiable.
    pub inverse_trace: f64,
    /// Trace of the pseudo-inverse restricted to the support.
    pub pseudo_inverse_trace: f64,
    pub rank: usize,
    /// Parameters with a component outside the support of the QFIM.
    pub non_identifiable: Vec<usize>,
}

pub fn qcrb_trace_bound(scenario: &EstimationScenario) -> Result<QcrbReport> {
    let f = qfim::qfim(&scenario.probe, &scenario.generators)?;
    let k = scenario.generators.len();
    let fisher_sum = f.trace();
    let eig = nalgebra::SymmetricEigen::new(f.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let scale: f64 = scenario.generators.iter().map(|g| g.norm_squared()).sum();
    if max <= PINV_CUTOFF * scale || fisher_sum <= 0.0 {
        return Err(Error::Unbounded);
    }
    let cutoff = PINV_CUTOFF * max;
    let mut rank = 0;
    let mut pinv_trace = 0.0;
    let mut null_weight = vec![0.0; k];
    for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
        let col = eig.eigenvectors.column(idx);
        if lam > cutoff {
            rank += 1;
            pinv_trace += col.norm_squared() / lam;
        } else {
            for (i, w) in null_weight.iter_mut().enumerate() {
                *w += col[i] * col[i];
            }
        }
    }
    let non_identifiable: Vec<usize> = (0..k).filter(|&i| null_weight[i] > 1e-8).collect();
    let inverse_trace = if rank == k { pinv_trace } else { f64::INFINITY };
    Ok(QcrbReport {
        parameters: k,
        fisher_sum,
        trace_bound: (k * k) as f64 / fisher_sum,
        inverse_trace,
        pseudo_inverse_trace: pinv_trace,
        rank,
        non_identifiable,
    })
}

/// `|⟨[O, H]⟩|² / (ΔO)²`, the inverse error-propagation variance.
pub fn error_propagation_qfi_lb(rho: &DensityMatrix, h: &CMatrix, o: &CMatrix) -> Result<f64> {
    for op in [h, o] {
        linalg::ensure_hermitian(op, qfim::OP_HERMITIAN_TOL)?;
        if op.nrows() != rho.dim() {
            return Err(Error::InvalidArgument(format!(
                "operator of dimension {} for a state of dimension {}",
                op.nrows(),
                rho.dim()
            )));
        }
    }
    let mean = rho.expectation(o).re;
    let var = rho.expectation(&(o * o)).re - mean * mean;
    if var <= VARIANCE_FLOOR {
        return Err(Error::UndefinedSensitivity(var));
    }
    let comm = rho.expectation(&linalg::commutator(o, h));
    Ok(comm.norm_sqr() / var)
}

/// Summed-variance floor `(d²−1)² r / (8(r² + d r − 2))` for the `d² − 1`
/// collective phases of a state with Schmidt number at most `r`.
pub fn multiparam_precision_floor(d: usize, r: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("d={d}")));
    }
    if r < 1 || r > d {
        return Err(Error::InvalidRank { rank: r, dim: d });
    }
    let (df, rf) = (d as f64, r as f64);
    Ok((df * df - 1.0).powi(2) * rf / (8.0 * (rf * rf + df * rf - 2.0)))
}

/// `G_i = g^a_i ⊗ 𝟙 + 𝟙 ⊗ g^b_i` for paired bases.
pub fn collective_generators(basis_a: &BasisSet, basis_b: &BasisSet) -> Result<Vec<CMatrix>> {
    if basis_a.len() != basis_b.len() {
        return Err(Error::InvalidArgument("paired bases must have equal size".into()));
    }
    let (da, db) = (basis_a.dim(), basis_b.dim());
    let left = basis_a.lift_left(db);
    let right = basis_b.lift_right(da);
    Ok(left.into_iter().zip(right).map(|(a, b)| a + b).collect())
}
