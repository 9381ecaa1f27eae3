//! Schmidt-number witnesses for `d × d` states built from the block QFIM.
//!
//! For a Schmidt number of at most `r`:
//!
//! * `tr F_a ≤ 4(d − 1/r)` and `tr F_b ≤ 4(d − 1/r)`,
//! * `h = tr|X|/4 − √((d − 1/r − tr F_a/4)(d − 1/r − tr F_b/4)) ≤ r − 1/r`,
//! * `Σ_i F(g^a_i ⊗ 𝟙 + 𝟙 ⊗ g^b_i) ≤ 8(d + r − 2/r)`.
//!
//! A violation at `r` certifies a Schmidt number of at least `r + 1`.

use serde::Serialize;

use crate::basis::{gellmann_basis, BasisSet};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::qfim::{self, QfimBlocks};
use crate::states::{DensityMatrix, PureState};

/// Absolute slack before an inequality counts as violated.
///
/// Saturating states sit exactly on the bounds; this absorbs rounding.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Bounds and verdicts for one Schmidt-number hypothesis `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCheck {
    pub r: usize,
    /// `4(d − 1/r)`, shared by both local traces.
    pub local_bound: f64,
    /// `r − 1/r`.
    pub cross_bound: f64,
    /// `8(d + r − 2/r)`.
    pub collective_bound: f64,
    /// `h` evaluated with `d − 1/r` under the square root.
    pub h: f64,
    pub violated_local_a: bool,
    pub violated_local_b: bool,
    pub violated_cross: bool,
    /// `None` when the collective sum was not evaluated.
    pub violated_collective: Option<bool>,
}

impl RankCheck {
    pub fn any_violated(&self) -> bool {
        self.violated_local_a || self.violated_local_b || self.violated_cross || self.violated_collective == Some(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub d: usize,
    pub tr_fa: f64,
    pub tr_fb: f64,
    pub tr_x: f64,
    pub tr_norm_x: f64,
    /// `h` at `r = certified_min_schmidt_number`.
    pub h_value: f64,
    pub obs2_sum: Option<f64>,
    pub per_r: Vec<RankCheck>,
    pub certified_min_schmidt_number: usize,
}

pub fn local_bound(d: usize, r: usize) -> f64 {
    4.0 * (d as f64 - 1.0 / r as f64)
}

pub fn cross_bound(r: usize) -> f64 {
    r as f64 - 1.0 / r as f64
}

pub fn collective_bound(d: usize, r: usize) -> f64 {
    8.0 * (d as f64 + r as f64 - 2.0 / r as f64)
}

/// `h` for hypothesis `r`; negative factors under the root are clamped at 0.
pub fn h_at(d: usize, r: usize, tr_fa: f64, tr_fb: f64, tr_norm_x: f64) -> f64 {
    let base = d as f64 - 1.0 / r as f64;
    let fa = (base - tr_fa / 4.0).max(0.0);
    let fb = (base - tr_fb / 4.0).max(0.0);
    tr_norm_x / 4.0 - (fa * fb).sqrt()
}

fn square_dim(rho: &DensityMatrix) -> Result<usize> {
    match rho.dims() {
        [a, b] if a == b => Ok(*a),
        dims => Err(Error::UnsupportedShape(format!("criteria need a d x d state, got dims {dims:?}"))),
    }
}

fn report_from_blocks(d: usize, blocks: &QfimBlocks, collective: Option<f64>) -> WitnessReport {
    let tr_fa = blocks.tr_fa();
    let tr_fb = blocks.tr_fb();
    let tr_norm_x = blocks.trace_norm_x();
    let per_r: Vec<RankCheck> = (1..=d)
        .map(|r| {
            let local = local_bound(d, r);
            let cross = cross_bound(r);
            let coll = collective_bound(d, r);
            let h = h_at(d, r, tr_fa, tr_fb, tr_norm_x);
            RankCheck {
                r,
                local_bound: local,
                cross_bound: cross,
                collective_bound: coll,
                h,
                violated_local_a: tr_fa > local + VIOLATION_TOL,
                violated_local_b: tr_fb > local + VIOLATION_TOL,
                violated_cross: h > cross + VIOLATION_TOL,
                violated_collective: collective.map(|s| s > coll + VIOLATION_TOL),
            }
        })
        .collect();
    let certified = per_r.iter().filter(|c| c.any_violated()).map(|c| c.r + 1).max().unwrap_or(1);
    let h_value = h_at(d, certified.min(d), tr_fa, tr_fb, tr_norm_x);
    WitnessReport {
        d,
        tr_fa,
        tr_fb,
        tr_x: blocks.tr_x(),
        tr_norm_x,
        h_value,
        obs2_sum: collective,
        per_r,
        certified_min_schmidt_number: certified,
    }
}

/// Local-trace and cross-block criteria.
pub fn obs1_report(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<WitnessReport> {
    let d = square_dim(rho)?;
    let blocks = qfim::qfim_blocks(rho, basis_a, basis_b)?;
    Ok(report_from_blocks(d, &blocks, None))
}

/// All criteria, including the collective sum over paired basis elements.
pub fn full_report(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<WitnessReport> {
    let d = square_dim(rho)?;
    check_paired(basis_a, basis_b)?;
    let blocks = qfim::qfim_blocks(rho, basis_a, basis_b)?;
    let sum = collective_sum(&blocks);
    Ok(report_from_blocks(d, &blocks, Some(sum)))
}

/// `Σ_i F(G_i)` with `G_i = g^a_i ⊗ 𝟙 + 𝟙 ⊗ g^b_i`, expanded over the blocks.
pub fn collective_sum(blocks: &QfimBlocks) -> f64 {
    blocks.tr_fa() + blocks.tr_fb() + 2.0 * blocks.tr_x()
}

fn check_paired(basis_a: &BasisSet, basis_b: &BasisSet) -> Result<()> {
    if basis_a.len() != basis_b.len() {
        return Err(Error::InvalidArgument(format!(
            "paired bases must have equal size, got {} and {}",
            basis_a.len(),
            basis_b.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollectiveValue {
    pub sum: f64,
    /// `(r, 8(d + r − 2/r))` for `r = 1..=d`.
    pub bounds: Vec<(usize, f64)>,
}

impl CollectiveValue {
    /// Largest `r` whose bound is exceeded, if any.
    pub fn max_violated(&self) -> Option<usize> {
        self.bounds.iter().filter(|(_, b)| self.sum > b + VIOLATION_TOL).map(|(r, _)| *r).max()
    }
}

pub fn obs2_value(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<CollectiveValue> {
    let d = square_dim(rho)?;
    check_paired(basis_a, basis_b)?;
    let blocks = qfim::qfim_blocks(rho, basis_a, basis_b)?;
    Ok(CollectiveValue {
        sum: collective_sum(&blocks),
        bounds: (1..=d).map(|r| (r, collective_bound(d, r))).collect(),
    })
}

/// Largest QFI of `A ⊗ 𝟙 + 𝟙 ⊗ B` over states of Schmidt rank at most `r`.
pub fn nogo_bound(a: &CMatrix, b: &CMatrix, r: usize) -> Result<f64> {
    if r < 1 {
        return Err(Error::InvalidArgument("Schmidt rank must be at least 1".into()));
    }
    linalg::ensure_hermitian(a, 1e-10)?;
    linalg::ensure_hermitian(b, 1e-10)?;
    let (a_min, a_max) = linalg::spectral_extremes(a);
    let (b_min, b_max) = linalg::spectral_extremes(b);
    Ok(if r == 1 {
        (a_max - a_min).powi(2) + (b_max - b_min).powi(2)
    } else {
        (a_max + b_max - a_min - b_min).powi(2)
    })
}

/// A state attaining [`nogo_bound`].
///
/// For `r = 1` the product of equal superpositions of extremal eigenvectors;
/// otherwise `(|a_max b_max⟩ + |a_min b_min⟩)/√2`.
pub fn nogo_saturating_state(a: &CMatrix, b: &CMatrix, r: usize) -> Result<PureState> {
    if r < 1 {
        return Err(Error::InvalidArgument("Schmidt rank must be at least 1".into()));
    }
    linalg::ensure_hermitian(a, 1e-10)?;
    linalg::ensure_hermitian(b, 1e-10)?;
    let (_, va) = linalg::eigh(a);
    let (_, vb) = linalg::eigh(b);
    let (da, db) = (a.nrows(), b.nrows());
    let col = |m: &CMatrix, k: usize| -> CVector { m.column(k).into_owned() };
    let (a_lo, a_hi) = (col(&va, 0), col(&va, da - 1));
    let (b_lo, b_hi) = (col(&vb, 0), col(&vb, db - 1));
    let amps = if r == 1 {
        (&a_lo + &a_hi).kronecker(&(&b_lo + &b_hi))
    } else {
        a_hi.kronecker(&b_hi) + a_lo.kronecker(&b_lo)
    };
    PureState::normalized(amps, vec![da, db])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleBound {
    /// Clamped at zero.
    pub value: f64,
    pub unclamped: f64,
}

/// `max_x { tr F_x / 2 − 2(d_x − 1) }` over both parties, using traceless Gell-Mann bases.
pub fn two_tangle_lower_bound(rho: &DensityMatrix) -> Result<TangleBound> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::InvalidArgument(format!("expected a bipartite state, got dims {dims:?}")));
    }
    let (da, db) = (dims[0], dims[1]);
    let local = |d: usize| -> Result<Option<BasisSet>> { if d >= 2 { gellmann_basis(d, false).map(Some) } else { Ok(None) } };
    let (ga, gb) = (local(da)?, local(db)?);
    let mut best = f64::NEG_INFINITY;
    if let Some(g) = &ga {
        let tr = qfim::qfim(rho, &g.lift_left(db))?.trace();
        best = best.max(tr / 2.0 - 2.0 * (da as f64 - 1.0));
    }
    if let Some(g) = &gb {
        let tr = qfim::qfim(rho, &g.lift_right(da))?.trace();
        best = best.max(tr / 2.0 - 2.0 * (db as f64 - 1.0));
    }
    if !best.is_finite() {
        best = 0.0;
    }
    Ok(TangleBound { value: best.max(0.0), unclamped: best })
}

/// Bases rotated by the singular vectors of `X`, making the cross block
/// diagonal and nonnegative.
pub fn optimize_local_bases(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<(BasisSet, BasisSet)> {
    square_dim(rho)?;
    check_paired(basis_a, basis_b)?;
    let blocks = qfim::qfim_blocks(rho, basis_a, basis_b)?;
    let svd = blocks.x.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numerical("SVD of the cross block failed".into())),
    };
    Ok((basis_a.recombine(&u)?, basis_b.recombine(&v_t.transpose())?))
}

/// Smallest eigenvalue of `4Γ − F` over the concatenated local operators.
///
/// Nonnegative for every state; a diagnostic of the matrix inequality the
/// scalar criteria descend from.
pub fn covariance_gap(rho: &DensityMatrix, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<f64> {
    let f = qfim::qfim_blocks(rho, basis_a, basis_b)?.full();
    let g = qfim::covariance_blocks(rho, basis_a, basis_b)?.full();
    Ok(linalg::min_eigenvalue_sym(&(g * 4.0 - f)))
}

/// Pauli `σ_z`, handy for examples.
pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{mes_state, rho_s};

    #[test]
    fn mes_is_certified_exactly() {
        for d in 2..=4 {
            let g = gellmann_basis(d, false).unwrap();
            for r in 1..=d {
                let rep = obs1_report(&mes_state(d, r).unwrap().to_density(), &g, &g).unwrap();
                assert_eq!(rep.certified_min_schmidt_number, r, "d={d} r={r}");
                assert!((rep.h_value - cross_bound(r)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rho_s_saturates_two() {
        let g = gellmann_basis(3, false).unwrap();
        for p in [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [1.0 / 3.0; 3], [0.5, 0.3, 0.2]] {
            let rep = obs1_report(&rho_s(p).unwrap(), &g, &g).unwrap();
            assert!((rep.h_value - 1.5).abs() < 1e-8, "{p:?}: {}", rep.h_value);
            assert_eq!(rep.certified_min_schmidt_number, 2);
        }
    }

    #[test]
    fn product_state_is_not_flagged() {
        let g = gellmann_basis(3, false).unwrap();
        let rep = full_report(&PureState::basis(&[3, 3], &[0, 2]).unwrap().to_density(), &g, &g).unwrap();
        assert!(rep.tr_norm_x < 1e-10);
        assert_eq!(rep.certified_min_schmidt_number, 1);
        assert!(rep.per_r[0].h <= 1e-12);
    }

    #[test]
    fn unequal_dims_rejected() {
        let g2 = gellmann_basis(2, false).unwrap();
        let g3 = gellmann_basis(3, false).unwrap();
        let rho = PureState::basis(&[2, 3], &[0, 0]).unwrap().to_density();
        assert!(matches!(obs1_report(&rho, &g2, &g3), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn nogo_examples() {
        let z = sigma_z();
        assert!((nogo_bound(&z, &z, 1).unwrap() - 8.0).abs() < 1e-12);
        assert!((nogo_bound(&z, &z, 2).unwrap() - 16.0).abs() < 1e-12);
        assert!(nogo_bound(&z, &z, 0).is_err());
        let (_, _, jz) = crate::spin::spin_operators(1.5).unwrap();
        assert!((nogo_bound(&jz, &jz, 3).unwrap() - 36.0).abs() < 1e-12);
        for r in [1, 2] {
            let psi = nogo_saturating_state(&jz, &z, r).unwrap();
            let h = linalg::kron(&jz, &linalg::identity(2)) + linalg::kron(&linalg::identity(4), &z);
            let f = qfim::qfi(&psi.to_density(), &h).unwrap();
            assert!((f - nogo_bound(&jz, &z, r).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn tangle_examples() {
        let bell = mes_state(2, 2).unwrap().to_density();
        assert!((two_tangle_lower_bound(&bell).unwrap().value - 1.0).abs() < 1e-10);
        let prod = PureState::basis(&[2, 2], &[0, 0]).unwrap().to_density();
        assert!(two_tangle_lower_bound(&prod).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn optimized_mes_saturates_collective_bound() {
        for d in 2..=4 {
            let g = gellmann_basis(d, false).unwrap();
            let rho = mes_state(d, d).unwrap().to_density();
            let (a, b) = optimize_local_bases(&rho, &g, &g).unwrap();
            let v = obs2_value(&rho, &a, &b).unwrap();
            assert!((v.sum - collective_bound(d, d)).abs() < 1e-8, "d={d}: {}", v.sum);
        }
    }
}
