//! Pure and mixed qudit states, bipartitions, partial traces and Schmidt
//! decompositions, plus the reference states used throughout the crate.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE};

/// Tolerance on `‖ψ‖ = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on Hermiticity, unit trace and positivity of density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Schmidt coefficients `λ_k` at or below this value do not count towards the rank.
pub const SCHMIDT_RANK_CUTOFF: f64 = 1e-10;

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidDimension(format!("subsystem dimensions {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != len {
        return Err(Error::InvalidDimension(format!(
            "dimensions {dims:?} multiply to {prod}, data has length {len}"
        )));
    }
    Ok(())
}

/// A normalized state vector on `⊗_i C^{d_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes `amplitudes` first; fails on the zero vector.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero or non-finite vector".into()));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    /// Computational basis state `|i_0 i_1 …⟩`.
    pub fn basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.len() || digits.iter().zip(dims).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidArgument(format!("basis digits {digits:?} for dims {dims:?}")));
        }
        let index = digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i);
        let len = dims.iter().product();
        let mut v = CVector::zeros(len);
        v[index] = ONE;
        Self::new(v, dims.to_vec())
    }

    /// `|ψ_0⟩ ⊗ |ψ_1⟩ ⊗ …`.
    pub fn product(factors: &[PureState]) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let mut amps = first.amplitudes.clone();
        let mut dims = first.dims.clone();
        for f in &factors[1..] {
            amps = amps.kronecker(&f.amplitudes);
            dims.extend_from_slice(&f.dims);
        }
        Self::normalized(amps, dims)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_particles(&self) -> usize {
        self.dims.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { matrix: linalg::hermitian_part(&m), dims: self.dims.clone() }
    }

    /// Amplitudes reshaped into a `d_a × d_b` matrix for the given cut.
    pub fn cut_matrix(&self, cut: &Bipartition) -> Result<CMatrix> {
        cut.check_particles(self.num_particles())?;
        let order = cut.ordering();
        let v = linalg::permute_vector(&self.amplitudes, &self.dims, &order);
        let (da, db) = cut.party_dims(&self.dims);
        Ok(CMatrix::from_fn(da, db, |i, j| v[i * db + j]))
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        linalg::expectation_vec(&self.amplitudes, op)
    }
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        check_dims(&dims, matrix.nrows())?;
        if !linalg::is_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > DENSITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = linalg::eigvalsh(&matrix)[0];
        if min_eig < -DENSITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix: linalg::hermitian_part(&matrix), dims })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let n: usize = dims.iter().product();
        Self::new(linalg::identity(n).unscale(n as f64), dims.to_vec())
    }

    /// `Σ_i p_i ρ_i`; weights must form a probability vector.
    pub fn mixture(components: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        check_simplex(&components.iter().map(|(p, _)| *p).collect::<Vec<_>>())?;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (p, rho) in components {
            if rho.dims != first.dims {
                return Err(Error::InvalidDimension("mixture components differ in dimensions".into()));
            }
            m += rho.matrix.scale(*p);
        }
        Self::new(m, first.dims.clone())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_particles(&self) -> usize {
        self.dims.len()
    }

    pub fn purity(&self) -> f64 {
        linalg::hs_inner(&self.matrix, &self.matrix).re
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        linalg::expectation(&self.matrix, op)
    }

    /// Spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

pub(crate) fn check_simplex(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| x.is_nan() || x < -1e-12) {
        return Err(Error::InvalidArgument(format!("negative or NaN probability in {p:?}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("probabilities sum to {s}, expected 1")));
    }
    Ok(())
}

/// A cut of `n` particles into two nonempty parties.
///
/// Canonical form: `party_a` holds particle 0. The label index is the binary
/// encoding of `party_b` over particles `1..n`, so indices run over
/// `1..=2^(n-1)-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    party_a: Vec<usize>,
    party_b: Vec<usize>,
}

impl Bipartition {
    /// Builds the cut `party | complement`; either side may be passed.
    pub fn new(n: usize, party: &[usize]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("a bipartition needs at least 2 particles, got {n}")));
        }
        let mut members = vec![false; n];
        for &i in party {
            if i >= n {
                return Err(Error::InvalidArgument(format!("particle {i} out of range for n={n}")));
            }
            members[i] = true;
        }
        let count = members.iter().filter(|&&m| m).count();
        if count == 0 || count == n {
            return Err(Error::InvalidArgument("bipartition parties must be nonempty and proper".into()));
        }
        if !members[0] {
            members.iter_mut().for_each(|m| *m = !*m);
        }
        let party_a = (0..n).filter(|&i| members[i]).collect();
        let party_b = (0..n).filter(|&i| !members[i]).collect();
        Ok(Self { n, party_a, party_b })
    }

    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        if n < 2 || n > usize::BITS as usize || index == 0 || index >= (1usize << (n - 1)) {
            return Err(Error::InvalidArgument(format!("bipartition index {index} for n={n}")));
        }
        let party_b: Vec<usize> = (1..n).filter(|&i| index >> (i - 1) & 1 == 1).collect();
        Self::new(n, &party_b)
    }

    pub fn index(&self) -> usize {
        self.party_b.iter().map(|&i| 1usize << (i - 1)).sum()
    }

    pub fn num_particles(&self) -> usize {
        self.n
    }

    pub fn party_a(&self) -> &[usize] {
        &self.party_a
    }

    pub fn party_b(&self) -> &[usize] {
        &self.party_b
    }

    /// Size of the smaller party.
    pub fn size_class(&self) -> usize {
        self.party_a.len().min(self.party_b.len())
    }

    /// `party_a` followed by `party_b`.
    pub fn ordering(&self) -> Vec<usize> {
        self.party_a.iter().chain(&self.party_b).copied().collect()
    }

    pub fn party_dims(&self, dims: &[usize]) -> (usize, usize) {
        let da = self.party_a.iter().map(|&i| dims[i]).product();
        let db = self.party_b.iter().map(|&i| dims[i]).product();
        (da, db)
    }

    /// Whether both particles sit on the same side of the cut.
    pub fn same_side(&self, i: usize, j: usize) -> bool {
        self.party_a.contains(&i) == self.party_a.contains(&j)
    }

    fn check_particles(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::InvalidArgument(format!(
                "bipartition of {} particles applied to a {n}-particle state",
                self.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    /// One-based labels, e.g. `1|23`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |p: &[usize]| p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(if self.n > 9 { "," } else { "" });
        write!(f, "{}|{}", side(&self.party_a), side(&self.party_b))
    }
}

/// Reduced state on the particles in `keep` (any order; result keeps ascending order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let n = dims.len();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one particle".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument(format!("keep set {keep:?} out of range for {n} particles")));
    }
    let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
    let dk: usize = kept.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();
    let order: Vec<usize> = kept.iter().chain(&traced).copied().collect();
    let map = linalg::permutation_map(dims, &order);
    // inverse: permuted index -> original index
    let mut inv = vec![0usize; map.len()];
    for (old, &new) in map.iter().enumerate() {
        inv[new] = old;
    }
    let m = rho.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    for t in 0..dt {
        for a in 0..dk {
            let ra = inv[a * dt + t];
            for b in 0..dk {
                out[(a, b)] += m[(ra, inv[b * dt + t])];
            }
        }
    }
    let kept_dims = kept.iter().map(|&i| dims[i]).collect();
    DensityMatrix::new(linalg::hermitian_part(&out), kept_dims)
}

/// `|ψ⟩ = Σ_k √λ_k |u_k⟩|v_k⟩` with `λ` sorted descending.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// Columns are `|u_k⟩` in the `party_a` ordering of the cut.
    pub left: CMatrix,
    /// Columns are `|v_k⟩` in the `party_b` ordering of the cut.
    pub right: CMatrix,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.rank_with_cutoff(SCHMIDT_RANK_CUTOFF)
    }

    pub fn rank_with_cutoff(&self, cutoff: f64) -> usize {
        self.coefficients.iter().filter(|&&l| l > cutoff).count()
    }

    /// `Σ_k √λ_k |u_k⟩ ⊗ |v_k⟩` in the cut ordering (`party_a` first).
    pub fn reconstruct(&self) -> CVector {
        let da = self.left.nrows();
        let db = self.right.nrows();
        let mut v = CVector::zeros(da * db);
        for (k, &lam) in self.coefficients.iter().enumerate() {
            let s = lam.max(0.0).sqrt();
            for i in 0..da {
                for j in 0..db {
                    v[i * db + j] += self.left[(i, k)] * self.right[(j, k)] * s;
                }
            }
        }
        v
    }
}

pub fn schmidt_decompose(psi: &PureState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = psi.cut_matrix(cut)?;
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numerical("SVD failed in Schmidt decomposition".into())),
    };
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients = order.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
    let left = CMatrix::from_fn(u.nrows(), k, |r, j| u[(r, order[j])]);
    // M = U Σ V†, so the right Schmidt vectors are the rows of V† read as columns.
    let right = CMatrix::from_fn(v_t.ncols(), k, |r, j| v_t[(order[j], r)]);
    Ok(SchmidtDecomposition { coefficients, left, right })
}

/// `(1/√r) Σ_{i<r} |ii⟩` in `C^d ⊗ C^d`.
pub fn mes_state(d: usize, r: usize) -> Result<PureState> {
    if d < 1 {
        return Err(Error::InvalidDimension(format!("d={d}")));
    }
    if r < 1 || r > d {
        return Err(Error::InvalidRank { rank: r, dim: d });
    }
    let mut v = CVector::zeros(d * d);
    let amp = c(1.0 / (r as f64).sqrt(), 0.0);
    for i in 0..r {
        v[i * d + i] = amp;
    }
    PureState::new(v, vec![d, d])
}

/// The three two-qutrit states mixed by [`rho_s`].
pub fn rho_s_components() -> [PureState; 3] {
    let s = 1.0 / 2f64.sqrt();
    let ket = |pairs: &[(usize, usize, f64)]| {
        let mut v = CVector::zeros(9);
        for &(a, b, sign) in pairs {
            v[a * 3 + b] = c(sign * s, 0.0);
        }
        PureState::new(v, vec![3, 3]).expect("normalized by construction")
    };
    [
        ket(&[(0, 0, 1.0), (1, 1, -1.0)]),
        ket(&[(1, 2, 1.0), (2, 0, 1.0)]),
        ket(&[(0, 2, 1.0), (2, 1, 1.0)]),
    ]
}

/// Mixture `Σ_i p_i |ψ_i⟩⟨ψ_i|` of the [`rho_s_components`].
pub fn rho_s(p: [f64; 3]) -> Result<DensityMatrix> {
    check_simplex(&p)?;
    let comps = rho_s_components();
    let mut m = CMatrix::zeros(9, 9);
    for (pi, psi) in p.iter().zip(&comps) {
        m += psi.to_density().matrix().scale(*pi);
    }
    DensityMatrix::new(m, vec![3, 3])
}

/// `(1/√d) Σ_i |i⟩^{⊗n}`.
pub fn ghz_state(n: usize, d: usize) -> Result<PureState> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!("GHZ state needs n ≥ 2 and d ≥ 2, got n={n}, d={d}")));
    }
    let len = d.checked_pow(n as u32).ok_or_else(|| Error::UnsupportedSize(format!("{d}^{n}")))?;
    let stride: usize = (0..n).map(|k| d.pow(k as u32)).sum();
    let mut v = CVector::zeros(len);
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * stride] = amp;
    }
    PureState::new(v, vec![d; n])
}

/// `(|0⟩+|1⟩) ⊗ (|00⟩+|11⟩) ⊗ (|0000⟩+|1111⟩) / (2√2)`.
pub fn seven_qubit_state() -> PureState {
    let plus = PureState::normalized(CVector::from_vec(vec![ONE, ONE]), vec![2]).expect("nonzero");
    let bell = ghz_state(2, 2).expect("valid");
    let ghz4 = ghz_state(4, 2).expect("valid");
    PureState::product(&[plus, bell, ghz4]).expect("valid factors")
}

/// Product of `n` copies of `|0⟩` with local dimension `d`.
pub fn product_zero_state(n: usize, d: usize) -> Result<PureState> {
    PureState::basis(&vec![d; n], &vec![0; n])
}
