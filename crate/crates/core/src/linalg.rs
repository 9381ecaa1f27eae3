//! Dense complex linear algebra helpers shared by the rest of the crate.
//!
//! Tensor products follow the usual convention: for subsystem dimensions
//! `(d_0, …, d_{n-1})` the basis index of `|i_0 … i_{n-1}⟩` is row-major, so
//! particle 0 is the most significant digit. This matches
//! [`nalgebra::Matrix::kronecker`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry of `|M − M†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    assert!(m.is_square());
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Rejects non-square, non-finite or non-Hermitian operators.
pub fn ensure_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::UnsupportedShape(format!(
            "operator is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_finite(m) {
        return Err(Error::InvalidArgument("operator has non-finite entries".into()));
    }
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::InvalidObservable(dev));
    }
    Ok(())
}

/// Symmetrized copy `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The QR iteration occasionally breaks down (NaN output) on highly
/// structured inputs. Results are therefore checked against the residual
/// `‖M V − V Λ‖`, and on failure the decomposition is retried on a shifted
/// matrix and then on a unitarily rotated copy.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let n = h.nrows();
    let scale = 1.0 + h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let attempt = |shift: f64, rot: Option<&CMatrix>| -> Option<(Vec<f64>, CMatrix)> {
        let mut work = match rot {
            Some(u) => u * &h * u.adjoint(),
            None => h.clone(),
        };
        for i in 0..n {
            work[(i, i)] += shift;
        }
        let eig = SymmetricEigen::new(work);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k] - shift).collect();
        let mut vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        if let Some(u) = rot {
            vectors = u.adjoint() * vectors;
        }
        let ok = values.iter().all(|v| v.is_finite()) && is_finite(&vectors) && {
            let lam = CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO });
            let resid = &h * &vectors - &vectors * lam;
            resid.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-9 * scale
        };
        ok.then_some((values, vectors))
    };
    if let Some(out) = attempt(0.0, None).or_else(|| attempt(scale, None)) {
        return out;
    }
    for k in 1..=4u32 {
        if let Some(out) = attempt(0.0, Some(&fixed_unitary(n, k))) {
            return out;
        }
    }
    panic!("Hermitian eigensolver failed to converge on a {n}x{n} matrix");
}

/// Deterministic dense unitary `exp(iA)` for a fixed Hermitian `A`, used to break structure.
fn fixed_unitary(n: usize, k: u32) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |i, j| {
        let (p, q) = (i.min(j) as f64, i.max(j) as f64);
        let re = ((p + 1.0) * 0.618 + (q + 1.0) * 0.414 * k as f64).sin();
        let im = if i == j { 0.0 } else { ((p + 2.0) * 0.732 * k as f64 - q * 0.577).cos() } * if i < j { 1.0 } else { -1.0 };
        c(re, im)
    });
    let a = hermitian_part(&a);
    let eig = SymmetricEigen::new(a);
    let phases = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::from_polar(1.0, eig.eigenvalues[i]) } else { ZERO });
    polar_isometry(&(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())).unwrap_or_else(|_| identity(n))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvals_sym(m: &RMatrix) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(sym.clone()).eigenvalues.iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        v = eigvalsh(&sym.map(|x| c(x, 0.0)));
    }
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue_sym(m: &RMatrix) -> f64 {
    eigvals_sym(m).first().copied().unwrap_or(0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Lifts a single-site operator to `𝟙 ⊗ … ⊗ op ⊗ … ⊗ 𝟙`.
pub fn embed(op: &CMatrix, site: usize, dims: &[usize]) -> CMatrix {
    assert_eq!(op.nrows(), dims[site]);
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    kron(&kron(&identity(left), op), &identity(right))
}

/// Reorders tensor factors of a vector: new factor `i` is old factor `order[i]`.
pub fn permute_vector(v: &CVector, dims: &[usize], order: &[usize]) -> CVector {
    let map = permutation_map(dims, order);
    let mut out = CVector::zeros(v.len());
    for (old, &new) in map.iter().enumerate() {
        out[new] = v[old];
    }
    out
}

/// For every old basis index, the basis index after reordering factors.
pub fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let n = dims.len();
    assert_eq!(order.len(), n);
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let mut new_strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        new_strides[i] = new_strides[i + 1] * new_dims[i + 1];
    }
    // position of old factor k in the new ordering
    let mut position = vec![0usize; n];
    for (i, &k) in order.iter().enumerate() {
        position[k] = i;
    }
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; n];
    for (old, slot) in map.iter_mut().enumerate() {
        let mut rem = old;
        for k in (0..n).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        *slot = (0..n).map(|k| digits[k] * new_strides[position[k]]).sum();
    }
    map
}

/// Reorders tensor factors of an operator.
pub fn permute_operator(m: &CMatrix, dims: &[usize], order: &[usize]) -> CMatrix {
    let map = permutation_map(dims, order);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    out
}

/// Closest isometry `W Z†` from the thin SVD `A = W Σ Z†`.
pub fn polar_isometry(a: &CMatrix) -> Result<CMatrix> {
    let svd = a.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Err(Error::Numerical("SVD failed in polar retraction".into())),
    }
}

/// `tr(ρ O)`.
pub fn expectation(rho: &CMatrix, op: &CMatrix) -> Complex64 {
    let n = rho.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += rho[(i, k)] * op[(k, i)];
        }
    }
    acc
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation_vec(psi: &CVector, op: &CMatrix) -> Complex64 {
    psi.dotc(&(op * psi))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_real(a: &RMatrix, b: &RMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Hilbert–Schmidt inner product `tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Lowest and highest eigenvalue of a Hermitian operator.
pub fn spectral_extremes(m: &CMatrix) -> (f64, f64) {
    let ev = eigvalsh(m);
    (ev[0], ev[ev.len() - 1])
}
