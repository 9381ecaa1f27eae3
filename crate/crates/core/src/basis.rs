//! Hilbert–Schmidt orthonormal bases of Hermitian operators.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, RMatrix, ZERO};

const HERMITIAN_TOL: f64 = 1e-12;
const GRAM_TOL: f64 = 1e-10;

/// Ordered Hermitian operators with `Tr(g_k g_l) = δ_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    dim: usize,
    elements: Vec<CMatrix>,
    includes_identity: bool,
}

impl BasisSet {
    /// Validates Hermiticity and orthonormality.
    pub fn new(dim: usize, elements: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("basis dimension 0".into()));
        }
        if elements.is_empty() || elements.len() > dim * dim {
            return Err(Error::InvalidArgument(format!(
                "{} basis elements for local dimension {dim}",
                elements.len()
            )));
        }
        for g in &elements {
            if g.shape() != (dim, dim) {
                return Err(Error::InvalidDimension(format!("basis element of shape {:?}, expected {dim}x{dim}", g.shape())));
            }
            linalg::ensure_hermitian(g, HERMITIAN_TOL)?;
        }
        let gram = gram_matrix(&elements);
        let dev = linalg::max_abs_diff_real(&gram, &RMatrix::identity(elements.len(), elements.len()));
        if dev > GRAM_TOL {
            return Err(Error::InvalidArgument(format!("basis is not orthonormal (Gram deviation {dev:.3e})")));
        }
        let includes_identity = elements.iter().any(is_scaled_identity);
        Ok(Self { dim, elements, includes_identity })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn includes_identity(&self) -> bool {
        self.includes_identity
    }

    /// Whether the set spans all `d × d` Hermitian operators.
    pub fn is_complete(&self) -> bool {
        self.elements.len() == self.dim * self.dim
    }

    /// Gram matrix `Tr(g_k g_l)`.
    pub fn gram(&self) -> RMatrix {
        gram_matrix(&self.elements)
    }

    /// New elements `g'_i = Σ_α O[α, i] g_α` for a real matrix with orthonormal columns.
    pub fn recombine(&self, o: &RMatrix) -> Result<Self> {
        if o.nrows() != self.len() || o.ncols() > self.len() || o.ncols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "recombination matrix {}x{} for {} elements",
                o.nrows(),
                o.ncols(),
                self.len()
            )));
        }
        let elements = (0..o.ncols())
            .map(|i| {
                let mut g = CMatrix::zeros(self.dim, self.dim);
                for (alpha, ga) in self.elements.iter().enumerate() {
                    let w = o[(alpha, i)];
                    if w != 0.0 {
                        g += ga.scale(w);
                    }
                }
                linalg::hermitian_part(&g)
            })
            .collect();
        Self::new(self.dim, elements)
    }

    /// Complex conjugates `g*` (equivalently transposes) of every element.
    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            elements: self.elements.iter().map(|g| g.map(|z| z.conj())).collect(),
            includes_identity: self.includes_identity,
        }
    }

    /// The same set with any multiple of the identity removed.
    pub fn traceless_part(&self) -> Result<Self> {
        let elements: Vec<CMatrix> = self.elements.iter().filter(|g| !is_scaled_identity(g)).cloned().collect();
        Self::new(self.dim, elements)
    }

    /// Elements lifted to `g ⊗ 𝟙_{other}`.
    pub fn lift_left(&self, other: usize) -> Vec<CMatrix> {
        let id = linalg::identity(other);
        self.elements.iter().map(|g| linalg::kron(g, &id)).collect()
    }

    /// Elements lifted to `𝟙_{other} ⊗ g`.
    pub fn lift_right(&self, other: usize) -> Vec<CMatrix> {
        let id = linalg::identity(other);
        self.elements.iter().map(|g| linalg::kron(&id, g)).collect()
    }
}

fn gram_matrix(elements: &[CMatrix]) -> RMatrix {
    let n = elements.len();
    RMatrix::from_fn(n, n, |k, l| linalg::hs_inner(&elements[k], &elements[l]).re)
}

fn is_scaled_identity(g: &CMatrix) -> bool {
    let d = g.nrows();
    let target = c(1.0 / (d as f64).sqrt(), 0.0);
    (0..d).all(|i| (0..d).all(|j| {
        let expected = if i == j { target } else { ZERO };
        (g[(i, j)] - expected).norm() < 1e-10
    }))
}

/// Generalized Gell-Mann matrices normalized to `Tr(g_k g_l) = δ_kl`.
///
/// Order: symmetric `(E_kl + E_lk)/√2` for `k < l`, then antisymmetric
/// `(−i E_kl + i E_lk)/√2`, then the diagonal generators, each group
/// lexicographic. With `include_identity` the list starts with `𝟙/√d`.
pub fn gellmann_basis(d: usize, include_identity: bool) -> Result<BasisSet> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("Gell-Mann basis requires d ≥ 2, got {d}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d);
    if include_identity {
        elements.push(linalg::identity(d).unscale((d as f64).sqrt()));
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut g = CMatrix::zeros(d, d);
            g[(k, l)] = c(s, 0.0);
            g[(l, k)] = c(s, 0.0);
            elements.push(g);
        }
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut g = CMatrix::zeros(d, d);
            g[(k, l)] = c(0.0, -s);
            g[(l, k)] = c(0.0, s);
            elements.push(g);
        }
    }
    for m in 1..d {
        let norm = 1.0 / ((m * (m + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(d, d);
        for i in 0..m {
            g[(i, i)] = c(norm, 0.0);
        }
        g[(m, m)] = c(-(m as f64) * norm, 0.0);
        elements.push(g);
    }
    BasisSet::new(d, elements)
}

/// Complete basis of matrix units: `E_kk`, then `(E_kl + E_lk)/√2` and
/// `(−i E_kl + i E_lk)/√2` for `k < l`.
pub fn matrix_unit_basis(d: usize) -> Result<BasisSet> {
    if d == 0 {
        return Err(Error::InvalidDimension("d = 0".into()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut g = CMatrix::zeros(d, d);
        g[(k, k)] = c(1.0, 0.0);
        elements.push(g);
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut g = CMatrix::zeros(d, d);
            g[(k, l)] = c(s, 0.0);
            g[(l, k)] = c(s, 0.0);
            elements.push(g);
            let mut h = CMatrix::zeros(d, d);
            h[(k, l)] = c(0.0, -s);
            h[(l, k)] = c(0.0, s);
            elements.push(h);
        }
    }
    BasisSet::new(d, elements)
}

/// All products `g^{(1)}_{k_1} ⊗ g^{(2)}_{k_2} ⊗ …`, first factor most significant.
///
/// Orthonormality is inherited. Completing each factor with the identity
/// (see [`complete`]) before the product yields a complete basis of the
/// composite space.
pub fn tensor_product_basis(factors: &[&BasisSet]) -> Result<BasisSet> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty tensor product basis".into()))?;
    let mut elements = first.elements.clone();
    let mut dim = first.dim;
    for f in &factors[1..] {
        let mut next = Vec::with_capacity(elements.len() * f.len());
        for a in &elements {
            for b in &f.elements {
                next.push(linalg::kron(a, b));
            }
        }
        elements = next;
        dim *= f.dim;
    }
    BasisSet::new(dim, elements)
}

/// Prepends `𝟙/√d` when the set spans only traceless operators and is one short of complete.
pub fn complete(basis: &BasisSet) -> Result<BasisSet> {
    if basis.is_complete() {
        return Ok(basis.clone());
    }
    let d = basis.dim;
    let mut elements = vec![linalg::identity(d).unscale((d as f64).sqrt())];
    elements.extend(basis.elements.iter().cloned());
    BasisSet::new(d, elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    #[test]
    fn qubit_gellmann_is_scaled_pauli() {
        let b = gellmann_basis(2, false).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, c(s, 0.0), c(s, 0.0), ZERO]);
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I * s, I * s, ZERO]);
        let z = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), ZERO, ZERO, c(-s, 0.0)]);
        assert_eq!(b.len(), 3);
        assert!(linalg::max_abs_diff(&b.elements()[0], &x) < 1e-15);
        assert!(linalg::max_abs_diff(&b.elements()[1], &y) < 1e-15);
        assert!(linalg::max_abs_diff(&b.elements()[2], &z) < 1e-15);
    }

    #[test]
    fn identity_is_prepended() {
        let b = gellmann_basis(2, true).unwrap();
        assert_eq!(b.len(), 4);
        assert!(b.includes_identity());
        assert!(linalg::max_abs_diff(&b.elements()[0], &linalg::identity(2).unscale(2f64.sqrt())) < 1e-15);
    }

    #[test]
    fn gram_is_identity_up_to_d6() {
        for d in 2..=6 {
            for with_id in [false, true] {
                let b = gellmann_basis(d, with_id).unwrap();
                assert_eq!(b.len(), d * d - usize::from(!with_id));
                let dev = linalg::max_abs_diff_real(&b.gram(), &RMatrix::identity(b.len(), b.len()));
                assert!(dev < 1e-12, "d={d}: {dev}");
                if !with_id {
                    assert!(b.elements().iter().all(|g| g.trace().norm() < 1e-14));
                }
            }
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(gellmann_basis(1, false), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn tensor_completion_is_complete() {
        let q = gellmann_basis(2, true).unwrap();
        let t = gellmann_basis(3, true).unwrap();
        let p = tensor_product_basis(&[&q, &t]).unwrap();
        assert_eq!(p.dim(), 6);
        assert!(p.is_complete());
        assert!(p.includes_identity());
        let traceless = complete(&gellmann_basis(3, false).unwrap()).unwrap();
        assert!(traceless.is_complete());
    }

    #[test]
    fn recombination_and_conjugation_preserve_orthonormality() {
        let b = gellmann_basis(3, false).unwrap();
        let theta: f64 = 0.7;
        let mut o = RMatrix::identity(8, 8);
        o[(0, 0)] = theta.cos();
        o[(0, 3)] = -theta.sin();
        o[(3, 0)] = theta.sin();
        o[(3, 3)] = theta.cos();
        let r = b.recombine(&o).unwrap();
        assert_eq!(r.len(), 8);
        let cj = b.conjugate();
        assert!(linalg::max_abs_diff(&cj.elements()[3], &b.elements()[3].scale(-1.0)) < 1e-15);
        assert!(BasisSet::new(3, cj.elements().to_vec()).is_ok());
    }

    #[test]
    fn matrix_units_are_complete() {
        for d in 1..=4 {
            assert!(matrix_unit_basis(d).unwrap().is_complete());
        }
    }
}
