//! Spin-`j` angular momentum matrices.

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, I};

/// Validates `j` and returns the representation dimension `2j + 1`.
pub fn spin_dimension(j: f64) -> Result<usize> {
    let two_j = 2.0 * j;
    if !j.is_finite() || j < 0.0 || (two_j - two_j.round()).abs() > 1e-9 || two_j > 1e6 {
        return Err(Error::InvalidArgument(format!("spin j={j} is not a nonnegative half-integer")));
    }
    Ok(two_j.round() as usize + 1)
}

/// Magnetic quantum numbers `m_k = −j + k`, ascending.
pub fn magnetic_numbers(j: f64) -> Result<Vec<f64>> {
    let d = spin_dimension(j)?;
    Ok((0..d).map(|k| -j + k as f64).collect())
}

/// `(j_x, j_y, j_z)` in the `j_z` eigenbasis ordered `m = −j, …, j`.
pub fn spin_operators(j: f64) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let m = magnetic_numbers(j)?;
    let d = m.len();
    let mut raise = CMatrix::zeros(d, d);
    for l in 0..d.saturating_sub(1) {
        let coeff = (j * (j + 1.0) - m[l] * (m[l] + 1.0)).max(0.0).sqrt();
        raise[(l + 1, l)] = c(coeff, 0.0);
    }
    let lower = raise.adjoint();
    let jx = (&raise + &lower).scale(0.5);
    let jy = (&raise - &lower) * (-I * 0.5);
    let jz = CMatrix::from_fn(d, d, |a, b| if a == b { c(m[a], 0.0) } else { c(0.0, 0.0) });
    Ok((jx, jy, jz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs_diff};

    #[test]
    fn half_spin_is_half_pauli() {
        let (x, y, z) = spin_operators(0.5).unwrap();
        let px = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let py = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]);
        // basis order is m = −1/2, +1/2, so j_z = diag(−1/2, 1/2)
        let pz = CMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(max_abs_diff(&x, &px) < 1e-15);
        assert!(max_abs_diff(&y, &py.scale(-1.0)) < 1e-15);
        assert!(max_abs_diff(&z, &pz) < 1e-15);
    }

    #[test]
    fn commutation_and_casimir_up_to_five() {
        for two_j in 0..=10 {
            let j = two_j as f64 / 2.0;
            let (x, y, z) = spin_operators(j).unwrap();
            let d = x.nrows();
            assert!(max_abs_diff(&commutator(&x, &y), &(&z * I)) < 1e-10, "j={j}");
            assert!(max_abs_diff(&commutator(&y, &z), &(&x * I)) < 1e-10, "j={j}");
            assert!(max_abs_diff(&commutator(&z, &x), &(&y * I)) < 1e-10, "j={j}");
            let cas = (&x * &x + &y * &y + &z * &z).trace().re;
            assert!((cas - d as f64 * j * (j + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn jz_for_three_halves() {
        let (_, _, z) = spin_operators(1.5).unwrap();
        let diag: Vec<f64> = (0..4).map(|k| z[(k, k)].re).collect();
        assert_eq!(diag, vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn invalid_spin() {
        assert!(spin_operators(0.3).is_err());
        assert!(spin_operators(-1.0).is_err());
        assert!(spin_operators(f64::NAN).is_err());
    }
}
