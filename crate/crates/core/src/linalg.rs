//! Trace norms of finite-rank operators Σ wᵢ|ξᵢ⟩⟨ηᵢ| from Gram matrices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff when factoring Gram matrices.
pub const GRAM_CUTOFF: f64 = 1e-12;

/// Returns A with G = A^H A (rows of A are coordinates in an orthonormal basis of the
/// span), dropping eigenvalues below GRAM_CUTOFF·trace.
pub fn gram_factor(gram: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = gram.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let trace: f64 = (0..n).map(|i| gram[(i, i)].re).sum();
    if trace <= 0.0 {
        return Ok(DMatrix::zeros(0, n));
    }
    let herm = (gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let floor = GRAM_CUTOFF * trace;
    let min = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min < -1e-8 * trace {
        return Err(Error::Numerical(format!(
            "Gram matrix is not positive semidefinite (eigenvalue {min:.3e}, trace {trace:.3e})"
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > floor).collect();
    let mut a = DMatrix::zeros(keep.len(), n);
    for (r, &i) in keep.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        for c in 0..n {
            a[(r, c)] = eig.eigenvectors[(c, i)].conj() * s;
        }
    }
    Ok(a)
}

/// Sum of singular values.
pub fn nuclear_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Trace norm of Σ wᵢ|ξᵢ⟩⟨ηᵢ| given the Gram matrices Gξ[i,j] = ⟨ξ_j, ξ_i⟩ and
/// Gη[i,j] = ⟨η_j, η_i⟩ (so that G = A^H A with A's columns the coordinates).
pub fn trace_norm(weights: &[C64], gram_xi: &DMatrix<C64>, gram_eta: &DMatrix<C64>) -> Result<f64> {
    let a = gram_factor(gram_xi)?;
    let b = gram_factor(gram_eta)?;
    let n = weights.len();
    let mut m = DMatrix::zeros(a.nrows(), b.nrows());
    for i in 0..n {
        if weights[i] == C64::new(0.0, 0.0) {
            continue;
        }
        for r in 0..a.nrows() {
            for c in 0..b.nrows() {
                m[(r, c)] += weights[i] * a[(r, i)] * b[(c, i)].conj();
            }
        }
    }
    Ok(nuclear_norm(&m))
}
