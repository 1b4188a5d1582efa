//! Dense Hermitian eigendecomposition with a real-symmetric fast path.

use ndarray::{Array2, ShapeBuilder};
use ndarray_linalg::{EigValsh, Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::Result;

#[derive(Clone, Debug)]
pub struct DenseEig {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, when requested.
    pub vectors: Option<Array2<C64>>,
}

fn is_real(a: &Array2<C64>) -> bool {
    a.iter().all(|v| v.im == 0.0)
}

/// Eigen-decomposition of the Hermitian part `(A + A†)/2`.
pub fn eigh(a: &Array2<C64>, vectors: bool) -> Result<DenseEig> {
    let n = a.nrows();
    if n == 0 {
        return Ok(DenseEig { values: vec![], vectors: vectors.then(|| Array2::zeros((0, 0))) });
    }
    // LAPACK sees a row-major complex matrix as its transpose, which for a
    // Hermitian matrix conjugates the eigenvectors; hand it column-major.
    let mut h = Array2::<C64>::zeros((n, n).f());
    h.assign(&((a + &a.t().mapv(|v| v.conj())) * C64::new(0.5, 0.0)));
    if is_real(&h) {
        let r = h.mapv(|v| v.re);
        if vectors {
            let (w, v) = r.eigh(UPLO::Lower)?;
            Ok(DenseEig { values: w.to_vec(), vectors: Some(v.mapv(|x| C64::new(x, 0.0))) })
        } else {
            Ok(DenseEig { values: r.eigvalsh(UPLO::Lower)?.to_vec(), vectors: None })
        }
    } else if vectors {
        let (w, v) = h.eigh(UPLO::Lower)?;
        Ok(DenseEig { values: w.to_vec(), vectors: Some(v) })
    } else {
        Ok(DenseEig { values: h.eigvalsh(UPLO::Lower)?.to_vec(), vectors: None })
    }
}

/// Eigenvalues of a real symmetric tridiagonal matrix and the eigenvector
/// matrix (columns), via LAPACK on the dense form.
pub fn tridiagonal_eigh(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
    let k = alpha.len();
    let mut t = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        t[[i, i]] = alpha[i];
        if i + 1 < k {
            t[[i, i + 1]] = beta[i];
            t[[i + 1, i]] = beta[i];
        }
    }
    let (w, v) = t.eigh(UPLO::Lower)?;
    Ok((w.to_vec(), v))
}
