use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::sparse::SparseHermitianOperator;
use crate::error::{Error, Result};

/// Hermitian operator known only through its action on vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// True when every matrix element is real in the computational basis.
    fn is_real(&self) -> bool {
        false
    }

    /// Dense matrix by probing columns. Meant for small dimensions.
    fn to_dense(&self) -> Array2<C64> {
        let n = self.dim();
        let mut a = Array2::zeros((n, n));
        let mut e = vec![C64::new(0.0, 0.0); n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..n {
                a[[i, j]] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        a
    }
}

impl<T: LinearOperator + ?Sized + Send> LinearOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply(x, y)
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
}

fn axpy(a: f64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

/// `Σ_k coef_k · A_{k,1} A_{k,2} ... A_{k,r}` over shared sparse factors.
///
/// Used for `Q` and `F`, whose assembled form is far denser than the
/// factors themselves.
#[derive(Clone, Debug)]
pub struct ProductSum {
    dim: usize,
    factors: Arc<Vec<SparseHermitianOperator>>,
    products: Vec<(f64, Vec<usize>)>,
}

impl ProductSum {
    pub fn new(dim: usize, factors: Arc<Vec<SparseHermitianOperator>>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: f.dim() });
        }
        Ok(ProductSum { dim, factors, products: Vec::new() })
    }

    pub fn push(&mut self, coef: f64, product: Vec<usize>) -> Result<()> {
        if let Some(&k) = product.iter().find(|&&k| k >= self.factors.len()) {
            return Err(Error::InvalidArgument(format!("factor index {k} out of range")));
        }
        self.products.push((coef, product));
        Ok(())
    }

    pub fn products(&self) -> &[(f64, Vec<usize>)] {
        &self.products
    }

    pub fn factors(&self) -> &[SparseHermitianOperator] {
        &self.factors
    }
}

impl LinearOperator for ProductSum {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let mut a = vec![C64::new(0.0, 0.0); self.dim];
        let mut b = vec![C64::new(0.0, 0.0); self.dim];
        for (coef, prod) in &self.products {
            a.copy_from_slice(x);
            for &k in prod.iter().rev() {
                self.factors[k].apply(&a, &mut b);
                std::mem::swap(&mut a, &mut b);
            }
            axpy(*coef, &a, y);
        }
    }

    fn is_real(&self) -> bool {
        self.factors.iter().all(|f| f.is_real())
    }
}

enum Term<'a> {
    Linear(&'a dyn LinearOperator),
    Square(&'a dyn LinearOperator),
}

/// Real linear combination of operators and operator squares.
pub struct Combination<'a> {
    dim: usize,
    terms: Vec<(f64, Term<'a>)>,
}

impl<'a> Combination<'a> {
    pub fn new(dim: usize) -> Self {
        Combination { dim, terms: Vec::new() }
    }

    pub fn plus(mut self, coef: f64, op: &'a dyn LinearOperator) -> Result<Self> {
        self.check(op)?;
        self.terms.push((coef, Term::Linear(op)));
        Ok(self)
    }

    pub fn plus_square(mut self, coef: f64, op: &'a dyn LinearOperator) -> Result<Self> {
        self.check(op)?;
        self.terms.push((coef, Term::Square(op)));
        Ok(self)
    }

    fn check(&self, op: &dyn LinearOperator) -> Result<()> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: op.dim() });
        }
        Ok(())
    }
}

impl LinearOperator for Combination<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let mut t = vec![C64::new(0.0, 0.0); self.dim];
        let mut s = vec![C64::new(0.0, 0.0); self.dim];
        for (coef, term) in &self.terms {
            match term {
                Term::Linear(op) => {
                    op.apply(x, &mut t);
                    axpy(*coef, &t, y);
                }
                Term::Square(op) => {
                    op.apply(x, &mut t);
                    op.apply(&t, &mut s);
                    axpy(*coef, &s, y);
                }
            }
        }
    }

    fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, t)| match t {
            Term::Linear(o) | Term::Square(o) => o.is_real(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> SparseHermitianOperator {
        SparseHermitianOperator::from_triplets(
            v.len(),
            v.iter().enumerate().map(|(i, &x)| (i, i, C64::new(x, 0.0))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn product_sum_matches_dense_products() {
        let a = diag(&[1.0, 2.0]);
        let b = SparseHermitianOperator::from_triplets(
            2,
            vec![(0, 1, C64::new(1.0, 0.0)), (1, 0, C64::new(1.0, 0.0))],
        )
        .unwrap();
        let mut ps = ProductSum::new(2, Arc::new(vec![a.clone(), b.clone()])).unwrap();
        ps.push(1.0, vec![0, 1]).unwrap();
        ps.push(1.0, vec![1, 0]).unwrap();
        let got = ps.to_dense();
        let (ad, bd) = (a.dense(), b.dense());
        let want = ad.dot(&bd) + bd.dot(&ad);
        for (g, w) in got.iter().zip(want.iter()) {
            assert_abs_diff_eq!(g.re, w.re, epsilon = 1e-15);
        }
        assert!(ps.push(1.0, vec![2]).is_err());
    }

    #[test]
    fn combination_of_squares() {
        let a = diag(&[1.0, -3.0]);
        let comb = Combination::new(2).plus_square(1.0, &a).unwrap().plus(-2.0, &a).unwrap();
        let d = comb.to_dense();
        assert_abs_diff_eq!(d[[0, 0]].re, -1.0);
        assert_abs_diff_eq!(d[[1, 1]].re, 15.0);
        assert!(comb.is_real());
        assert!(Combination::new(3).plus(1.0, &a).is_err());
    }
}
