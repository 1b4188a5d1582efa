use ndarray::Array2;
use rayon::prelude::*;
use num_complex::Complex64 as C64;

use super::linear::LinearOperator;
use crate::error::{Error, Result};

const PARALLEL_ROWS: usize = 1 << 13;

/// Hermitian matrix in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHermitianOperator {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
    real: bool,
}

impl SparseHermitianOperator {
    /// Assemble from `(row, col, value)` triplets; duplicates are summed in
    /// input order, so assembly is deterministic.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        if let Some(t) = triplets.iter().find(|t| t.0 >= dim || t.1 >= dim) {
            return Err(Error::InvalidArgument(format!(
                "entry ({}, {}) outside a {dim}-dimensional operator",
                t.0, t.1
            )));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            indptr[i + 1] += indptr[i];
        }
        let real = values.iter().all(|v| v.im == 0.0);
        Ok(SparseHermitianOperator { dim, indptr, indices, values, real })
    }

    pub fn zeros(dim: usize) -> Self {
        SparseHermitianOperator {
            dim,
            indptr: vec![0; dim + 1],
            indices: Vec::new(),
            values: Vec::new(),
            real: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseHermitianOperator {
            dim,
            indptr: (0..=dim).collect(),
            indices: (0..dim).collect(),
            values: vec![C64::new(1.0, 0.0); dim],
            real: true,
        }
    }

    pub fn from_dense(a: &Array2<C64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, got: c });
        }
        let trip = a
            .indexed_iter()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|((i, j), v)| (i, j, *v))
            .collect();
        Self::from_triplets(r, trip)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k]))
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        out
    }

    /// `Σ a_k · A_k` over operators of equal dimension.
    pub fn linear_combination(dim: usize, terms: &[(f64, &SparseHermitianOperator)]) -> Result<Self> {
        let mut trip = Vec::new();
        for (a, op) in terms {
            if op.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: op.dim });
            }
            trip.extend(op.triplets().map(|(r, c, v)| (r, c, v * *a)));
        }
        Self::from_triplets(dim, trip)
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a SparseHermitianOperator>>(dim: usize, ops: I) -> Result<Self> {
        let terms: Vec<(f64, &SparseHermitianOperator)> = ops.into_iter().map(|o| (1.0, o)).collect();
        Self::linear_combination(dim, &terms)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |a_ij - conj(a_ji)| / max |a_ij|` (0 for the zero operator).
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (r, c, v) in self.triplets() {
            worst = worst.max((v - self.get(c, r).conj()).norm());
        }
        worst / scale
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let row = &self.indices[self.indptr[r]..self.indptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.values[self.indptr[r] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn dense(&self) -> Array2<C64> {
        let mut a = Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.triplets() {
            a[[r, c]] += v;
        }
        a
    }
}

impl LinearOperator for SparseHermitianOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let row = |r: usize| {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            acc
        };
        // Rows are independent, so the parallel product is bitwise
        // identical to the serial one.
        if self.dim >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, yr)| *yr = row(r));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = row(r);
            }
        }
    }

    fn is_real(&self) -> bool {
        self.real
    }

    fn to_dense(&self) -> Array2<C64> {
        self.dense()
    }
}
