//! Sparse symmetric positive definite solves.
//!
//! The direct path is a fill-reducing sparse Cholesky factorization followed
//! by a few steps of iterative refinement. The iterative path is conjugate
//! gradients with a diagonal preconditioner; it is opt-in because the
//! condensed biharmonic operator is badly conditioned.

use std::fmt;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum SolverMethod {
    #[default]
    Direct,
    Iterative { tolerance: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: SolverMethod,
    pub unknowns: usize,
    pub nonzeros: usize,
    /// `‖K x − b‖ / ‖b‖`, or the absolute residual when `b = 0`.
    pub residual: f64,
    /// CG iterations, or refinement steps after the direct solve.
    pub iterations: usize,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let method = match self.method {
            SolverMethod::Direct => "sparse Cholesky".to_string(),
            SolverMethod::Iterative { tolerance } => format!("PCG (tol {tolerance:.1e})"),
        };
        write!(
            f,
            "{method}: {} unknowns, {} nonzeros, relative residual {:.3e}, {} iterations",
            self.unknowns, self.nonzeros, self.residual, self.iterations
        )
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.mul_vec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

fn relative(r: &[f64], b: &[f64]) -> f64 {
    let nb = norm(b);
    if nb > 0.0 {
        norm(r) / nb
    } else {
        norm(r)
    }
}

pub fn solve(a: &CsrMatrix, b: &[f64], method: SolverMethod) -> Result<(Vec<f64>, SolveReport)> {
    if b.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.len(),
        });
    }
    match method {
        SolverMethod::Direct => cholesky_solve(a, b),
        SolverMethod::Iterative { tolerance } => pcg(a, b, tolerance),
    }
}

const MAX_REFINEMENT_STEPS: usize = 3;

fn cholesky_solve(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.n();
    let mut report = SolveReport {
        method: SolverMethod::Direct,
        unknowns: n,
        nonzeros: a.nnz(),
        residual: 0.0,
        iterations: 0,
    };
    if n == 0 {
        return Ok((Vec::new(), report));
    }

    let triplets: Vec<Triplet<usize, usize, f64>> = a
        .triplets()
        .filter(|&(r, c, _)| c <= r)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let lower = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|_| Error::NotPositiveDefinite)?;
    let llt = lower
        .sp_cholesky(Side::Lower)
        .map_err(|_| Error::NotPositiveDefinite)?;

    let apply = |rhs: &[f64]| -> Vec<f64> {
        let col = Col::<f64>::from_fn(n, |i| rhs[i]);
        let sol = llt.solve(&col);
        (0..n).map(|i| sol[i]).collect()
    };

    let mut x = apply(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut r = residual(a, &x, b);
    let mut res = relative(&r, b);
    for _ in 0..MAX_REFINEMENT_STEPS {
        if res <= 1e-14 {
            break;
        }
        let dx = apply(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(xi, di)| xi + di).collect();
        let r_trial = residual(a, &trial, b);
        let res_trial = relative(&r_trial, b);
        if res_trial >= res {
            break;
        }
        x = trial;
        r = r_trial;
        res = res_trial;
        report.iterations += 1;
    }
    report.residual = res;
    Ok((x, report))
}

fn pcg(a: &CsrMatrix, b: &[f64], tolerance: f64) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.n();
    let max_iter = ((50.0 * (n as f64).sqrt()).ceil() as usize).max(1);
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    let precond = |r: &[f64]| -> Vec<f64> { r.iter().zip(&diag).map(|(ri, d)| ri / d).collect() };

    let nb = norm(b);
    let mut report = SolveReport {
        method: SolverMethod::Iterative { tolerance },
        unknowns: n,
        nonzeros: a.nnz(),
        residual: 0.0,
        iterations: 0,
    };
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok((x, report));
    }
    let mut r = b.to_vec();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        report.iterations = it;
        if norm(&r) / nb <= tolerance {
            // confirm with the true residual
            let res = relative(&residual(a, &x, b), b);
            if res <= tolerance {
                report.residual = res;
                return Ok((x, report));
            }
        }
        z = precond(&r);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::CgNotConverged {
        iterations: max_iter,
        residual: relative(&residual(a, &x, b), b),
    })
}
