//! Dense complex matrix helpers. Eigenvalues come from nalgebra's complex Schur
//! form; eigenvectors are recovered by back substitution on the triangular factor.

use nalgebra::{DMatrix, DVector, Schur};

use crate::arith::{real, Scalar};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Scalar>;
pub type CVector = DVector<Scalar>;

const SCHUR_MAX_ITER: usize = 10_000;

pub fn diag(entries: &[Scalar]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Max-norm of `diff` divided by `1 + ` the largest entry magnitude among `inputs`.
pub fn scaled_residual(diff: &CMatrix, inputs: &[&CMatrix]) -> f64 {
    let scale = inputs.iter().map(|m| max_abs(m)).fold(0.0, f64::max);
    max_abs(diff) / (1.0 + scale)
}

/// Scaled residual of `[a, b] - rhs`, normalized by the products `ab` and `ba`
/// (and `rhs`), which is what rounding in a bilinear expression scales with.
pub fn commutator_residual(a: &CMatrix, b: &CMatrix, rhs: Option<&CMatrix>) -> f64 {
    let (ab, ba) = (a * b, b * a);
    let mut diff = &ab - &ba;
    let mut inputs = vec![&ab, &ba];
    if let Some(r) = rhs {
        diff -= r;
        inputs.push(r);
    }
    scaled_residual(&diff, &inputs)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.is_finite())
}

/// Orders eigenvalues by real part, then imaginary part.
pub fn sort_spectrum(values: &mut [Scalar]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Scalar,
    /// Unit 2-norm.
    pub vector: CVector,
}

fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Eigensolver(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if !is_finite(m) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }
    let s = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Eigensolver("Schur iteration did not converge".into()))?;
    Ok(s.unpack())
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Scalar>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues with right eigenvectors, in Schur-diagonal order.
pub fn eigen_decompose(m: &CMatrix) -> Result<Vec<EigenPair>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (q, t) = schur(m)?;
    let guard = f64::EPSILON * (1.0 + max_abs(&t));
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = CVector::zeros(n);
        y[k] = real(1.0);
        for i in (0..k).rev() {
            let mut acc = Scalar::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < guard {
                den = real(guard);
            }
            y[i] = -acc / den;
        }
        let mut v = &q * y;
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Eigensolver(format!("degenerate eigenvector for eigenvalue {lambda}")));
        }
        v /= real(norm);
        pairs.push(EigenPair { value: lambda, vector: v });
    }
    Ok(pairs)
}
