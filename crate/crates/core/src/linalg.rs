//! Dense complex linear algebra for the sensing pipeline.
//!
//! Everything here operates on small dense matrices (N up to a few hundred):
//! Hermitian eigendecomposition, projection onto the PSD cone, square-root
//! factorization, and correlated circular complex Gaussian sampling. Complex
//! entries are `num_complex::Complex64`; matrices are row-major. Tolerances
//! are expressed relative to the Frobenius norm so they are scale-free.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Errors from matrix validation and factorization.
#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NonHermitianInput { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mat_vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest |a_ij - conj(a_ji)| over all pairs.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian matrix. Construction validates symmetry (relative to the
/// Frobenius norm) and then stores the exactly symmetrized form
/// `(A + A^H)/2` with a real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

/// Relative asymmetry above which construction is rejected.
pub const HERMITIAN_REL_TOL: f64 = 1e-9;

impl HermitianMatrix {
    /// Validate and symmetrize. Fails with `NonHermitianInput` when the
    /// asymmetry exceeds `1e-9 * ||A||_F`.
    pub fn new(a: ComplexMatrix) -> Result<Self, LinalgError> {
        assert_eq!(a.rows(), a.cols(), "Hermitian matrix must be square");
        let norm = a.frobenius_norm();
        let tol = HERMITIAN_REL_TOL * norm.max(f64::MIN_POSITIVE);
        let defect = a.hermitian_defect();
        if defect > tol {
            return Err(LinalgError::NonHermitianInput {
                asymmetry: defect,
                tolerance: tol,
            });
        }
        Ok(Self::symmetrize(a))
    }

    /// Symmetrize without validation; for matrices Hermitian by construction.
    pub fn symmetrize(mut a: ComplexMatrix) -> Self {
        let n = a.rows();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
            a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        }
        Self { mat: a }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self::symmetrize(ComplexMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(n),
        }
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            mat: ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(d[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Rank-one v v^H.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::symmetrize(ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Real quadratic form v^H H v.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        assert_eq!(self.dim(), v.len());
        let hv = self.mat.mat_vec(v);
        v.iter()
            .zip(&hv)
            .map(|(x, y)| (x.conj() * y).re)
            .sum::<f64>()
    }

    /// `self + c * other`, entrywise.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::symmetrize(self.mat.add(&other.mat.scale(Complex64::new(c, 0.0))))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            mat: self.mat.scale(Complex64::new(c, 0.0)),
        }
    }
}

impl std::ops::Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.mat[idx]
    }
}

/// Real part of tr(A * B) without forming the product.
pub fn trace_product_re(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let n = a.dim();
    assert_eq!(n, b.dim());
    let mut acc = 0.0;
    for i in 0..n {
        let arow = a.matrix().row(i);
        for j in 0..n {
            acc += (arow[j] * b[(j, i)]).re;
        }
    }
    acc
}

/// Eigendecomposition result: eigenvalues descending, eigenvectors as the
/// columns of a unitary matrix.
pub type EigenPairs = (Vec<f64>, ComplexMatrix);

/// Hermitian eigendecomposition `H = U diag(lambda) U^H`, eigenvalues in
/// descending order.
///
/// Validates Hermitian symmetry of the input (`NonHermitianInput` beyond
/// `1e-9 * ||H||_F`). Small matrices use cyclic Jacobi; larger ones use
/// Householder tridiagonalization followed by implicit QL, which is
/// substantially faster and is cross-checked against Jacobi in the tests.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenPairs, LinalgError> {
    let h = HermitianMatrix::new(h.clone())?;
    Ok(eig(&h))
}

/// Size above which the tridiagonal path replaces Jacobi.
const JACOBI_MAX_DIM: usize = 48;

/// Eigendecomposition of an already-validated Hermitian matrix.
pub fn eig(h: &HermitianMatrix) -> EigenPairs {
    let n = h.dim();
    let (mut vals, mut vecs) = if n <= JACOBI_MAX_DIM {
        jacobi_eig(h)
    } else {
        tridiagonal_eig(h)
    };
    sort_descending(&mut vals, &mut vecs);
    (vals, vecs)
}

fn sort_descending(vals: &mut [f64], vecs: &mut ComplexMatrix) {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let old_vals = vals.to_vec();
    let old_vecs = vecs.clone();
    for (new_col, &old_col) in order.iter().enumerate() {
        vals[new_col] = old_vals[old_col];
        for r in 0..n {
            vecs[(r, new_col)] = old_vecs[(r, old_col)];
        }
    }
}

/// Cyclic Jacobi for complex Hermitian matrices. Quadratically convergent;
/// used directly for small matrices and as the reference in tests.
fn jacobi_eig(h: &HermitianMatrix) -> EigenPairs {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut u = ComplexMatrix::identity(n);
    if n <= 1 {
        return ((0..n).map(|i| a[(i, i)].re).collect(), u);
    }
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-13 * norm;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let m = g.norm();
                if m <= 1e-300 {
                    continue;
                }
                // Phase factor making the pivot real, then a real rotation.
                let uph = g.conj() / m;
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * m);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let su = uph * s;
                let cu = uph * c;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    let new_p = c * aip - su * aiq;
                    let new_q = s * aip + cu * aiq;
                    a[(i, p)] = new_p;
                    a[(i, q)] = new_q;
                    a[(p, i)] = new_p.conj();
                    a[(q, i)] = new_q.conj();
                }
                let app = alpha * c * c - 2.0 * m * s * c + beta * s * s;
                let aqq = alpha * s * s + 2.0 * m * s * c + beta * c * c;
                a[(p, p)] = Complex64::new(app, 0.0);
                a[(q, q)] = Complex64::new(aqq, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let uip = u[(i, p)];
                    let uiq = u[(i, q)];
                    u[(i, p)] = c * uip - su * uiq;
                    u[(i, q)] = s * uip + cu * uiq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), u)
}

/// Householder reduction to real symmetric tridiagonal form followed by
/// implicit QL with Wilkinson shifts, accumulating eigenvectors.
fn tridiagonal_eig(h: &HermitianMatrix) -> EigenPairs {
    let n = h.dim();
    let mut a = h.matrix().clone();
    // Accumulated unitary Q with A = Q T Q^H.
    let mut q = ComplexMatrix::identity(n);
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n]; // e[i]: subdiagonal between i and i+1; e[n-1] unused

    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1; // length of the column below the diagonal
        let alpha = a[(k + 1, k)];
        let mut xnorm_sq = 0.0;
        for i in (k + 2)..n {
            xnorm_sq += a[(i, k)].norm_sqr();
        }
        let (beta, tau) = householder_reflector(alpha, xnorm_sq);
        e[k] = beta;
        if tau.norm_sqr() == 0.0 {
            // Column already in the desired real form.
            continue;
        }
        // v = [1, x_rest / (alpha - beta)] on indices k+1..n.
        let denom = alpha - Complex64::new(beta, 0.0);
        v[k + 1] = Complex64::new(1.0, 0.0);
        for i in (k + 2)..n {
            v[i] = a[(i, k)] / denom;
        }
        // Two-sided update of the trailing block A[k+1.., k+1..]:
        // p = tau * A v;  w = p - (tau/2)(p^H v) v;  A -= v w^H + w v^H.
        for i in (k + 1)..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                acc += a[(i, j)] * v[j];
            }
            w[i] = tau * acc;
        }
        let ph_v: Complex64 = ((k + 1)..n).map(|i| w[i].conj() * v[i]).sum();
        let corr = 0.5 * tau * ph_v.conj();
        for i in (k + 1)..n {
            w[i] -= corr * v[i];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(i, j)] -= upd;
            }
        }
        // Accumulate Q <- Q (I - tau v v^H).
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in (k + 1)..n {
                acc += q[(r, i)] * v[i];
            }
            let f = tau * acc;
            for i in (k + 1)..n {
                q[(r, i)] -= f * v[i].conj();
            }
        }
        let _ = m;
    }
    for i in 0..n {
        d[i] = a[(i, i)].re;
    }

    tql_implicit(&mut d, &mut e, &mut q);
    (d, q)
}

/// LAPACK `zlarfg`-style reflector: given the leading entry `alpha` and the
/// squared norm of the remaining entries, produce a real `beta` with
/// `|beta| = ||x||` and the scalar `tau` of `H = I - tau v v^H` such that
/// `H^H x = beta e1`.
fn householder_reflector(alpha: Complex64, xnorm_sq: f64) -> (f64, Complex64) {
    let xnorm = xnorm_sq.sqrt();
    if xnorm == 0.0 && alpha.im == 0.0 {
        return (alpha.re, Complex64::new(0.0, 0.0));
    }
    let anorm = (alpha.norm_sqr() + xnorm_sq).sqrt();
    let beta = if alpha.re >= 0.0 { -anorm } else { anorm };
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    (beta, tau)
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix,
/// accumulating the real Givens rotations into the complex matrix `z`.
fn tql_implicit(d: &mut [f64], e: &mut [f64], z: &mut ComplexMatrix) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 80, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[(k, i + 1)];
                    let zk0 = z[(k, i)];
                    z[(k, i + 1)] = s * zk0 + c * zk1;
                    z[(k, i)] = c * zk0 - s * zk1;
                }
                f = 0.0;
                let _ = f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Projection onto the PSD cone: clip negative eigenvalues to zero.
///
/// This is the nearest PSD matrix in Frobenius norm. Idempotent.
pub fn psd_project(h: &HermitianMatrix) -> HermitianMatrix {
    let (vals, vecs) = eig(h);
    reconstruct(&vals.iter().map(|&l| l.max(0.0)).collect::<Vec<_>>(), &vecs)
}

/// Rebuild `U diag(vals) U^H` as a Hermitian matrix.
fn reconstruct(vals: &[f64], vecs: &ComplexMatrix) -> HermitianMatrix {
    let n = vals.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs[(i, k)] * lambda;
            for j in 0..n {
                let t = vik * vecs[(j, k)].conj();
                out[(i, j)] += t;
            }
        }
    }
    HermitianMatrix::symmetrize(out)
}

/// Relative eigenvalue floor below which `sqrt_factor` rejects the input.
pub const PSD_REL_TOL: f64 = 1e-6;

/// Square-root factor `F` with `F F^H = V`, via the eigendecomposition
/// `U diag(sqrt(max(lambda, 0)))`. Tolerates the slight indefiniteness left
/// behind by iterative solvers (eigenvalues down to `-1e-8 ||V||_F` are
/// clipped); anything below `-1e-6 ||V||_F` is an error.
pub fn sqrt_factor(v: &HermitianMatrix) -> Result<ComplexMatrix, LinalgError> {
    let (vals, vecs) = eig(v);
    let norm = v.frobenius_norm().max(f64::MIN_POSITIVE);
    let min = vals.last().copied().unwrap_or(0.0);
    if min < -PSD_REL_TOL * norm {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: min,
        });
    }
    let n = v.dim();
    let mut f = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in vals.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        for i in 0..n {
            f[(i, k)] = vecs[(i, k)] * s;
        }
    }
    Ok(f)
}

/// Draw `F z` where `z` has i.i.d. standard circular complex Gaussian
/// entries (real and imaginary parts independent, mean 0, variance 1/2).
/// With `F` from [`sqrt_factor`] the result is `CN(0, F F^H)`.
pub fn sample_cn<R: Rng + ?Sized>(f: &ComplexMatrix, rng: &mut R) -> Vec<Complex64> {
    let z: Vec<Complex64> = (0..f.cols())
        .map(|_| standard_circular(rng))
        .collect();
    f.mat_vec(&z)
}

/// One standard circular complex Gaussian scalar: CN(0, 1).
pub fn standard_circular<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        HermitianMatrix::symmetrize(ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }))
    }

    fn random_unit_norm_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect()
    }

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        HermitianMatrix::symmetrize(g.mul(&g.adjoint()))
    }

    fn reconstruction_error(h: &HermitianMatrix, vals: &[f64], vecs: &ComplexMatrix) -> f64 {
        let rebuilt = reconstruct(vals, vecs);
        h.matrix().sub(rebuilt.matrix()).frobenius_norm()
    }

    fn unitarity_error(u: &ComplexMatrix) -> f64 {
        let n = u.rows();
        u.adjoint()
            .mul(u)
            .sub(&ComplexMatrix::identity(n))
            .frobenius_norm()
    }

    /// Independent oracle: dense unshifted QR iteration (via modified
    /// Gram-Schmidt) returning eigenvalues only. Deliberately a different
    /// algorithm from both production paths.
    fn qr_iteration_eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
        let n = h.dim();
        let mut a = h.matrix().clone();
        for _ in 0..20_000 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in 0..i {
                    off += a[(i, j)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-13 * h.frobenius_norm().max(1e-300) {
                break;
            }
            // QR via modified Gram-Schmidt on the columns of A.
            let mut qm = ComplexMatrix::zeros(n, n);
            let mut r = ComplexMatrix::zeros(n, n);
            for j in 0..n {
                let mut col: Vec<Complex64> = (0..n).map(|i| a[(i, j)]).collect();
                for k in 0..j {
                    let proj: Complex64 =
                        (0..n).map(|i| qm[(i, k)].conj() * col[i]).sum();
                    r[(k, j)] = proj;
                    for i in 0..n {
                        let sub = proj * qm[(i, k)];
                        col[i] -= sub;
                    }
                }
                let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                r[(j, j)] = Complex64::new(norm, 0.0);
                if norm > 0.0 {
                    for i in 0..n {
                        qm[(i, j)] = col[i] / norm;
                    }
                } else {
                    qm[(i_of_free_unit(&qm, n), j)] = Complex64::new(1.0, 0.0);
                }
            }
            a = r.mul(&qm);
        }
        let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
        vals
    }

    fn i_of_free_unit(_q: &ComplexMatrix, _n: usize) -> usize {
        0
    }

    #[test]
    fn eig_identity() {
        let h = HermitianMatrix::identity(3);
        let (vals, vecs) = eig(&h);
        for v in &vals {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(unitarity_error(&vecs) < 1e-12);
    }

    #[test]
    fn eig_diagonal_sorted_descending() {
        let h = HermitianMatrix::diag_real(&[3.0, 1.0, 2.0]);
        let (vals, vecs) = eig(&h);
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - 1.0).abs() < 1e-14);
        // Permuted basis vectors: column 1 picks out index 2.
        assert!((vecs[(2, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_matches_qr_iteration_oracle_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(8, &mut rng);
        let (vals, _) = eig(&h);
        let oracle = qr_iteration_eigenvalues(&h);
        for (a, b) in vals.iter().zip(&oracle) {
            assert!(
                (a - b).abs() <= 1e-8 * h.frobenius_norm().max(1.0),
                "eigenvalue mismatch: {a} vs oracle {b}"
            );
        }
    }

    #[test]
    fn eig_reconstruction_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 5, 17, 40, 64, 90] {
            let h = random_hermitian(n, &mut rng);
            let (vals, vecs) = eig(&h);
            let norm = h.frobenius_norm();
            assert!(
                reconstruction_error(&h, &vals, &vecs) <= 1e-8 * norm,
                "reconstruction failed at n={n}"
            );
            assert!(unitarity_error(&vecs) <= 1e-8, "unitarity failed at n={n}");
            let trace_gap = (vals.iter().sum::<f64>() - h.trace()).abs();
            assert!(trace_gap <= 1e-9 * norm, "trace identity failed at n={n}");
        }
    }

    #[test]
    fn tridiagonal_path_agrees_with_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [49usize, 60, 75] {
            let h = random_hermitian(n, &mut rng);
            let (fast_vals, _) = tridiagonal_eig(&h);
            let (jac_vals, _) = jacobi_eig(&h);
            let mut fast = fast_vals.clone();
            let mut jac = jac_vals.clone();
            fast.sort_by(|a, b| b.partial_cmp(a).unwrap());
            jac.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (a, b) in fast.iter().zip(&jac) {
                assert!(
                    (a - b).abs() <= 1e-9 * h.frobenius_norm(),
                    "paths disagree at n={n}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            hermitian_eig(&m),
            Err(LinalgError::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn psd_project_identity_on_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_psd(5, &mut rng);
        let projected = psd_project(&p);
        assert!(
            p.matrix().sub(projected.matrix()).frobenius_norm() <= 1e-10 * p.frobenius_norm().max(1.0)
        );
    }

    #[test]
    fn psd_project_clips_negative_diagonal() {
        let h = HermitianMatrix::diag_real(&[1.0, -2.0]);
        let p = psd_project(&h);
        assert!((p[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(p[(1, 1)].re.abs() < 1e-12);
    }

    #[test]
    fn psd_project_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(6, &mut rng);
        let once = psd_project(&h);
        let twice = psd_project(&once);
        assert!(once.matrix().sub(twice.matrix()).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn psd_project_is_nearest_in_frobenius_norm() {
        // Sampling oracle: the projection beats 1000 random PSD matrices.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = random_hermitian(6, &mut rng);
        let proj = psd_project(&h);
        let dist = h.matrix().sub(proj.matrix()).frobenius_norm();
        for _ in 0..1000 {
            let p = random_psd(6, &mut rng);
            let d = h.matrix().sub(p.matrix()).frobenius_norm();
            assert!(dist <= d + 1e-12, "projection not nearest: {dist} > {d}");
        }
        let (vals, _) = eig(&proj);
        assert!(vals.last().unwrap() >= &-1e-10);
    }

    #[test]
    fn sqrt_factor_identity() {
        let f = sqrt_factor(&HermitianMatrix::identity(4)).unwrap();
        let prod = f.mul(&f.adjoint());
        assert!(prod.sub(&ComplexMatrix::identity(4)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn sqrt_factor_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let v = random_unit_norm_vec(5, &mut rng);
        let outer = HermitianMatrix::outer(&v);
        let f = sqrt_factor(&outer).unwrap();
        let rebuilt = f.mul(&f.adjoint());
        assert!(rebuilt.sub(outer.matrix()).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn sqrt_factor_random_psd_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let p = random_psd(10, &mut rng);
        let f = sqrt_factor(&p).unwrap();
        let rebuilt = f.mul(&f.adjoint());
        assert!(
            rebuilt.sub(p.matrix()).frobenius_norm() <= 1e-8 * p.frobenius_norm(),
            "F F^H does not reproduce V"
        );
    }

    #[test]
    fn sqrt_factor_rejects_indefinite() {
        let h = HermitianMatrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(sqrt_factor(&h), Err(LinalgError::NotPsd { .. })));
    }

    #[test]
    fn sqrt_factor_composes_with_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = random_hermitian(7, &mut rng);
        let f = sqrt_factor(&psd_project(&h)).unwrap();
        assert_eq!(f.rows(), 7);
    }

    #[test]
    fn sample_cn_zero_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = sample_cn(&ComplexMatrix::zeros(4, 4), &mut rng);
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn sample_cn_rayleigh_mean() {
        // E|z| = sqrt(pi)/2 for CN(0,1); Monte Carlo within 1%.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let f = ComplexMatrix::identity(4);
        let samples = 100_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let v = sample_cn(&f, &mut rng);
            acc += v.iter().map(|z| z.norm()).sum::<f64>() / 4.0;
        }
        let mean = acc / samples as f64;
        let expected = std::f64::consts::PI.sqrt() / 2.0;
        assert!(
            (mean - expected).abs() / expected < 0.01,
            "mean magnitude {mean} vs {expected}"
        );
    }

    #[test]
    fn sample_cn_empirical_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let v = random_psd(3, &mut rng);
        let f = sqrt_factor(&v).unwrap();
        let samples = 100_000;
        let n = 3;
        let mut cov = ComplexMatrix::zeros(n, n);
        for _ in 0..samples {
            let x = sample_cn(&f, &mut rng);
            for i in 0..n {
                for j in 0..n {
                    let t = x[i] * x[j].conj();
                    cov[(i, j)] += t;
                }
            }
        }
        let cov = cov.scale(Complex64::new(1.0 / samples as f64, 0.0));
        let err = cov.sub(v.matrix()).frobenius_norm() / v.frobenius_norm();
        assert!(err < 0.02, "empirical covariance off by {err}");
    }
}
