//! Dense Hermitian linear algebra: frame operators, Gram matrices and a
//! cyclic Jacobi eigensolver returning eigenvalues in ascending order.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Maximum number of full Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius mass, relative to the matrix scale, below which
/// the Jacobi iteration stops.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;
/// Relative tolerance of the Hermitian-input check.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues this close to zero (relative to the matrix scale)
/// are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
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
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<f64> {
        self.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::LengthMismatch {
                left: self.data.len(),
                right: other.data.len(),
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::LengthMismatch {
                left: self.data.len(),
                right: other.data.len(),
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest entry modulus (`‖·‖_max`).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().iter().sum()
    }

    /// `‖M − M*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `Σ w_i v_i v_i*`.
    pub fn weighted_projector_sum(weights: &[f64], vectors: &[Vec<Complex64>], dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for (&w, v) in weights.iter().zip(vectors) {
            add_outer(&mut m, v, w);
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `m += w · v v*`, i.e. `w · v⊗v` with `x⊗y(z) = ⟨z, y⟩ x`.
fn add_outer(m: &mut ComplexMatrix, v: &[Complex64], w: f64) {
    for i in 0..v.len() {
        let vi = v[i] * w;
        for j in 0..v.len() {
            m[(i, j)] += vi * v[j].conj();
        }
    }
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// An ordered list of vectors of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl VectorSequence {
    pub fn new(dim: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: v.len(),
                });
            }
            if let Some(z) = v.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite {
                    index,
                    value: if z.re.is_finite() { z.im } else { z.re },
                });
            }
        }
        Ok(VectorSequence { dim, vectors })
    }

    /// The empty sequence in `C^dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn from_real(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            dim,
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<Complex64>> {
        self.vectors
    }

    pub fn is_real(&self) -> bool {
        self.vectors.iter().flatten().all(|z| z.im == 0.0)
    }

    pub fn squared_norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| norm_sqr(v)).collect()
    }

    /// Juxtaposition `(self, other)`.
    pub fn concat(&self, other: &VectorSequence) -> Result<VectorSequence> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut vectors = self.vectors.clone();
        vectors.extend(other.vectors.iter().cloned());
        Ok(VectorSequence {
            dim: self.dim,
            vectors,
        })
    }
}

/// Eigenvalues in ascending order with a matching orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl EigenSystem {
    /// `Σ λ_i v_i v_i*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.vectors.first().map_or(0, Vec::len);
        ComplexMatrix::weighted_projector_sum(&self.values, &self.vectors, dim)
    }

    /// Eigenvalues in decreasing order.
    pub fn values_desc(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }
}

/// `S_F = Σ f_i ⊗ f_i`. The empty sequence yields the zero operator.
pub fn frame_operator(f: &VectorSequence) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(f.dim, f.dim);
    for v in &f.vectors {
        add_outer(&mut s, v, 1.0);
    }
    // exact Hermitian symmetry
    for i in 0..f.dim {
        s[(i, i)].im = 0.0;
        for j in i + 1..f.dim {
            let z = s[(i, j)];
            s[(j, i)] = z.conj();
        }
    }
    s
}

/// Gram matrix with entries `⟨f_j, f_i⟩` at `(i, j)`.
pub fn gram(f: &VectorSequence) -> Result<ComplexMatrix> {
    if f.is_empty() {
        return Err(Error::Empty);
    }
    let n = f.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = Complex64::new(norm_sqr(&f.vectors[i]), 0.0);
        for j in i + 1..n {
            let z = inner(&f.vectors[i], &f.vectors[j]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    Ok(g)
}

/// `F` spans the space, i.e. the smallest eigenvalue of `S_F` exceeds `tol`.
pub fn is_frame(f: &VectorSequence, tol: f64) -> bool {
    match eigh_ascending(&frame_operator(f)) {
        Ok(eig) => eig.values.first().is_some_and(|&l| l > tol),
        Err(_) => false,
    }
}

/// Scalar field the Jacobi sweep runs over. Real input stays real.
trait JacobiScalar: Copy + std::ops::Mul<Output = Self> + std::ops::Add<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn re(self) -> f64;
    /// `self / |self|`.
    fn phase(self) -> Self;
    fn to_complex(self) -> Complex64;
}

impl JacobiScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn re(self) -> f64 {
        self
    }
    fn phase(self) -> Self {
        self.signum()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl JacobiScalar for Complex64 {
    fn zero() -> Self {
        ZERO
    }
    fn one() -> Self {
        ONE
    }
    fn real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn re(self) -> f64 {
        self.re
    }
    fn phase(self) -> Self {
        self / self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Cyclic Jacobi on a dense Hermitian `n×n` matrix stored row-major.
/// Returns unsorted eigenvalues and the eigenvector matrix (columns).
fn jacobi<T: JacobiScalar>(mut a: Vec<T>, n: usize, scale: f64) -> Result<(Vec<f64>, Vec<T>)> {
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let threshold = OFF_DIAGONAL_THRESHOLD * scale.max(1.0);
    let off_mass = |a: &[T]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].modulus().powi(2);
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_mass(&a) <= threshold;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let g = a[p * n + q];
                let gm = g.modulus();
                if gm == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re();
                let aqq = a[q * n + q].re();
                // Entries negligible next to both diagonal entries are dropped.
                if sweep > 3 && gm * 1e17 < app.abs().min(aqq.abs()) {
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                    continue;
                }
                let u = g.phase();
                let theta = (aqq - app) / (2.0 * gm);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, conj(u)) on (p,q) followed by the real rotation.
                let j_pp = T::real(c);
                let j_pq = T::real(s);
                let j_qp = T::real(-s) * u.conj();
                let j_qq = T::real(c) * u.conj();
                // A <- A J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * j_pp + akq * j_qp;
                    a[k * n + q] = akp * j_pq + akq * j_qq;
                }
                // A <- J* A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[q * n + k] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                a[p * n + p] = T::real(app - t * gm);
                a[q * n + q] = T::real(aqq + t * gm);
                // V <- V J
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * j_pp + vkq * j_qp;
                    v[k * n + q] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
        sweep += 1;
        converged = off_mass(&a) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    Ok(((0..n).map(|i| a[i * n + i].re()).collect(), v))
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
///
/// Deterministic for a fixed input. Degenerate eigenspaces get whatever
/// orthonormal basis the rotations produce.
pub fn eigh_ascending(s: &ComplexMatrix) -> Result<EigenSystem> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows,
            cols: s.cols,
        });
    }
    let n = s.rows;
    let scale = s.max_abs();
    let defect = s.hermitian_defect();
    if defect > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    if n == 0 {
        return Ok(EigenSystem {
            values: vec![],
            vectors: vec![],
        });
    }

    let (raw, columns): (Vec<f64>, Vec<Vec<Complex64>>) = if s.is_real() {
        let a: Vec<f64> = (0..n * n).map(|idx| s.data[idx].re).collect();
        let (vals, v) = jacobi(a, n, scale)?;
        (vals, columns_of(&v, n))
    } else {
        let (vals, v) = jacobi(s.data.clone(), n, scale)?;
        (vals, columns_of(&v, n))
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]).then(i.cmp(&j)));
    let clamp = CLAMP_TOL * scale.max(1.0);
    let values = order
        .iter()
        .map(|&i| {
            let l = raw[i];
            if l < 0.0 && l > -clamp {
                0.0
            } else {
                l
            }
        })
        .collect();
    let vectors = order.iter().map(|&i| columns[i].clone()).collect();
    Ok(EigenSystem { values, vectors })
}

fn columns_of<T: JacobiScalar>(v: &[T], n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|j| (0..n).map(|i| v[i * n + j].to_complex()).collect())
        .collect()
}

/// Largest deviation of `⟨v_i, v_j⟩` from `δ_ij`.
pub fn orthonormality_defect(basis: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, vi) in basis.iter().enumerate() {
        for (j, vj) in basis.iter().enumerate().skip(i) {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner(vi, vj) - target).norm());
        }
    }
    worst
}
