//! Realizing spectra with vectors.
//!
//! [`schur_horn_matrix`] builds a real symmetric matrix with a prescribed
//! diagonal and spectrum by Givens rotations, [`design_sequence`] turns it
//! into vectors with prescribed norms and frame operator, and [`complete`]
//! runs the whole pipeline for an initial sequence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::majorization::{argsort_desc, majorizes, sort_desc, trace};
use crate::solver::{optimal_spectrum, BlockSpectrum, ProblemData};
use crate::spectral::{
    eigh_ascending, frame_operator, orthonormality_defect, ComplexMatrix, EigenSystem,
    VectorSequence,
};
use crate::DEFAULT_TOL;

/// Maximum deviation from orthonormality accepted for a synthesis basis.
pub const BASIS_TOL: f64 = 1e-10;

/// Relative distance at which a diagonal target counts as equal to an
/// eigenvalue in [`schur_horn_matrix`].
const SNAP_TOL: f64 = 1e-12;

fn magnitude(x: &[f64]) -> f64 {
    x.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// A real symmetric `n×n` matrix with diagonal `diag_target` and
/// eigenvalues `spectrum`.
///
/// Starting from `diag(spectrum↓)`, the largest unplaced target is moved
/// onto the diagonal by one rotation between two adjacent (by value)
/// active entries that bracket it; the rotated entry is then frozen. This
/// keeps the active part diagonal and the remaining targets majorized by
/// it, so `n − 1` rotations suffice.
pub fn schur_horn_matrix(diag_target: &[f64], spectrum: &[f64], tol: f64) -> Result<ComplexMatrix> {
    let n = diag_target.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if spectrum.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: spectrum.len(),
        });
    }
    let scale = magnitude(spectrum).max(magnitude(diag_target));
    if !majorizes(diag_target, spectrum, tol * scale * n as f64) {
        return Err(Error::NotMajorized(format!(
            "diagonal {diag_target:?} is not majorized by spectrum {spectrum:?}"
        )));
    }

    let snap = SNAP_TOL * scale * n as f64;
    let mut m = ComplexMatrix::from_real_diagonal(&sort_desc(spectrum));
    // active matrix indexes, kept sorted by decreasing diagonal value
    let mut active: Vec<usize> = (0..n).collect();
    // position in diag_target assigned to each matrix index
    let mut slot = vec![0usize; n];

    for &target_idx in &argsort_desc(diag_target) {
        let target = diag_target[target_idx];
        if active.len() == 1 {
            let p = active[0];
            m[(p, p)] = Complex64::new(target, 0.0);
            slot[p] = target_idx;
            break;
        }
        let value = |i: usize| m[(active[i], active[i])].re;
        // adjacent pair with value(i) ≥ target ≥ value(i+1)
        let i = (0..active.len() - 1)
            .find(|&i| value(i + 1) <= target)
            .unwrap_or(active.len() - 2);
        let (p, q) = (active[i], active[i + 1]);
        let (alpha, beta) = (value(i), value(i + 1));
        // A target within round-off of an endpoint is placed without a
        // rotation: sin² = δ/gap would otherwise turn δ ~ ulp into a
        // coupling of order √ulp.
        if (target - beta).abs() <= snap && (alpha - target).abs() > snap {
            m[(p, p)] = Complex64::new(alpha + beta - target, 0.0);
            m[(q, q)] = Complex64::new(target, 0.0);
            slot[q] = target_idx;
            active.remove(i + 1);
            continue;
        }
        let gap = alpha - beta;
        let cos2 = if gap > 0.0 && alpha - target > snap {
            ((target - beta) / gap).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
        if s > 0.0 {
            rotate(&mut m, p, q, c, s);
        }
        m[(p, p)] = Complex64::new(target, 0.0);
        m[(q, q)] = Complex64::new(alpha + beta - target, 0.0);
        slot[p] = target_idx;
        active.remove(i);
    }

    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(slot[i], slot[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// `M ← Rᵀ M R` for the rotation with `R e_p = c e_p + s e_q` and
/// `R e_q = −s e_p + c e_q`.
fn rotate(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    for k in 0..n {
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mkp * c + mkq * s;
        m[(k, q)] = -mkp * s + mkq * c;
    }
    for k in 0..n {
        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = mpk * c + mqk * s;
        m[(q, k)] = -mpk * s + mqk * c;
    }
}

/// Vectors `g_1..g_k` with `‖g_i‖² = norms[i]` and
/// `S_G = Σ mu[i] · basis[i] basis[i]*`.
///
/// The `k×k` Gram matrix is built by [`schur_horn_matrix`] with diagonal
/// `norms` and spectrum `mu` (zero padded or trimmed to length `k`), then
/// factored through its eigendecomposition; its column space is mapped
/// onto `basis`.
pub fn design_sequence(
    norms: &[f64],
    mu: &[f64],
    basis: &[Vec<Complex64>],
) -> Result<VectorSequence> {
    let k = norms.len();
    let d = mu.len();
    if k == 0 || d == 0 {
        return Err(Error::Empty);
    }
    if basis.len() != d {
        return Err(Error::LengthMismatch {
            left: d,
            right: basis.len(),
        });
    }
    let dim = basis[0].len();
    if let Some((index, v)) = basis.iter().enumerate().find(|(_, v)| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            index,
            expected: dim,
            found: v.len(),
        });
    }
    let defect = orthonormality_defect(basis);
    if defect > BASIS_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    let scale = magnitude(mu).max(magnitude(norms));
    let tol = DEFAULT_TOL * scale * k.max(d) as f64;
    if !majorizes(norms, mu, tol) {
        return Err(Error::NotMajorized(format!(
            "norms {norms:?} are not majorized by {mu:?}"
        )));
    }

    // μ↓ trimmed or padded to length k; entries past k are zero up to tol.
    let mu_order = argsort_desc(mu);
    let mut spectrum: Vec<f64> = mu_order.iter().map(|&i| mu[i].max(0.0)).collect();
    spectrum.resize(k, 0.0);
    let leftover: f64 = trace(mu) - trace(&spectrum);
    let gram = schur_horn_matrix(norms, &spectrum, DEFAULT_TOL.max(leftover.abs() / scale))?;
    let eig = eigh_ascending(&gram)?;

    let r = d.min(k);
    let mut vectors = vec![vec![Complex64::new(0.0, 0.0); dim]; k];
    for j in 0..r {
        // j-th largest Gram eigenvector goes with the j-th largest μ entry.
        // Weighting by the target μ rather than the computed eigenvalue
        // keeps round-off eigenvalues from leaking onto the μ = 0 directions.
        if spectrum[j] == 0.0 {
            continue;
        }
        let col = k - 1 - j;
        let sigma = spectrum[j].sqrt();
        let target = &basis[mu_order[j]];
        for (i, g) in vectors.iter_mut().enumerate() {
            let coef = eig.vectors[col][i] * sigma;
            if coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (gx, vx) in g.iter_mut().zip(target) {
                *gx += coef * vx;
            }
        }
    }
    VectorSequence::new(dim, vectors)
}

/// An optimal completion `F = (F0, G)`.
#[derive(Debug, Clone)]
pub struct Completion {
    /// `G`, in the input order of the norms.
    pub vectors: VectorSequence,
    pub spectrum: BlockSpectrum,
    /// Eigensystem of `S_{F0}` the completion was built in.
    pub initial: EigenSystem,
    /// `μ = ν − λ`, aligned with `initial`.
    pub mu: Vec<f64>,
    pub problem: ProblemData,
}

impl Completion {
    /// `F = (F0, G)`.
    pub fn frame(&self, f0: &VectorSequence) -> Result<VectorSequence> {
        f0.concat(&self.vectors)
    }
}

/// Completes `f0` with vectors of squared norms `norms` so that the frame
/// operator spectrum is `ν_f(λ, a)`.
pub fn complete(f0: &VectorSequence, norms: &[f64]) -> Result<Completion> {
    complete_with_tol(f0, norms, DEFAULT_TOL)
}

/// Eigensystem of `S_{F0}` and its ascending spectrum with round-off level
/// eigenvalues set to zero.
pub fn initial_spectrum(f0: &VectorSequence, tol: f64) -> Result<(EigenSystem, Vec<f64>)> {
    let initial = eigh_ascending(&frame_operator(f0))?;
    let floor = tol * initial.values.last().copied().unwrap_or(0.0).max(1.0);
    let lambda = initial
        .values
        .iter()
        .map(|&l| if l.abs() <= floor { 0.0 } else { l })
        .collect();
    Ok((initial, lambda))
}

pub fn complete_with_tol(f0: &VectorSequence, norms: &[f64], tol: f64) -> Result<Completion> {
    let (initial, lambda) = initial_spectrum(f0, tol)?;
    let problem = ProblemData::with_tol(&lambda, norms, tol)?;
    let spectrum = optimal_spectrum(&problem)?;
    let mu = spectrum.mu(problem.lambda());
    let sorted = design_sequence(problem.norms(), &mu, &initial.vectors)?;

    // back to input order
    let mut vectors = vec![Vec::new(); norms.len()];
    for (g, &orig) in sorted.into_vectors().into_iter().zip(problem.norm_order()) {
        vectors[orig] = g;
    }
    Ok(Completion {
        vectors: VectorSequence::new(f0.dim(), vectors)?,
        spectrum,
        initial,
        mu,
        problem,
    })
}
