//! The optimal completion spectrum `ν(λ, a)`.
//!
//! `λ` is the ascending spectrum of the initial frame operator and `a` the
//! descending prescribed squared norms. For `k ≥ d` the solver
//!
//! 1. finds the least index `s*` whose truncated pair `(λ^s, a^s)` is
//!    feasible,
//! 2. splits `1..=s*` into blocks whose constants are maximal initial
//!    averages `P_{j,r}` of `h_i = λ_i + a_i` (largest maximizer wins),
//! 3. closes with the feasible spectrum of the truncated pair, whose
//!    constant is a final average `Q_{s*,r}`.
//!
//! For `k < d` it solves on the first `k` eigenvalues and keeps the rest.
//! All averages come from cached prefix sums, so each one costs `O(1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorization::{argsort_desc, majorizes, trace};
use crate::DEFAULT_TOL;

/// Initial data `(λ, a)` of the completion problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    lambda: Vec<f64>,
    norms: Vec<f64>,
    /// `norm_order[i]` is the input position of `norms[i]`.
    norm_order: Vec<usize>,
    lambda_prefix: Vec<f64>,
    norms_prefix: Vec<f64>,
    tol: f64,
}

impl ProblemData {
    /// Sorts `lambda` ascending and `norms` descending. Rejects negative
    /// eigenvalues, non-positive norms and `k < d − rk(S₀)`.
    pub fn new(lambda: &[f64], norms: &[f64]) -> Result<Self> {
        Self::with_tol(lambda, norms, DEFAULT_TOL)
    }

    pub fn with_tol(lambda: &[f64], norms: &[f64], tol: f64) -> Result<Self> {
        if lambda.is_empty() || norms.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in lambda.iter().chain(norms).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "tolerance must be nonnegative, got {tol}"
            )));
        }
        if let Some(&l) = lambda.iter().find(|&&l| l < 0.0) {
            return Err(Error::InvalidProblem(format!(
                "eigenvalues must be nonnegative, got {l}"
            )));
        }
        if let Some(&a) = norms.iter().find(|&&a| a <= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "norms must be positive, got {a}"
            )));
        }
        let mut lambda = lambda.to_vec();
        lambda.sort_by(f64::total_cmp);
        let norm_order = argsort_desc(norms);
        let norms: Vec<f64> = norm_order.iter().map(|&i| norms[i]).collect();

        let d = lambda.len();
        let k = norms.len();
        let zeros = lambda.iter().filter(|&&l| l == 0.0).count();
        if zeros > k {
            return Err(Error::InvalidProblem(format!(
                "d − rank = {zeros} exceeds the number of added vectors k = {k}"
            )));
        }
        debug_assert!(d >= 1);

        Ok(ProblemData {
            lambda_prefix: prefix_sums(&lambda),
            norms_prefix: prefix_sums(&norms),
            lambda,
            norms,
            norm_order,
            tol,
        })
    }

    /// `λ`, ascending.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `a`, descending.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Input positions of the sorted norms.
    pub fn norm_order(&self) -> &[usize] {
        &self.norm_order
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn d(&self) -> usize {
        self.lambda.len()
    }

    pub fn k(&self) -> usize {
        self.norms.len()
    }

    /// `m = d − k`.
    pub fn m(&self) -> isize {
        self.d() as isize - self.k() as isize
    }

    /// `t = tr λ + tr a`.
    pub fn total(&self) -> f64 {
        self.lambda_prefix[self.d()] + self.norms_prefix[self.k()]
    }

    /// `h_i = λ_i + a_i` for `i ≤ min(d, k)` (1-based `i`).
    pub fn h(&self, i: usize) -> f64 {
        self.lambda[i - 1] + self.norms[i - 1]
    }

    /// Absolute tolerance scaled to the size of the data.
    fn scaled_tol(&self) -> f64 {
        let scale = self.lambda[self.d() - 1].max(self.norms[0]).max(1.0);
        self.tol * scale
    }

    fn truncate_lambda(&self, k: usize) -> ProblemData {
        let lambda = self.lambda[..k].to_vec();
        ProblemData {
            lambda_prefix: prefix_sums(&lambda),
            lambda,
            norms: self.norms.clone(),
            norm_order: self.norm_order.clone(),
            norms_prefix: self.norms_prefix.clone(),
            tol: self.tol,
        }
    }

    fn require_k_ge_d(&self) -> Result<()> {
        if self.k() < self.d() {
            return Err(Error::InvalidProblem(format!(
                "operation requires k ≥ d (k = {}, d = {})",
                self.k(),
                self.d()
            )));
        }
        Ok(())
    }

    /// Sum of `λ_{j+1..=r}` (1-based, `j ≤ r ≤ d`).
    fn lambda_sum(&self, j: usize, r: usize) -> f64 {
        self.lambda_prefix[r] - self.lambda_prefix[j]
    }

    fn norms_sum(&self, j: usize, r: usize) -> f64 {
        self.norms_prefix[r] - self.norms_prefix[j]
    }

    fn q_unchecked(&self, j: usize, r: usize) -> f64 {
        (self.norms_sum(j, self.k()) + self.lambda_sum(j, r)) / (r - j) as f64
    }

    fn p_unchecked(&self, j: usize, r: usize) -> f64 {
        (self.lambda_sum(j - 1, r) + self.norms_sum(j - 1, r)) / (r - j + 1) as f64
    }
}

fn prefix_sums(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for &v in x {
        acc += v;
        out.push(acc);
    }
    out
}

/// Final average `Q_{j,r} = (Σ_{i>j} a_i + Σ_{j<i≤r} λ_i) / (r − j)`.
/// Requires `k ≥ d` and `0 ≤ j < r ≤ d`.
pub fn final_average(pd: &ProblemData, j: usize, r: usize) -> Result<f64> {
    pd.require_k_ge_d()?;
    if !(j < r && r <= pd.d()) {
        return Err(Error::IndexOutOfRange(format!(
            "Q_{{{j},{r}}} needs 0 ≤ j < r ≤ d = {}",
            pd.d()
        )));
    }
    Ok(pd.q_unchecked(j, r))
}

/// Initial average `P_{j,r} = mean of h_j..=h_r`. Requires
/// `1 ≤ j ≤ r ≤ min(d, k)`.
pub fn initial_average(pd: &ProblemData, j: usize, r: usize) -> Result<f64> {
    let top = pd.d().min(pd.k());
    if !(1 <= j && j <= r && r <= top) {
        return Err(Error::IndexOutOfRange(format!(
            "P_{{{j},{r}}} needs 1 ≤ j ≤ r ≤ min(d, k) = {top}"
        )));
    }
    Ok(pd.p_unchecked(j, r))
}

/// The feasible-case spectrum of a (possibly truncated) pair with `k ≥ d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSpectrum {
    /// Number of leading entries set to `constant` (`= d` in the uniform case).
    pub cut_index: usize,
    pub constant: f64,
    /// `(c·1_s, λ_{s+1}, …, λ_d)`, ascending.
    pub result: Vec<f64>,
}

/// Feasible-case computation on the truncation starting after `offset`.
/// `cut_index` is reported in the coordinates of the full problem.
fn feasible_from(pd: &ProblemData, offset: usize) -> Result<FeasibleSpectrum> {
    let d = pd.d();
    let n = d - offset;
    let t = pd.norms_sum(offset, pd.k()) + pd.lambda_sum(offset, d);
    let uniform = t / n as f64;
    if uniform >= pd.lambda[d - 1] {
        return Ok(FeasibleSpectrum {
            cut_index: d,
            constant: uniform,
            result: vec![uniform; n],
        });
    }
    let tol = pd.scaled_tol();
    let mut best = f64::INFINITY;
    for r in offset + 1..=d {
        best = best.min(pd.q_unchecked(offset, r));
    }
    // largest index attaining the minimum
    let cut = (offset + 1..d)
        .rev()
        .find(|&r| pd.q_unchecked(offset, r) <= best + tol)
        .ok_or_else(|| Error::Inconsistent("no final average attains the minimum".into()))?;
    let c = pd.q_unchecked(offset, cut);
    let lower = pd.lambda[cut - 1];
    let upper = pd.lambda[cut];
    if !(lower <= c + tol && c < upper + tol) {
        return Err(Error::Inconsistent(format!(
            "bracketing λ_s ≤ Q_s < λ_(s+1) failed at s = {cut}: {lower} ≤ {c} < {upper}"
        )));
    }
    let mut result = vec![c; cut - offset];
    result.extend_from_slice(&pd.lambda[cut..]);
    Ok(FeasibleSpectrum {
        cut_index: cut,
        constant: c,
        result,
    })
}

/// `ν(λ, a)` for `k ≥ d`.
pub fn feasible_case_spectrum(pd: &ProblemData) -> Result<FeasibleSpectrum> {
    pd.require_k_ge_d()?;
    feasible_from(pd, 0)
}

/// `ν(λ, a)` for any `k`; when `k < d` the last `d − k` eigenvalues are
/// kept unchanged.
pub fn feasible_spectrum_general(pd: &ProblemData) -> Result<Vec<f64>> {
    if pd.k() >= pd.d() {
        return Ok(feasible_case_spectrum(pd)?.result);
    }
    let head = pd.truncate_lambda(pd.k());
    let mut nu = feasible_case_spectrum(&head)?.result;
    nu.extend_from_slice(&pd.lambda[pd.k()..]);
    Ok(nu)
}

/// `μ(λ, a) = ν(λ, a) − λ`.
pub fn mu_of(pd: &ProblemData) -> Result<Vec<f64>> {
    let nu = feasible_spectrum_general(pd)?;
    Ok(nu
        .iter()
        .zip(&pd.lambda)
        .map(|(n, l)| (n - l).max(0.0))
        .collect())
}

/// `(λ, a)` is feasible when `a ≺ μ(λ, a)`.
pub fn is_feasible(pd: &ProblemData) -> Result<bool> {
    let mu = mu_of(pd)?;
    Ok(majorizes(
        &pd.norms,
        &mu,
        pd.scaled_tol() * pd.k().max(pd.d()) as f64,
    ))
}

/// Feasibility of the truncation after `offset` without re-sorting:
/// `μ = (c − λ_i)_{i ≤ cut}` padded with zeros is already decreasing.
fn truncation_feasible(pd: &ProblemData, offset: usize) -> Result<bool> {
    let fs = feasible_from(pd, offset)?;
    let tol = pd.scaled_tol() * (pd.k() - offset) as f64;
    let (mut sa, mut smu) = (0.0, 0.0);
    for (i, &a) in pd.norms[offset..].iter().enumerate() {
        let idx = offset + i;
        sa += a;
        if idx < fs.cut_index {
            smu += (fs.constant - pd.lambda[idx]).max(0.0);
        }
        if sa > smu + tol {
            return Ok(false);
        }
    }
    Ok((sa - smu).abs() <= tol)
}

/// Index `s` is feasible when `(λ^s, a^s) = ((λ_{s+1..d}), (a_{s+1..k}))`
/// is a feasible pair. Requires `k ≥ d` and `s < d`.
pub fn is_feasible_index(pd: &ProblemData, s: usize) -> Result<bool> {
    pd.require_k_ge_d()?;
    if s >= pd.d() {
        return Err(Error::IndexOutOfRange(format!(
            "feasible index needs s < d = {}, got {s}",
            pd.d()
        )));
    }
    truncation_feasible(pd, s)
}

/// `s*`, the least feasible index (where the last block starts).
pub fn min_feasible_index(pd: &ProblemData) -> Result<usize> {
    pd.require_k_ge_d()?;
    for s in 0..pd.d() {
        if truncation_feasible(pd, s)? {
            return Ok(s);
        }
    }
    Err(Error::Inconsistent(
        "no feasible index found, even s = d − 1".into(),
    ))
}

/// One constant block `s_{j−1}+1 ..= s_j` of `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// First index, 1-based.
    pub start: usize,
    /// Last index, 1-based and inclusive.
    pub end: usize,
    pub constant: f64,
}

/// `ν_f(λ, a)` as constant blocks followed by untouched eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectrum {
    /// `0 = s_0 < s_1 < … < s_p`.
    pub block_ends: Vec<usize>,
    /// `c_1 > c_2 > … > c_p > 0`.
    pub constants: Vec<f64>,
    /// `(λ_{s_p+1}, …, λ_d)`.
    pub tail: Vec<f64>,
    /// `s* = s_{p−1}`; zero exactly when the pair is feasible.
    pub feasible_start: usize,
    /// Adjacent block constants closer than ten tolerances.
    pub near_ties: Vec<usize>,
}

impl BlockSpectrum {
    /// Number of blocks `p`.
    pub fn p(&self) -> usize {
        self.constants.len()
    }

    pub fn blocks(&self) -> Vec<Block> {
        self.block_ends
            .windows(2)
            .zip(&self.constants)
            .map(|(w, &c)| Block {
                start: w[0] + 1,
                end: w[1],
                constant: c,
            })
            .collect()
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_start == 0
    }

    /// `(c_1·1_{s_1}, …, c_p·1_{s_p − s_{p−1}}, tail)`, aligned with `λ`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for (w, &c) in self.block_ends.windows(2).zip(&self.constants) {
            out.extend(std::iter::repeat_n(c, w[1] - w[0]));
        }
        out.extend_from_slice(&self.tail);
        out
    }

    pub fn len(&self) -> usize {
        self.block_ends.last().copied().unwrap_or(0) + self.tail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ν↓`.
    pub fn desc(&self) -> Vec<f64> {
        crate::majorization::sort_desc(&self.flatten())
    }

    /// `μ = ν − λ` for the ascending `λ` the spectrum was computed from.
    pub fn mu(&self, lambda: &[f64]) -> Vec<f64> {
        self.flatten()
            .iter()
            .zip(lambda)
            .map(|(n, l)| (n - l).max(0.0))
            .collect()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.flatten())
    }
}

/// `ν_f(λ, a)`: the majorization-minimal spectrum of an optimal completion.
/// It does not depend on the potential.
pub fn optimal_spectrum(pd: &ProblemData) -> Result<BlockSpectrum> {
    if pd.k() < pd.d() {
        let head = pd.truncate_lambda(pd.k());
        let mut nu = optimal_spectrum(&head)?;
        nu.tail.extend_from_slice(&pd.lambda[pd.k()..]);
        return Ok(nu);
    }

    let tol = pd.scaled_tol();
    let s_star = min_feasible_index(pd)?;
    let mut block_ends = vec![0];
    let mut constants = Vec::new();
    let mut current = 0;
    while current < s_star {
        let j = current + 1;
        let best = (j..=s_star)
            .map(|r| pd.p_unchecked(j, r))
            .fold(f64::NEG_INFINITY, f64::max);
        let end = (j..=s_star)
            .rev()
            .find(|&r| pd.p_unchecked(j, r) >= best - tol)
            .expect("range is nonempty");
        constants.push(pd.p_unchecked(j, end));
        block_ends.push(end);
        current = end;
    }

    let last = feasible_from(pd, s_star)?;
    constants.push(last.constant);
    block_ends.push(last.cut_index);

    let mut near_ties = Vec::new();
    for (i, w) in constants.windows(2).enumerate() {
        if w[1] > w[0] + tol {
            return Err(Error::Inconsistent(format!(
                "block constants increase: c_{} = {} < c_{} = {}",
                i + 1,
                w[0],
                i + 2,
                w[1]
            )));
        }
        if w[0] - w[1] <= 10.0 * tol {
            near_ties.push(i + 1);
        }
    }

    Ok(BlockSpectrum {
        tail: pd.lambda[last.cut_index..].to_vec(),
        block_ends,
        constants,
        feasible_start: s_star,
        near_ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::{entrywise_leq, majorizes};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pd(lambda: &[f64], norms: &[f64]) -> ProblemData {
        ProblemData::new(lambda, norms).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn construction_sorts_and_validates() {
        let p = pd(&[10.0, 0.0, 0.0], &[1.0, 6.0, 1.0]);
        assert_eq!(p.lambda(), &[0.0, 0.0, 10.0]);
        assert_eq!(p.norms(), &[6.0, 1.0, 1.0]);
        assert_eq!(p.norm_order(), &[1, 0, 2]);
        assert_eq!(p.total(), 18.0);
        assert_eq!(p.m(), 0);

        assert!(ProblemData::new(&[0.0], &[-1.0]).is_err());
        assert!(ProblemData::new(&[0.0], &[0.0]).is_err());
        assert!(ProblemData::new(&[-1.0, 2.0], &[1.0]).is_err());
        // three zero eigenvalues, two vectors
        assert!(matches!(
            ProblemData::new(&[0.0, 0.0, 0.0, 1.0], &[1.0, 1.0]),
            Err(Error::InvalidProblem(_))
        ));
        assert!(ProblemData::new(&[0.0, 0.0, 1.0], &[1.0, 1.0]).is_ok());
    }

    #[test]
    fn final_averages() {
        let p = pd(&[0.0, 0.0], &[3.0, 1.0]);
        assert_eq!(final_average(&p, 0, 1).unwrap(), 4.0);
        assert_eq!(final_average(&p, 0, 2).unwrap(), 2.0);
        let p = pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0]);
        assert_eq!(final_average(&p, 1, 2).unwrap(), 2.0);
        assert!(final_average(&p, 2, 2).is_err());
        assert!(final_average(&p, 0, 4).is_err());
        // k < d
        assert!(final_average(&pd(&[0.0, 1.0, 2.0], &[1.0, 1.0]), 0, 1).is_err());
    }

    #[test]
    fn initial_averages() {
        let p = pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0]);
        assert_eq!(initial_average(&p, 1, 1).unwrap(), 6.0);
        let p2 = pd(&[1.0, 5.0], &[2.0, 2.0]);
        assert_eq!(initial_average(&p2, 1, 2).unwrap(), 5.0);
        for j in 1..=3 {
            assert_eq!(initial_average(&p, j, j).unwrap(), p.h(j));
        }
        assert!(initial_average(&p, 0, 1).is_err());
        assert!(initial_average(&p, 2, 1).is_err());
        assert!(initial_average(&p, 1, 4).is_err());
    }

    /// Every `(s, c)` with `c = Q_s` and `λ_s ≤ c < λ_{s+1}` for this data.
    fn bracketing_pairs(p: &ProblemData) -> Vec<(usize, f64)> {
        let l = p.lambda();
        let t = p.total();
        (1..p.d())
            .filter_map(|s| {
                let c = (t - l[s..].iter().sum::<f64>()) / s as f64;
                (l[s - 1] <= c && c < l[s]).then_some((s, c))
            })
            .collect()
    }

    #[test]
    fn feasible_case_examples() {
        let zero = pd(&[0.0; 4], &[3.0, 2.0, 2.0, 1.0, 0.5]);
        let fs = feasible_case_spectrum(&zero).unwrap();
        assert_eq!(fs.cut_index, 4);
        assert!(close(&fs.result, &[8.5 / 4.0; 4], 1e-15));

        let p = pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0]);
        assert_eq!(bracketing_pairs(&p), vec![(2, 4.0)]);
        let fs = feasible_case_spectrum(&p).unwrap();
        assert_eq!((fs.cut_index, fs.constant), (2, 4.0));
        assert_eq!(fs.result, vec![4.0, 4.0, 10.0]);

        let p = pd(&[1.0, 5.0], &[2.0, 2.0]);
        let fs = feasible_case_spectrum(&p).unwrap();
        assert_eq!(fs.result, vec![5.0, 5.0]);
        assert!(entrywise_leq(p.lambda(), &fs.result).unwrap());
        assert_eq!(trace(&fs.result), p.total());

        assert!(feasible_case_spectrum(&pd(&[0.0, 1.0, 2.0], &[1.0, 1.0])).is_err());
    }

    #[test]
    fn feasible_general_reduction() {
        let p = pd(&[0.0, 0.0, 9.0], &[1.0, 1.0]);
        let nu = feasible_spectrum_general(&p).unwrap();
        assert_eq!(nu, vec![1.0, 1.0, 9.0]);
        assert!(entrywise_leq(p.lambda(), &nu).unwrap());
        assert_eq!(trace(&nu), p.total());

        let p = pd(&[0.5, 1.0, 3.0], &[2.0, 1.0, 1.0]);
        assert_eq!(
            feasible_spectrum_general(&p).unwrap(),
            feasible_case_spectrum(&p).unwrap().result
        );
    }

    #[test]
    fn mu_examples() {
        assert_eq!(
            mu_of(&pd(&[1.0, 5.0], &[2.0, 2.0])).unwrap(),
            vec![4.0, 0.0]
        );
        assert_eq!(
            mu_of(&pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0])).unwrap(),
            vec![4.0, 4.0, 0.0]
        );
        let mu = mu_of(&pd(&[0.0; 3], &[2.0, 2.0, 1.0, 1.0])).unwrap();
        assert!(close(&mu, &[2.0; 3], 1e-15));
    }

    #[test]
    fn feasibility() {
        assert!(is_feasible(&pd(&[1.0, 5.0], &[2.0, 2.0])).unwrap());
        assert!(!is_feasible(&pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0])).unwrap());
        assert!(is_feasible(&pd(&[0.0; 3], &[1.5; 5])).unwrap());
    }

    #[test]
    fn feasible_indexes() {
        let p = pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0]);
        assert_eq!(is_feasible_index(&p, 0).unwrap(), is_feasible(&p).unwrap());
        assert!(is_feasible_index(&p, 1).unwrap());
        assert!(is_feasible_index(&p, 2).unwrap());
        assert!(is_feasible_index(&p, 3).is_err());

        let feasible = pd(&[1.0, 5.0], &[2.0, 2.0]);
        assert_eq!(
            is_feasible_index(&feasible, 0).unwrap(),
            is_feasible(&feasible).unwrap()
        );

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let d = rng.gen_range(1..6);
            let k = rng.gen_range(d..d + 4);
            let lambda: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..5.0)).collect();
            let norms: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..5.0)).collect();
            let p = pd(&lambda, &norms);
            assert!(is_feasible_index(&p, d - 1).unwrap());
            let tail = &p.norms()[d - 1..];
            assert!(majorizes(tail, &[tail.iter().sum::<f64>()], 1e-12));
        }
    }

    #[test]
    fn min_feasible_index_examples() {
        assert_eq!(
            min_feasible_index(&pd(&[1.0, 5.0], &[2.0, 2.0])).unwrap(),
            0
        );
        assert_eq!(
            min_feasible_index(&pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0])).unwrap(),
            1
        );
        assert_eq!(
            min_feasible_index(&pd(&[0.0, 0.0], &[3.0, 1.0])).unwrap(),
            1
        );
    }

    #[test]
    fn optimal_spectrum_examples() {
        let nu = optimal_spectrum(&pd(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0])).unwrap();
        assert_eq!(nu.block_ends, vec![0, 1, 2]);
        assert_eq!(nu.constants, vec![6.0, 2.0]);
        assert_eq!(nu.tail, vec![10.0]);
        assert_eq!(nu.flatten(), vec![6.0, 2.0, 10.0]);
        assert_eq!(nu.desc(), vec![10.0, 6.0, 2.0]);
        assert_eq!(nu.feasible_start, 1);

        let nu = optimal_spectrum(&pd(&[0.0, 0.0], &[3.0, 1.0])).unwrap();
        assert_eq!(nu.flatten(), vec![3.0, 1.0]);
        assert_eq!(nu.p(), 2);

        let p = pd(&[1.0, 5.0], &[2.0, 2.0]);
        let nu = optimal_spectrum(&p).unwrap();
        assert_eq!(nu.p(), 1);
        assert!(nu.is_feasible());
        assert_eq!(nu.flatten(), feasible_spectrum_general(&p).unwrap());

        // three forced blocks plus a final one
        let nu = optimal_spectrum(&pd(&[0.0; 3], &[5.0, 4.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(nu.flatten(), vec![5.0, 4.0, 3.0]);
        assert_eq!(nu.p(), 3);
    }

    #[test]
    fn optimal_spectrum_with_more_eigenvalues_than_vectors() {
        let p = pd(&[0.0, 0.0, 9.0], &[1.0, 1.0]);
        let nu = optimal_spectrum(&p).unwrap();
        assert_eq!(nu.flatten(), vec![1.0, 1.0, 9.0]);
        assert_eq!(*nu.flatten().last().unwrap(), 9.0);
    }

    fn random_instance(rng: &mut ChaCha8Rng, dmax: usize, kextra: usize) -> ProblemData {
        let d = rng.gen_range(1..=dmax);
        let k = rng.gen_range(d..=d + kextra);
        let lambda: Vec<f64> = (0..d)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(0.0..10.0)
                }
            })
            .collect();
        let norms: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..8.0)).collect();
        pd(&lambda, &norms)
    }

    #[test]
    fn structural_invariants_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let p = random_instance(&mut rng, 7, 4);
            let nu = optimal_spectrum(&p).unwrap();
            let flat = nu.flatten();
            let tol = 1e-9 * (1.0 + p.total());
            assert!((trace(&flat) - p.total()).abs() <= tol);
            assert!(
                nu.constants.windows(2).all(|w| w[0] > w[1] + 1e-9),
                "{nu:?}"
            );
            let mu = nu.mu(p.lambda());
            assert!(mu.windows(2).all(|w| w[0] >= w[1] - 1e-9), "mu {mu:?}");
            assert!(majorizes(p.norms(), &mu, 1e-8 * (1.0 + p.total())));
            for (r, w) in nu.block_ends.windows(2).enumerate() {
                if r + 1 < nu.p() {
                    let c = nu.constants[r];
                    assert!((c - initial_average(&p, w[0] + 1, w[1]).unwrap()).abs() < 1e-12);
                    for j in w[0] + 1..=w[1] {
                        assert!(c >= initial_average(&p, w[0] + 1, j).unwrap() - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn final_average_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let p = random_instance(&mut rng, 8, 3);
            let d = p.d();
            for r in 1..d {
                let qr = final_average(&p, 0, r).unwrap();
                if qr < p.lambda()[r] {
                    for j in r + 1..=d {
                        assert!(qr < final_average(&p, 0, j).unwrap() + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn bracketed_branch_is_unique() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let p = random_instance(&mut rng, 6, 3);
            let fs = feasible_case_spectrum(&p).unwrap();
            if fs.cut_index < p.d() {
                let pairs = bracketing_pairs(&p);
                assert_eq!(pairs.len(), 1, "{pairs:?}");
                assert_eq!(pairs[0].0, fs.cut_index);
                assert!((pairs[0].1 - fs.constant).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn near_ties_are_reported() {
        let p = pd(&[0.0, 0.0], &[1.0 + 5e-9, 1.0]);
        let nu = optimal_spectrum(&p).unwrap();
        assert_eq!(nu.p(), 2);
        assert_eq!(nu.near_ties, vec![1]);
        // a gap below the feasibility tolerance collapses to one block
        let p = pd(&[0.0, 0.0], &[1.0 + 1e-10, 1.0]);
        assert_eq!(optimal_spectrum(&p).unwrap().p(), 1);
        assert!(optimal_spectrum(&pd(&[0.0, 0.0], &[3.0, 1.0]))
            .unwrap()
            .near_ties
            .is_empty());
    }
}
