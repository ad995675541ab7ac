//! Independent checks of the solver and the synthesized completions.
//!
//! Nothing here calls into [`crate::solver`]: the brute-force minimizer
//! searches `Γ_d(a) = {γ = γ↓ ≥ 0 : a ≺ γ}` directly, so agreement with the
//! solver is evidence rather than tautology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::majorization::{majorizes, sort_asc, sort_desc, trace};
use crate::potentials::{eval_vector, PotentialSpec};
use crate::solver::{BlockSpectrum, ProblemData};
use crate::spectral::{eigh_ascending, frame_operator, gram, inner, norm_sqr, VectorSequence};

/// Rejection attempts per sample before falling back to a spreading walk.
const REJECTION_ATTEMPTS: usize = 16;
/// Smallest transfer tried by the local refinement, relative to `tr a`.
const REFINE_MIN_STEP: f64 = 1e-7;
/// Number of best sampled candidates that get refined.
const REFINE_STARTS: usize = 4;
/// Relative gap below which eigenvalues are merged into one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

fn membership_tol(norms: &[f64]) -> f64 {
    1e-9 * (1.0 + trace(norms)) * norms.len() as f64
}

/// Deterministic sampler of `Γ_d(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSampler {
    norms: Vec<f64>,
    dim: usize,
    pub seed: u64,
    pub count: usize,
}

impl GammaSampler {
    pub fn new(norms: &[f64], dim: usize, seed: u64, count: usize) -> Self {
        GammaSampler {
            norms: sort_desc(norms),
            dim,
            seed,
            count,
        }
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A fixed member of `Γ_d(a)`: `a↓` zero padded when `k ≤ d`, otherwise
    /// `a↓` with its last `k − d + 1` entries merged into one.
    pub fn anchor(&self) -> Vec<f64> {
        let d = self.dim;
        let mut g: Vec<f64> = if self.norms.len() <= d {
            let mut g = self.norms.clone();
            g.resize(d, 0.0);
            g
        } else {
            let mut g = self.norms[..d - 1].to_vec();
            g.push(self.norms[d - 1..].iter().sum());
            g
        };
        g = sort_desc(&g);
        g
    }

    pub fn contains(&self, gamma: &[f64]) -> bool {
        gamma.len() == self.dim
            && gamma.iter().all(|&g| g >= 0.0)
            && gamma.windows(2).all(|w| w[0] >= w[1])
            && majorizes(&self.norms, gamma, membership_tol(&self.norms))
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Uniform point of the simplex `{γ ≥ 0, tr γ = tr a}`, sorted.
    fn simplex_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let w: Vec<f64> = (0..self.dim)
            .map(|_| -rng.gen::<f64>().max(1e-300).ln())
            .collect();
        let total = trace(&w);
        let mass = trace(&self.norms);
        sort_desc(&w.iter().map(|x| x / total * mass).collect::<Vec<_>>())
    }

    /// Moves mass from smaller to larger entries, which can only move the
    /// vector up in the majorization order.
    fn spread(&self, start: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let d = self.dim;
        let mut g = start.to_vec();
        if d < 2 {
            return g;
        }
        let steps = rng.gen_range(1..=2 * d);
        for _ in 0..steps {
            let i = rng.gen_range(0..d - 1);
            let j = rng.gen_range(i + 1..d);
            let moved = g[j] * rng.gen::<f64>();
            g[i] += moved;
            g[j] -= moved;
            g = sort_desc(&g);
        }
        g
    }

    fn rejection(&self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        (0..REJECTION_ATTEMPTS)
            .map(|_| self.simplex_point(rng))
            .find(|g| self.contains(g))
    }

    /// Pulls a sorted simplex point `x` toward the anchor until it enters
    /// `Γ_d(a)`, then picks a uniform weight between there and the anchor.
    fn lift(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let anchor = self.anchor();
        let (mut sx, mut sg, mut sa) = (0.0, 0.0, 0.0);
        let mut w_min = 0.0f64;
        for m in 0..self.dim.saturating_sub(1) {
            sx += x[m];
            sg += anchor[m];
            sa += self.norms.get(m).copied().unwrap_or(0.0);
            if sx < sa && sg > sx {
                w_min = w_min.max((sa - sx) / (sg - sx));
            }
        }
        let w = w_min + (1.0 - w_min) * rng.gen::<f64>();
        sort_desc(
            &anchor
                .iter()
                .zip(x)
                .map(|(g, x)| w * g + (1.0 - w) * x)
                .collect::<Vec<_>>(),
        )
    }

    fn rejection_or_lift(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self.rejection(rng) {
            Some(g) => g,
            None => {
                let x = self.simplex_point(rng);
                self.lift(&x, rng)
            }
        }
    }

    /// The `index`-th sample; depends only on `(seed, index)`.
    pub fn draw(&self, index: usize) -> Vec<f64> {
        let anchor = self.anchor();
        if index == 0 {
            return anchor;
        }
        let mut rng = self.rng(index);
        let candidate = match index % 3 {
            0 => self.spread(&anchor, &mut rng),
            1 => self.rejection_or_lift(&mut rng),
            _ => {
                // Γ_d(a) is convex, so mixing two members stays inside.
                let x = self.rejection_or_lift(&mut rng);
                let y = self.spread(&anchor, &mut rng);
                let w: f64 = rng.gen();
                sort_desc(
                    &x.iter()
                        .zip(&y)
                        .map(|(x, y)| w * x + (1.0 - w) * y)
                        .collect::<Vec<_>>(),
                )
            }
        };
        if self.contains(&candidate) {
            candidate
        } else {
            anchor
        }
    }

    pub fn sample(&self) -> Vec<Vec<f64>> {
        (0..self.count)
            .into_par_iter()
            .map(|i| self.draw(i))
            .collect()
    }
}

/// `count` members of `Γ_d(a)`, the first one being [`GammaSampler::anchor`].
pub fn sample_gamma(gs: &GammaSampler) -> Vec<Vec<f64>> {
    gs.sample()
}

/// Best point found by [`brute_force_min`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMin {
    /// `γ*`, decreasing.
    pub gamma: Vec<f64>,
    /// `λ↑ + γ*`.
    pub point: Vec<f64>,
    /// `F(λ↑ + γ*)`.
    pub value: f64,
    /// Gap between `value` and the best sampled value whose `γ` differs
    /// from `γ*` by more than `1e-3` in `ℓ∞`; `None` if every sample is close.
    pub runner_up_gap: Option<f64>,
}

fn objective(f: &PotentialSpec, lambda: &[f64], gamma: &[f64]) -> f64 {
    let point: Vec<f64> = lambda.iter().zip(gamma).map(|(l, g)| l + g).collect();
    eval_vector(f, &point).unwrap_or(f64::INFINITY)
}

/// Pairwise transfers `γ_i −= ε, γ_j += ε` kept while they lower `F` and
/// stay in `Γ_d(a)`; `ε` is halved whenever no transfer helps.
fn refine(
    sampler: &GammaSampler,
    f: &PotentialSpec,
    lambda: &[f64],
    start: Vec<f64>,
) -> (Vec<f64>, f64) {
    let d = lambda.len();
    let mass = trace(sampler.norms()).max(1.0);
    let mut gamma = start;
    let mut value = objective(f, lambda, &gamma);
    let mut step = 0.5 * gamma.first().copied().unwrap_or(0.0).max(mass / d as f64);
    let min_step = REFINE_MIN_STEP * mass;
    while step >= min_step {
        let mut improved = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || gamma[i] < step {
                    continue;
                }
                let mut trial = gamma.clone();
                trial[i] -= step;
                trial[j] += step;
                let trial = sort_desc(&trial);
                if !sampler.contains(&trial) {
                    continue;
                }
                let v = objective(f, lambda, &trial);
                if v < value {
                    gamma = trial;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (gamma, value)
}

/// Upper-bound certificate for `min_{γ ∈ Γ_d(a)} F(λ + γ)`: samples
/// `budget` members of `Γ_d(a)` (just the anchor when `budget = 0`) and
/// refines the best few by local descent.
pub fn brute_force_min(pd: &ProblemData, f: &PotentialSpec, budget: usize, seed: u64) -> OracleMin {
    let lambda = pd.lambda();
    let sampler = GammaSampler::new(pd.norms(), pd.d(), seed, budget.max(1));
    let samples = sampler.sample();
    let mut scored: Vec<(usize, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, g)| (i, objective(f, lambda, g)))
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let starts: Vec<usize> = scored.iter().take(REFINE_STARTS).map(|&(i, _)| i).collect();
    let refined: Vec<(usize, Vec<f64>, f64)> = starts
        .par_iter()
        .map(|&i| {
            let (g, v) = refine(&sampler, f, lambda, samples[i].clone());
            (i, g, v)
        })
        .collect();
    let (_, gamma, value) = refined
        .into_iter()
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let runner_up_gap = scored
        .iter()
        .find(|&&(i, _)| {
            samples[i]
                .iter()
                .zip(&gamma)
                .any(|(x, y)| (x - y).abs() > 1e-3)
        })
        .map(|&(_, v)| v - value);
    let point = lambda.iter().zip(&gamma).map(|(l, g)| l + g).collect();
    OracleMin {
        gamma,
        point,
        value,
        runner_up_gap,
    }
}

/// Outcome of [`majorization_spot_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheck {
    pub samples: usize,
    pub failures: usize,
    /// Largest violation of a partial-sum inequality over all samples.
    pub worst_violation: f64,
}

impl SpotCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// `ν↓ ≺ (λ↑ + γ)↓` for `samples` sampled `γ ∈ Γ_d(a)`, with details.
pub fn majorization_spot_check(
    nu: &[f64],
    pd: &ProblemData,
    samples: usize,
    seed: u64,
) -> SpotCheck {
    let lambda = pd.lambda();
    let sampler = GammaSampler::new(pd.norms(), pd.d(), seed, samples);
    let tol = 1e-9 * (1.0 + pd.total()) * pd.d() as f64;
    let nu_desc = sort_desc(nu);
    let violations: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = sampler.draw(i);
            let point: Vec<f64> = lambda.iter().zip(&g).map(|(l, g)| l + g).collect();
            prefix_violation(&nu_desc, &sort_desc(&point))
        })
        .collect();
    SpotCheck {
        samples,
        failures: violations.iter().filter(|&&v| v > tol).count(),
        worst_violation: violations.iter().copied().fold(0.0, f64::max),
    }
}

/// Largest amount by which a prefix sum of `x` exceeds that of `y`, or the
/// trace gap, whichever is larger (both sorted decreasing).
fn prefix_violation(x: &[f64], y: &[f64]) -> f64 {
    let (mut sx, mut sy, mut worst) = (0.0, 0.0, 0.0f64);
    for (a, b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        worst = worst.max(sx - sy);
    }
    worst.max((sx - sy).abs())
}

/// `ν↓ ≺ (λ↑ + γ)↓` for every sampled `γ ∈ Γ_d(a)`.
pub fn check_majorization_min(
    nu: &BlockSpectrum,
    pd: &ProblemData,
    samples: usize,
    seed: u64,
) -> bool {
    majorization_spot_check(&nu.flatten(), pd, samples, seed).passed()
}

/// One named pass/fail check of a [`StructureReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Structural audit of a completion `F = (F0, G)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    /// Distinct eigenvalues `c_1 > … > c_p` of `S_F` carried by `G`.
    pub constants: Vec<f64>,
    /// `J_j`: indexes of `G` (input order, 0-based) with `S_F g_i = c_j g_i`.
    pub j_blocks: Vec<Vec<usize>>,
    /// `K_j`: indexes of `λ↑(S_{F0})` (0-based) with `λ_i + μ_i = c_j`.
    pub k_blocks: Vec<Vec<usize>>,
    /// `s_F = rk S_G`.
    pub rank_g: usize,
    /// `‖S_F g_i − c g_i‖ / ‖g_i‖` per vector, input order.
    pub eigen_residuals: Vec<f64>,
    /// Smallest gap between consecutive constants.
    pub constant_margin: f64,
    /// `min (a_h − a_l) − (c_i − c_r)` over `h ∈ J_i, l ∈ J_r, i < r`.
    pub norm_gap_margin: f64,
    /// Numerical rank of each `{g_i}_{i ∈ J_j}`.
    pub block_ranks: Vec<usize>,
    /// `‖S_{F0} S_G − S_G S_{F0}‖_max`.
    pub commutator: f64,
    /// `J` and `K` are disjoint and cover `I_k` and `I_{s_F}`.
    pub partitions_ok: bool,
    pub checks: Vec<AuditCheck>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.partitions_ok && self.checks.iter().all(|c| c.passed)
    }

    pub fn p(&self) -> usize {
        self.constants.len()
    }
}

fn cluster(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    // returns cluster means (decreasing) and the label of every value
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut labels = vec![0; values.len()];
    let mut groups: Vec<Vec<f64>> = Vec::new();
    let mut prev: Option<f64> = None;
    for &i in &order {
        let v = values[i];
        let split = match prev {
            None => true,
            Some(p) => p - v > CLUSTER_GAP * p.abs().max(1.0),
        };
        if split {
            groups.push(Vec::new());
        }
        groups.last_mut().expect("group exists").push(v);
        labels[i] = groups.len() - 1;
        prev = Some(v);
    }
    let means = groups.iter().map(|g| trace(g) / g.len() as f64).collect();
    (means, labels)
}

/// Audits the structure every optimal completion must have: each `g_i` is
/// an eigenvector of `S_F`; the eigenvalues `c_j` are distinct; the `J_j`
/// are consecutive when `G` is ordered by decreasing norm; the norm gaps
/// dominate the constant gaps; all but the last block are linearly
/// independent; and `S_{F0}` commutes with `S_G`.
pub fn audit_structure(
    f0: &VectorSequence,
    g: &VectorSequence,
    tol: f64,
) -> Result<StructureReport> {
    let s0 = frame_operator(f0);
    let sg = frame_operator(g);
    let sf = s0.add(&sg)?;
    let scale = 1.0 + sf.max_abs();
    let norms = g.squared_norms();
    let k = g.len();

    // (i) eigenvector residuals
    let mut rayleigh = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for v in g.vectors() {
        let nv = norm_sqr(v);
        let sv = sf.mul_vec(v);
        let c = inner(&sv, v).re / nv;
        let res: f64 = sv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b * c).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / nv.sqrt();
        rayleigh.push(c);
        residuals.push(res);
    }
    let worst_residual = residuals.iter().copied().fold(0.0, f64::max);
    let eigen_ok = worst_residual <= tol * scale;

    let (constants, labels) = cluster(&rayleigh);
    let p = constants.len();
    let mut j_blocks = vec![Vec::new(); p];
    for (i, &l) in labels.iter().enumerate() {
        j_blocks[l].push(i);
    }

    // (ii) distinct, decreasing constants
    let constant_margin = constants
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    let distinct_ok = constants.windows(2).all(|w| w[0] - w[1] > tol * scale);

    // (iii) consecutive blocks in decreasing-norm order
    let mut by_norm: Vec<usize> = (0..k).collect();
    by_norm.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let consecutive_ok = by_norm.windows(2).all(|w| labels[w[0]] <= labels[w[1]]);

    // (iv) a_h − a_l ≥ c_i − c_r for h ∈ J_i, l ∈ J_r, i < r
    let mut norm_gap_margin = f64::INFINITY;
    for i in 0..p {
        for r in i + 1..p {
            let min_h = j_blocks[i]
                .iter()
                .map(|&h| norms[h])
                .fold(f64::INFINITY, f64::min);
            let max_l = j_blocks[r]
                .iter()
                .map(|&l| norms[l])
                .fold(f64::NEG_INFINITY, f64::max);
            norm_gap_margin = norm_gap_margin.min((min_h - max_l) - (constants[i] - constants[r]));
        }
    }
    let norm_gap_ok = norm_gap_margin >= -tol * scale;

    // (v) all blocks but the last are linearly independent
    let mut block_ranks = Vec::with_capacity(p);
    for block in &j_blocks {
        let sub = VectorSequence::new(
            g.dim(),
            block.iter().map(|&i| g.vectors()[i].clone()).collect(),
        )?;
        let eig = eigh_ascending(&gram(&sub)?)?;
        let top = eig.values.last().copied().unwrap_or(0.0);
        block_ranks.push(
            eig.values
                .iter()
                .filter(|&&l| l > tol * (1.0 + top))
                .count(),
        );
    }
    let independent_ok = j_blocks
        .iter()
        .zip(&block_ranks)
        .take(p.saturating_sub(1))
        .all(|(b, &r)| r == b.len());

    // (vi) commutation
    let commutator = s0.commutator(&sg)?.max_abs();
    let commute_ok = commutator <= tol * scale * scale;

    // K_j from the spectra of S_{F0} and S_G
    let lambda = sort_asc(&eigh_ascending(&s0)?.values);
    let mu = eigh_ascending(&sg)?.values_desc();
    let rank_g = mu.iter().filter(|&&m| m > tol * scale).count();
    let mut k_blocks = vec![Vec::new(); p];
    let mut k_ok = true;
    for i in 0..rank_g.min(lambda.len()) {
        let v = lambda[i] + mu[i];
        let hits: Vec<usize> = (0..p)
            .filter(|&j| (v - constants[j]).abs() <= CLUSTER_GAP * constants[j].abs().max(1.0))
            .collect();
        match hits.as_slice() {
            [j] => k_blocks[*j].push(i),
            _ => k_ok = false,
        }
    }
    let partitions_ok = k_ok && j_blocks.iter().map(Vec::len).sum::<usize>() == k;

    let checks = vec![
        AuditCheck {
            name: "eigenvectors",
            passed: eigen_ok,
            detail: format!("max residual {worst_residual:.3e}"),
        },
        AuditCheck {
            name: "distinct_constants",
            passed: distinct_ok,
            detail: format!("p = {p}, min gap {constant_margin:.3e}"),
        },
        AuditCheck {
            name: "consecutive_blocks",
            passed: consecutive_ok,
            detail: format!("J = {j_blocks:?}"),
        },
        AuditCheck {
            name: "norm_gaps",
            passed: norm_gap_ok,
            detail: format!("min margin {norm_gap_margin:.3e}"),
        },
        AuditCheck {
            name: "independent_blocks",
            passed: independent_ok,
            detail: format!("ranks {block_ranks:?}"),
        },
        AuditCheck {
            name: "commuting_operators",
            passed: commute_ok,
            detail: format!("‖[S0, SG]‖ = {commutator:.3e}"),
        },
    ];

    Ok(StructureReport {
        constants,
        j_blocks,
        k_blocks,
        rank_g,
        eigen_residuals: residuals,
        constant_margin,
        norm_gap_margin,
        block_ranks,
        commutator,
        partitions_ok,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::optimal_spectrum;
    use crate::synthesis::complete;
    use num_complex::Complex64;

    #[test]
    fn sampler_basics() {
        let s = GammaSampler::new(&[3.0, 1.0], 2, 42, 1);
        assert_eq!(s.sample(), vec![vec![3.0, 1.0]]);

        let s = GammaSampler::new(&[6.0, 1.0, 1.0, 0.5], 3, 7, 500);
        let samples = s.sample();
        assert_eq!(samples.len(), 500);
        assert_eq!(samples[0], vec![6.0, 1.5, 1.0]);
        assert!(samples
            .iter()
            .all(|g| majorizes(s.norms(), g, 1e-9) && s.contains(g)));
        assert_eq!(samples, s.sample());
        let distinct = samples.iter().filter(|g| **g != samples[0]).count();
        assert!(distinct > 400);
    }

    #[test]
    fn sampler_is_thread_independent() {
        let s = GammaSampler::new(&[2.0, 2.0, 1.0, 1.0, 0.3], 4, 9, 300);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let single = pool.install(|| s.sample());
        assert_eq!(single, s.sample());
    }

    #[test]
    fn brute_force_examples() {
        let pd = ProblemData::new(&[0.0, 0.0], &[3.0, 1.0]).unwrap();
        let best = brute_force_min(&pd, &PotentialSpec::FramePotential, 200, 1);
        assert!((best.value - 10.0).abs() < 1e-9);
        assert!((best.gamma[0] - 3.0).abs() < 1e-6);

        let (d, k) = (3, 7);
        let pd = ProblemData::new(&vec![0.0; d], &vec![1.0; k]).unwrap();
        let best = brute_force_min(&pd, &PotentialSpec::FramePotential, 500, 2);
        let opt = d as f64 * (k as f64 / d as f64).powi(2);
        assert!(best.value >= opt - 1e-12);
        assert!(best.value - opt < 1e-6, "{best:?}");

        let anchor_only = brute_force_min(&pd, &PotentialSpec::FramePotential, 0, 2);
        assert!(anchor_only.value.is_finite() && anchor_only.value >= opt - 1e-12);
    }

    #[test]
    fn worked_instance_majorization() {
        let pd = ProblemData::new(&[0.0, 0.0, 10.0], &[6.0, 1.0, 1.0]).unwrap();
        let nu = optimal_spectrum(&pd).unwrap();
        assert!(check_majorization_min(&nu, &pd, 2000, 3));
        // γ = μ itself gives equality
        let mu = nu.mu(pd.lambda());
        let point: Vec<f64> = pd.lambda().iter().zip(&mu).map(|(l, m)| l + m).collect();
        assert!(majorizes(&nu.desc(), &point, 1e-12));
        // a spread-out spectrum fails
        let bad = [9.0, 9.0, 0.0];
        assert!(!majorization_spot_check(&bad, &pd, 200, 3).passed());
    }

    #[test]
    fn audit_tight_frame() {
        let f0 = VectorSequence::empty(2).unwrap();
        let c = complete(&f0, &[1.0; 4]).unwrap();
        let report = audit_structure(&f0, &c.vectors, 1e-8).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.p(), 1);
    }

    #[test]
    fn audit_worked_instance() {
        let f0 = VectorSequence::from_real(3, &[vec![0.0, 0.0, 10f64.sqrt()]]).unwrap();
        let c = complete(&f0, &[6.0, 1.0, 1.0]).unwrap();
        let report = audit_structure(&f0, &c.vectors, 1e-8).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.j_blocks, vec![vec![0], vec![1, 2]]);
        assert!((report.constants[0] - 6.0).abs() < 1e-8);
        assert!((report.constants[1] - 2.0).abs() < 1e-8);
        assert!(report.norm_gap_margin >= 1.0 - 1e-8);
        assert_eq!(report.k_blocks, vec![vec![0], vec![1]]);
    }

    #[test]
    fn audit_rejects_noisy_completion() {
        let f0 = VectorSequence::from_real(3, &[vec![0.0, 0.0, 10f64.sqrt()]]).unwrap();
        let c = complete(&f0, &[6.0, 1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noisy: Vec<Vec<Complex64>> = c
            .vectors
            .vectors()
            .iter()
            .map(|v| {
                v.iter()
                    .map(|z| z + Complex64::new(rng.gen_range(-0.1..0.1), 0.0))
                    .collect()
            })
            .collect();
        let noisy = VectorSequence::new(3, noisy).unwrap();
        let report = audit_structure(&f0, &noisy, 1e-8).unwrap();
        assert!(!report.passed());
    }
}
