//! Convex potentials `P_f(F) = tr f(S_F)` and `F(γ) = Σ f(γ_i)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{eigh_ascending, frame_operator, VectorSequence};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex function on `[0, ∞)`.
#[derive(Clone)]
pub enum PotentialSpec {
    /// `f(t) = t²`, the frame potential `tr S²`.
    FramePotential,
    /// `f(t) = 1/t` with `f(0) = +∞`, the mean squared error `tr S⁻¹`.
    MseExtended,
    /// `f(t) = eᵗ`.
    Exponential,
    /// `f(t) = tᵖ` with `p > 1`.
    Power(f64),
    /// User-supplied function, trusted to be strictly convex.
    Custom { name: String, f: ScalarFn },
}

impl PotentialSpec {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidPotential(format!(
                "power needs p > 1, got {p}"
            )));
        }
        Ok(PotentialSpec::Power(p))
    }

    /// Wraps a custom function. Debug builds spot-check midpoint convexity.
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let spec = PotentialSpec::Custom {
            name: name.into(),
            f: Arc::new(f),
        };
        debug_assert!(
            spec.midpoint_convex_on_grid(0.0, 16.0, 64),
            "custom potential is not convex"
        );
        spec
    }

    /// `f(t)` for `t ≥ 0`.
    pub fn scalar(&self, t: f64) -> f64 {
        match self {
            PotentialSpec::FramePotential => t * t,
            PotentialSpec::MseExtended => {
                if t == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / t
                }
            }
            PotentialSpec::Exponential => t.exp(),
            PotentialSpec::Power(p) => t.powf(*p),
            PotentialSpec::Custom { f, .. } => f(t),
        }
    }

    pub fn name(&self) -> String {
        match self {
            PotentialSpec::FramePotential => "fp".into(),
            PotentialSpec::MseExtended => "mse".into(),
            PotentialSpec::Exponential => "exp".into(),
            PotentialSpec::Power(p) => format!("pow:{p}"),
            PotentialSpec::Custom { name, .. } => name.clone(),
        }
    }

    /// Checks `f((x+y)/2) ≤ (f(x)+f(y))/2` on a grid of pairs in `[lo, hi]`.
    pub fn midpoint_convex_on_grid(&self, lo: f64, hi: f64, steps: usize) -> bool {
        let step = (hi - lo) / steps as f64;
        (0..=steps).all(|i| {
            (i..=steps).all(|j| {
                let (x, y) = (lo + step * i as f64, lo + step * j as f64);
                let mid = self.scalar(0.5 * (x + y));
                let avg = 0.5 * (self.scalar(x) + self.scalar(y));
                mid <= avg + 1e-9 * (1.0 + avg.abs()) || avg.is_infinite()
            })
        })
    }
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PotentialSpec({})", self.name())
    }
}

impl PartialEq for PotentialSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PotentialSpec::Custom { f: a, .. }, PotentialSpec::Custom { f: b, .. }) => {
                Arc::ptr_eq(a, b)
            }
            (PotentialSpec::Power(a), PotentialSpec::Power(b)) => a == b,
            (a, b) => std::mem::discriminant(a) == std::mem::discriminant(b),
        }
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    /// Parses the command-line names `fp`, `mse`, `exp` and `pow:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fp" => Ok(PotentialSpec::FramePotential),
            "mse" => Ok(PotentialSpec::MseExtended),
            "exp" => Ok(PotentialSpec::Exponential),
            other => match other.strip_prefix("pow:") {
                Some(p) => {
                    let p: f64 = p.parse().map_err(|_| {
                        Error::InvalidPotential(format!("bad exponent in `{other}`"))
                    })?;
                    PotentialSpec::power(p)
                }
                None => Err(Error::InvalidPotential(format!(
                    "unknown potential `{other}`"
                ))),
            },
        }
    }
}

/// `F(γ) = Σ f(γ_i)`; `+∞` propagates through the sum.
pub fn eval_vector(f: &PotentialSpec, gamma: &[f64]) -> Result<f64> {
    if let Some((index, &value)) = gamma
        .iter()
        .enumerate()
        .find(|(_, &g)| g < 0.0 || g.is_nan())
    {
        return Err(Error::NegativeEntry { index, value });
    }
    Ok(gamma.iter().map(|&g| f.scalar(g)).sum())
}

/// `P_f(F) = Σ f(λ_i(S_F))`.
pub fn eval_frame(f: &PotentialSpec, frame: &VectorSequence) -> Result<f64> {
    let eig = eigh_ascending(&frame_operator(frame))?;
    eval_vector(f, &eig.values)
}
