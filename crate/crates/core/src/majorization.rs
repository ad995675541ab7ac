//! Rearrangements, traces and the vector orders `≤_p`, `≺_w` and `≺`.
//!
//! The order predicates accept vectors of different lengths and pad the
//! shorter one with zeros internally; the inputs are never modified.

use std::cmp::Ordering;
use std::ops::Deref;

use crate::error::{Error, Result};

/// A nonempty vector of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVec(Vec<f64>);

impl RealVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(RealVec(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sort_desc(&self) -> RealVec {
        RealVec(sort_desc(&self.0))
    }

    pub fn sort_asc(&self) -> RealVec {
        RealVec(sort_asc(&self.0))
    }

    pub fn trace(&self) -> f64 {
        trace(&self.0)
    }
}

impl Deref for RealVec {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for RealVec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVec::new(v)
    }
}

impl From<RealVec> for Vec<f64> {
    fn from(v: RealVec) -> Self {
        v.0
    }
}

/// Decreasing rearrangement `x↓`.
pub fn sort_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Increasing rearrangement `x↑`.
pub fn sort_asc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Indexes that sort `x` in decreasing order; ties keep their input order.
pub fn argsort_desc(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| match x[j].total_cmp(&x[i]) {
        Ordering::Equal => i.cmp(&j),
        o => o,
    });
    idx
}

/// `tr x = Σ x_i`.
pub fn trace(x: &[f64]) -> f64 {
    x.iter().sum()
}

fn padded_desc(x: &[f64], n: usize) -> Vec<f64> {
    let mut v = sort_desc(x);
    v.resize(n, 0.0);
    // Zero padding may break the ordering when x has negative entries.
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `x ≺_w y`: every prefix sum of `x↓` is at most the matching prefix sum
/// of `y↓` (plus `tol`).
pub fn submajorizes(x: &[f64], y: &[f64], tol: f64) -> bool {
    let n = x.len().max(y.len());
    let xs = padded_desc(x, n);
    let ys = padded_desc(y, n);
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx > sy + tol {
            return false;
        }
    }
    true
}

/// `x ≺ y`: `x ≺_w y` and `|tr x − tr y| ≤ tol`.
pub fn majorizes(x: &[f64], y: &[f64], tol: f64) -> bool {
    (trace(x) - trace(y)).abs() <= tol && submajorizes(x, y, tol)
}

/// `x ≺ y` and not `y ≺ x`.
pub fn strictly_majorizes(x: &[f64], y: &[f64], tol: f64) -> bool {
    majorizes(x, y, tol) && !majorizes(y, x, tol)
}

/// `x ≤_p y`: coordinatewise comparison of equal-length vectors.
pub fn entrywise_leq(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y).all(|(a, b)| a <= b))
}
