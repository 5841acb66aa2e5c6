use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self { lower, upper };
        b.validate()?;
        Ok(b)
    }

    /// `[0, 1]^d`.
    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn uniform(d: usize, lo: f64, hi: f64) -> Self {
        Self {
            lower: vec![lo; d],
            upper: vec![hi; d],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::input("bounds: lower and upper differ in length"));
        }
        if self.lower.is_empty() {
            return Err(Error::input("bounds: zero-dimensional box"));
        }
        for i in 0..self.lower.len() {
            let (l, u) = (self.lower[i], self.upper[i]);
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::input(format!("bounds: need lower < upper in dim {i}, got [{l}, {u}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.from_unit(&vec![0.5; self.dim()])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.lower[i]) / (self.upper[i] - self.lower[i]))
            .collect()
    }

    /// Maps unit-cube coordinates into the box. The result is clamped so
    /// rounding can never place a coordinate outside `[lower, upper]`.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, v)| {
                let (l, h) = (self.lower[i], self.upper[i]);
                (l + v * (h - l)).clamp(l, h)
            })
            .collect()
    }

    /// Sub-box on the given dimensions, in order.
    pub fn select(&self, dims: &[usize]) -> Bounds {
        Bounds {
            lower: dims.iter().map(|&d| self.lower[d]).collect(),
            upper: dims.iter().map(|&d| self.upper[d]).collect(),
        }
    }

    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) * (u - l))
            .sum::<f64>()
            .sqrt()
    }
}
