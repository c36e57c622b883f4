use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Positive integrable test functions with closed-form parameters.
///
/// `Gaussian` is the isotropic normal density (total mass 1). `Bump` is
/// `∏ max(0, 1 − ((y_i − c_i)/w)²)²`, supported on the open box of
/// half-width `w`. `TruncatedGaussian` is the Gaussian density multiplied by
/// the indicator of the closed box `center ± cutoff·width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    Gaussian { center: Vec<f64>, width: f64 },
    Bump { center: Vec<f64>, half_width: f64 },
    TruncatedGaussian { center: Vec<f64>, width: f64, cutoff: f64 },
}

/// Where a test function is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Positivity<'a> {
    Everywhere,
    /// Open box `|y_i − c_i| < h`.
    OpenBox { center: &'a [f64], half: f64 },
    /// Closed box `|y_i − c_i| ≤ h`.
    ClosedBox { center: &'a [f64], half: f64 },
}

impl TestFunction {
    pub fn gaussian(center: Vec<f64>, width: f64) -> Result<Self> {
        Self::Gaussian { center, width }.validated()
    }

    pub fn standard_gaussian(dim: usize) -> Self {
        Self::Gaussian { center: vec![0.0; dim], width: 1.0 }
    }

    pub fn bump(center: Vec<f64>, half_width: f64) -> Result<Self> {
        Self::Bump { center, half_width }.validated()
    }

    pub fn truncated_gaussian(center: Vec<f64>, width: f64, cutoff: f64) -> Result<Self> {
        Self::TruncatedGaussian { center, width, cutoff }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let (center, scales): (&[f64], Vec<f64>) = match &self {
            Self::Gaussian { center, width } => (center, vec![*width]),
            Self::Bump { center, half_width } => (center, vec![*half_width]),
            Self::TruncatedGaussian { center, width, cutoff } => (center, vec![*width, *cutoff]),
        };
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("test function center must be a nonempty finite vector".into()));
        }
        if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidInput("test function widths must be positive".into()));
        }
        Ok(self)
    }

    pub fn center(&self) -> &[f64] {
        match self {
            Self::Gaussian { center, .. } | Self::Bump { center, .. } | Self::TruncatedGaussian { center, .. } => {
                center
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.center().len()
    }

    /// Gaussian width, if any.
    pub fn width(&self) -> Option<f64> {
        match self {
            Self::Gaussian { width, .. } | Self::TruncatedGaussian { width, .. } => Some(*width),
            Self::Bump { .. } => None,
        }
    }

    /// Half-width of the support box, if bounded.
    pub fn box_half_width(&self) -> Option<f64> {
        match self {
            Self::Gaussian { .. } => None,
            Self::Bump { half_width, .. } => Some(*half_width),
            Self::TruncatedGaussian { width, cutoff, .. } => Some(width * cutoff),
        }
    }

    pub fn positivity(&self) -> Positivity<'_> {
        match self {
            Self::Gaussian { .. } => Positivity::Everywhere,
            Self::Bump { center, half_width } => Positivity::OpenBox { center, half: *half_width },
            Self::TruncatedGaussian { center, .. } => {
                Positivity::ClosedBox { center, half: self.box_half_width().unwrap() }
            }
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        match self {
            Self::Gaussian { center, width } => gaussian_density(center, *width, y),
            Self::Bump { center, half_width } => center
                .iter()
                .zip(y)
                .map(|(c, yi)| {
                    let t = (yi - c) / half_width;
                    let s = 1.0 - t * t;
                    if s > 0.0 {
                        s * s
                    } else {
                        0.0
                    }
                })
                .product(),
            Self::TruncatedGaussian { center, width, cutoff } => {
                let h = width * cutoff;
                if center.iter().zip(y).all(|(c, yi)| (yi - c).abs() <= h) {
                    gaussian_density(center, *width, y)
                } else {
                    0.0
                }
            }
        }
    }

    /// Total integral over ℝⁿ.
    pub fn mass(&self) -> f64 {
        let n = self.dim() as i32;
        match self {
            Self::Gaussian { .. } => 1.0,
            Self::Bump { half_width, .. } => (16.0 / 15.0 * half_width).powi(n),
            Self::TruncatedGaussian { cutoff, .. } => libm::erf(cutoff / 2f64.sqrt()).powi(n),
        }
    }

    /// The same kind of function with coordinates reordered: coordinate `k`
    /// of the result is coordinate `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let c: Vec<f64> = perm.iter().map(|&k| self.center()[k]).collect();
        match self {
            Self::Gaussian { width, .. } => Self::Gaussian { center: c, width: *width },
            Self::Bump { half_width, .. } => Self::Bump { center: c, half_width: *half_width },
            Self::TruncatedGaussian { width, cutoff, .. } => {
                Self::TruncatedGaussian { center: c, width: *width, cutoff: *cutoff }
            }
        }
    }
}

fn gaussian_density(center: &[f64], width: f64, y: &[f64]) -> f64 {
    let n = center.len() as f64;
    let r2: f64 = center.iter().zip(y).map(|(c, yi)| (yi - c) * (yi - c)).sum();
    (-0.5 * r2 / (width * width)).exp() / (2.0 * PI * width * width).powf(0.5 * n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(TestFunction::gaussian(vec![0.0], 0.0).is_err());
        assert!(TestFunction::bump(vec![], 1.0).is_err());
        assert!(TestFunction::truncated_gaussian(vec![0.0], 1.0, -1.0).is_err());
    }

    #[test]
    fn bump_support_and_peak() {
        let b = TestFunction::bump(vec![1.0, 2.0], 0.5).unwrap();
        assert_eq!(b.eval(&[1.0, 2.0]), 1.0);
        assert_eq!(b.eval(&[1.5, 2.0]), 0.0);
        assert!(b.eval(&[1.49, 2.0]) > 0.0);
    }

    #[test]
    fn gaussian_peak() {
        let g = TestFunction::standard_gaussian(2);
        assert!((g.eval(&[0.0, 0.0]) - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn truncation() {
        let t = TestFunction::truncated_gaussian(vec![0.0], 0.1, 3.0).unwrap();
        assert!(t.eval(&[0.3]) > 0.0);
        assert_eq!(t.eval(&[0.3001]), 0.0);
        assert!((t.mass() - 0.997_300_203_936_739_8).abs() < 1e-15);
    }
}
