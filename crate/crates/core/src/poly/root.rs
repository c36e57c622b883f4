use serde::{Deserialize, Serialize};

use super::coeff::CoeffPoly;
use crate::{Error, Result};

/// Relative threshold under which two roots are treated as one.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Which side of the identity a polynomial belongs to: `P` carries the
/// A-family roots `u`, `Q` the B-family roots `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
}

/// `leading · ∏ (x − root_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootPoly {
    leading: f64,
    roots: Vec<f64>,
    sorted: Vec<f64>,
    family: Family,
}

/// `true` when `x` and `y` are closer than the root tolerance relative to `scale`.
pub fn roots_coincide(x: f64, y: f64, scale: f64) -> bool {
    (x - y).abs() <= ROOT_TOLERANCE * (1.0 + scale)
}

/// Fails with `RepeatedRoot` (original indices, ascending) if two entries coincide.
pub fn check_distinct(roots: &[f64]) -> Result<()> {
    let scale = roots.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&i, &j| roots[i].total_cmp(&roots[j]));
    for w in order.windows(2) {
        if roots_coincide(roots[w[0]], roots[w[1]], scale) {
            let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::RepeatedRoot { first, second });
        }
    }
    Ok(())
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

impl RootPoly {
    pub fn new(leading: f64, roots: Vec<f64>, family: Family) -> Result<Self> {
        if leading == 0.0 || !leading.is_finite() {
            return Err(Error::InvalidInput(format!(
                "leading coefficient must be finite and nonzero, got {leading}"
            )));
        }
        if roots.is_empty() {
            return Err(Error::InvalidInput("a root polynomial needs at least one root".into()));
        }
        if let Some(r) = roots.iter().find(|r| !r.is_finite()) {
            return Err(Error::InvalidInput(format!("root {r} is not finite")));
        }
        let sorted = sorted_copy(&roots);
        Ok(Self { leading, roots, sorted, family })
    }

    /// An A-family polynomial (the `P` of the identity).
    pub fn a_family(leading: f64, roots: Vec<f64>) -> Result<Self> {
        Self::new(leading, roots, Family::A)
    }

    /// A B-family polynomial (the `Q` of the identity).
    pub fn b_family(leading: f64, roots: Vec<f64>) -> Result<Self> {
        Self::new(leading, roots, Family::B)
    }

    pub fn leading(&self) -> f64 {
        self.leading
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn max_abs_root(&self) -> f64 {
        self.sorted.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn check_distinct(&self) -> Result<()> {
        check_distinct(&self.roots)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.iter().fold(self.leading, |acc, r| acc * (x - r))
    }

    /// `P'(root_k) = leading · ∏_{i≠k} (root_k − root_i)`.
    pub fn derivative_at_root(&self, k: usize) -> Result<f64> {
        if k >= self.roots.len() {
            return Err(Error::InvalidInput(format!(
                "root index {k} out of range for degree {}",
                self.degree()
            )));
        }
        self.check_distinct()?;
        let rk = self.roots[k];
        let mut others: Vec<f64> =
            self.roots.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &r)| r).collect();
        others.sort_by(f64::total_cmp);
        Ok(others.iter().fold(self.leading, |acc, r| acc * (rk - r)))
    }

    /// Vieta expansion into ascending coefficients.
    pub fn to_coeffs(&self) -> CoeffPoly {
        let mut coeffs = vec![self.leading];
        for r in &self.sorted {
            // multiply by (x − r)
            let mut next = vec![0.0; coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        CoeffPoly::new(coeffs).expect("leading coefficient is nonzero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(leading: f64, roots: &[f64]) -> RootPoly {
        RootPoly::a_family(leading, roots.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(poly(1.0, &[1.0, -1.0]).eval(0.0), -1.0);
        assert_eq!(poly(2.0, &[3.0]).eval(3.0), 0.0);
        assert_eq!(poly(1.0, &[0.0, 1.0, 2.0]).eval(3.0), 6.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(poly(1.0, &[1.0, -1.0]).derivative_at_root(0).unwrap(), 2.0);
        assert_eq!(poly(1.0, &[0.0, 1.0, 2.0]).derivative_at_root(1).unwrap(), -1.0);
        for k in 0..2 {
            assert_eq!(
                poly(1.0, &[0.0, 0.0]).derivative_at_root(k),
                Err(Error::RepeatedRoot { first: 0, second: 1 })
            );
        }
    }

    #[test]
    fn coincidence_is_scale_aware() {
        assert!(check_distinct(&[1e6, 1e6 + 1e-7]).is_err());
        assert!(check_distinct(&[0.0, 1e-9]).is_ok());
        assert_eq!(
            check_distinct(&[3.0, 0.5, 3.0]),
            Err(Error::RepeatedRoot { first: 0, second: 2 })
        );
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(RootPoly::a_family(0.0, vec![1.0]).is_err());
        assert!(RootPoly::a_family(1.0, vec![]).is_err());
        assert!(RootPoly::a_family(1.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn vieta_expansion() {
        assert_eq!(poly(1.0, &[1.0, 2.0]).to_coeffs().coeffs(), &[2.0, -3.0, 1.0]);
        assert_eq!(poly(2.0, &[0.0, 1.0, 2.0]).to_coeffs().coeffs(), &[0.0, 4.0, -6.0, 2.0]);
    }

    #[test]
    fn eval_is_order_independent() {
        let p = poly(1.5, &[0.3, -1.7, 2.2, 0.9]);
        let q = poly(1.5, &[2.2, 0.9, -1.7, 0.3]);
        for x in [-2.0, 0.1, 3.7] {
            assert_eq!(p.eval(x).to_bits(), q.eval(x).to_bits());
        }
    }
}
