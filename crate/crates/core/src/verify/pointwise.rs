use serde::{Deserialize, Serialize};

use crate::poly::{check_distinct, j_sum};
use crate::{Error, Result};

/// `Σ_{α,β} = {u_α = v_β}` (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportHyperplane {
    pub alpha: usize,
    pub beta: usize,
}

impl SupportHyperplane {
    pub fn new(alpha: usize, beta: usize, size_a: usize, size_b: usize) -> Result<Self> {
        if alpha >= size_a || beta >= size_b {
            return Err(Error::InvalidInput(format!(
                "support hyperplane ({alpha}, {beta}) out of range for sizes ({size_a}, {size_b})"
            )));
        }
        Ok(Self { alpha, beta })
    }
}

/// `a^{|B|} b^{|A|} ∏_{(α',β') ≠ (α,β)} (u_α' − v_β')`.
pub fn j_ab(u: &[f64], v: &[f64], h: SupportHyperplane, a: f64, b: f64) -> f64 {
    let mut prod = a.powi(v.len() as i32) * b.powi(u.len() as i32);
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            if (i, j) != (h.alpha, h.beta) {
                prod *= ui - vj;
            }
        }
    }
    prod
}

/// On `Σ_{α,β}`, the two weights that the localized sides of the identity
/// attach to `δ(u_α − v_β)`: `1/(|P'(v_β)| |Q'(u_α)|)` and `|J| / |J_{α,β}|`.
pub fn pointwise_ratio_check(u: &[f64], v: &[f64], h: SupportHyperplane, a: f64, b: f64) -> Result<(f64, f64)> {
    SupportHyperplane::new(h.alpha, h.beta, u.len(), v.len())?;
    if u[h.alpha] != v[h.beta] {
        return Err(Error::OffSupport { alpha: h.alpha, beta: h.beta });
    }
    check_distinct(u)?;
    check_distinct(v)?;
    let x = v[h.beta];
    let p_prime: f64 =
        a * u.iter().enumerate().filter(|(i, _)| *i != h.alpha).map(|(_, ui)| x - ui).product::<f64>();
    let q_prime: f64 =
        b * v.iter().enumerate().filter(|(j, _)| *j != h.beta).map(|(_, vj)| x - vj).product::<f64>();
    let lhs = 1.0 / (p_prime.abs() * q_prime.abs());
    let rhs = j_sum(&a, &b, u, v).abs() / j_ab(u, v, h, a, b).abs();
    Ok((lhs, rhs))
}
