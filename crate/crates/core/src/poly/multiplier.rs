use num_traits::Num;

use super::coeff::CoeffPoly;
use super::root::{check_distinct, RootPoly};
use crate::{Error, Result};

fn pow<T: Num + Clone>(base: &T, exp: usize) -> T {
    (0..exp).fold(T::one(), |acc, _| acc * base.clone())
}

/// The defining sum of J over any number type:
///
/// ```text
/// J = b^{|A|-1} a^{|B|-1} Σ_{β'} ∏_{β''≠β'} ∏_α (v_β'' − u_α) / (v_β' − v_β'')
/// ```
///
/// With the arguments swapped (`j_sum(b, a, v, u)`) this is J̃. No check on
/// coincident `v`s is made here.
pub fn j_sum<T: Num + Clone>(a: &T, b: &T, u: &[T], v: &[T]) -> T {
    let prefactor = pow(b, u.len().saturating_sub(1)) * pow(a, v.len().saturating_sub(1));
    let mut total = T::zero();
    for (k, vk) in v.iter().enumerate() {
        let mut num = T::one();
        let mut den = T::one();
        for (l, vl) in v.iter().enumerate() {
            if l == k {
                continue;
            }
            for ua in u {
                num = num * (vl.clone() - ua.clone());
            }
            den = den * (vk.clone() - vl.clone());
        }
        total = total + num / den;
    }
    prefactor * total
}

/// `R(u, v) = a^{|B|} b^{|A|} ∏_{α,β} (u_α − v_β)`.
pub fn resultant_roots(p: &RootPoly, q: &RootPoly) -> f64 {
    let mut diffs: Vec<f64> =
        p.roots().iter().flat_map(|u| q.roots().iter().map(move |v| u - v)).collect();
    diffs.sort_by(f64::total_cmp);
    let scale = p.leading().powi(q.degree() as i32) * q.leading().powi(p.degree() as i32);
    diffs.iter().fold(scale, |acc, d| acc * d)
}

/// J from its defining sum over the roots of `Q`.
pub fn j_multiplier(p: &RootPoly, q: &RootPoly) -> Result<f64> {
    q.check_distinct()?;
    Ok(j_sum(&p.leading(), &q.leading(), p.roots(), q.roots()))
}

/// J̃, the same sum with the roles of `P` and `Q` interchanged.
/// Satisfies `J = (−1)^{|A||B|−1} J̃`.
pub fn j_tilde(p: &RootPoly, q: &RootPoly) -> Result<f64> {
    p.check_distinct()?;
    Ok(j_sum(&q.leading(), &p.leading(), q.roots(), p.roots()))
}

/// `J = b^{|A|} (Σ_{β'} 1/S'(v_β')) ∏_{β''} P(v_β'')` with `S = PQ`.
pub fn j_product_form(p: &RootPoly, q: &RootPoly) -> Result<f64> {
    let all: Vec<f64> = p.roots().iter().chain(q.roots()).copied().collect();
    check_distinct(&all)?;
    let s = RootPoly::new(p.leading() * q.leading(), all, p.family())?;
    let offset = p.degree();
    let mut inv_sum = 0.0;
    for k in 0..q.degree() {
        inv_sum += 1.0 / s.derivative_at_root(offset + k)?;
    }
    let mut values: Vec<f64> = q.roots().iter().map(|&v| p.eval(v)).collect();
    values.sort_by(f64::total_cmp);
    let prod = values.iter().product::<f64>();
    Ok(q.leading().powi(p.degree() as i32) * inv_sum * prod)
}

/// J for a quadratic `Q` given in coefficient form, as the divided difference
/// `−b^{deg P − 1} (P(v') − P(v''))/(v' − v'')` expressed through the
/// symmetric functions `v' + v''` and `v'v''`. No roots of `Q` are extracted,
/// so the value stays defined when they are complex.
pub fn j_degree2_coeffs(p: &[f64], q: &[f64]) -> Result<f64> {
    if q.len() != 3 || q[2] == 0.0 {
        let found = q.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        return Err(Error::DegreeMismatch { expected: 2, found });
    }
    if p.len() < 2 {
        return Err(Error::InvalidInput("P must be non-constant".into()));
    }
    let b = q[2];
    let sum = -q[1] / b;
    let prod = q[0] / b;
    // (x^k − y^k)/(x − y) = h_{k−1}(x, y);  h_m = sum·h_{m−1} − prod·h_{m−2}
    let (mut h_prev, mut h) = (0.0, 1.0);
    let mut dd = 0.0;
    for &c in &p[1..] {
        dd += c * h;
        let next = sum * h - prod * h_prev;
        h_prev = h;
        h = next;
    }
    Ok(-b.powi(p.len() as i32 - 2) * dd)
}

pub fn j_degree2(p: &RootPoly, q: &CoeffPoly) -> Result<f64> {
    j_degree2_coeffs(p.to_coeffs().coeffs(), q.coeffs())
}

/// `Σ_γ 1/S'(w_γ)`, which vanishes for every polynomial of degree ≥ 2 with
/// simple roots.
pub fn reciprocal_derivative_sum(s: &RootPoly) -> Result<f64> {
    if s.degree() < 2 {
        return Err(Error::DegreeMismatch { expected: 2, found: s.degree() });
    }
    s.check_distinct()?;
    let mut terms = (0..s.degree())
        .map(|k| s.derivative_at_root(k).map(|d| 1.0 / d))
        .collect::<Result<Vec<_>>>()?;
    terms.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(terms.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CoeffPoly;

    fn a(leading: f64, roots: &[f64]) -> RootPoly {
        RootPoly::a_family(leading, roots.to_vec()).unwrap()
    }

    fn b(leading: f64, roots: &[f64]) -> RootPoly {
        RootPoly::b_family(leading, roots.to_vec()).unwrap()
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant_roots(&a(1.0, &[0.0]), &b(1.0, &[1.0, 2.0])), 2.0);
        assert_eq!(resultant_roots(&a(1.0, &[1.0]), &b(1.0, &[1.0, 2.0])), 0.0);
        assert_eq!(resultant_roots(&a(2.0, &[0.0]), &b(3.0, &[1.0])), -6.0);
    }

    #[test]
    fn multiplier_examples() {
        assert_eq!(j_multiplier(&a(1.0, &[0.3]), &b(1.0, &[-2.0])).unwrap(), 1.0);
        assert_eq!(j_multiplier(&a(1.0, &[0.0]), &b(1.0, &[1.0, 2.0])).unwrap(), -1.0);
        assert_eq!(j_multiplier(&a(1.0, &[1.0]), &b(1.0, &[1.0, 2.0])).unwrap(), -1.0);
        assert_eq!(
            j_multiplier(&a(1.0, &[1.0]), &b(1.0, &[2.0, 2.0])),
            Err(Error::RepeatedRoot { first: 0, second: 1 })
        );
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(j_tilde(&a(1.0, &[0.3]), &b(1.0, &[-2.0])).unwrap(), 1.0);
        assert_eq!(j_tilde(&a(1.0, &[0.0]), &b(1.0, &[1.0, 2.0])).unwrap(), 1.0);
        assert!(j_tilde(&a(1.0, &[0.0, 0.0]), &b(1.0, &[1.0])).is_err());
    }

    #[test]
    fn product_form_examples() {
        assert!((j_product_form(&a(1.0, &[0.0]), &b(1.0, &[1.0, 2.0])).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(j_product_form(&a(1.0, &[0.0]), &b(1.0, &[1.0])).unwrap(), 1.0);
        assert!(matches!(
            j_product_form(&a(1.0, &[1.0]), &b(1.0, &[1.0, 2.0])),
            Err(Error::RepeatedRoot { .. })
        ));
    }

    #[test]
    fn degree2_examples() {
        let q = CoeffPoly::new(vec![2.0, -3.0, 1.0]).unwrap();
        assert_eq!(j_degree2(&a(1.0, &[0.0]), &q).unwrap(), -1.0);
        let complex = CoeffPoly::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(j_degree2(&a(1.0, &[0.0]), &complex).unwrap(), -1.0);
        let linear = CoeffPoly::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            j_degree2(&a(1.0, &[0.0]), &linear),
            Err(Error::DegreeMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn degree2_matches_sum_for_cubic_p() {
        let p = a(1.7, &[-1.1, 0.4, 2.3]);
        let q = b(-0.6, &[-0.8, 1.9]);
        let via_coeffs = j_degree2(&p, &q.to_coeffs()).unwrap();
        let via_sum = j_multiplier(&p, &q).unwrap();
        assert!((via_coeffs - via_sum).abs() < 1e-12 * via_sum.abs().max(1.0));
    }

    #[test]
    fn reciprocal_sum_examples() {
        assert_eq!(reciprocal_derivative_sum(&a(1.0, &[0.0, 1.0, 2.0])).unwrap(), 0.0);
        assert_eq!(reciprocal_derivative_sum(&a(1.0, &[-1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(reciprocal_derivative_sum(&a(5.0, &[0.0, 3.0])).unwrap(), 0.0);
        assert!(reciprocal_derivative_sum(&a(1.0, &[2.0])).is_err());
    }
}
