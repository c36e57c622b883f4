use num_rational::BigRational;
use num_traits::{One, Zero};

use super::multi::MultiPoly;
use crate::{Error, Result};

/// Variable names `u1..u|A|, v1..v|B|` in that order.
pub fn j_variable_names(size_a: usize, size_b: usize) -> Vec<String> {
    (1..=size_a).map(|k| format!("u{k}")).chain((1..=size_b).map(|k| format!("v{k}"))).collect()
}

/// Exact expansion of J as a polynomial in `(u, v)`.
///
/// The defining sum is put over the common denominator
/// `D = ∏_{β'<β''} (v_β' − v_β'')`, and the numerator is divided by each
/// linear factor of `D` in turn. A nonzero remainder is reported as
/// `DivisibilityFailure`.
pub fn expand_j_symbolic(
    size_a: usize,
    size_b: usize,
    a: &BigRational,
    b: &BigRational,
) -> Result<MultiPoly> {
    if size_a == 0 || size_b == 0 {
        return Err(Error::InvalidInput("both families need at least one root".into()));
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidInput("leading coefficients must be nonzero".into()));
    }
    let names = j_variable_names(size_a, size_b);
    let u = |k: usize| MultiPoly::var(names.clone(), k);
    let v = |k: usize| MultiPoly::var(names.clone(), size_a + k);

    let mut numerator = MultiPoly::zero(names.clone());
    for skip in 0..size_b {
        // D / (∏_{β''≠β'} (v_β' − v_β'')) = (−1)^{β'} ∏_{pairs avoiding β'} (v_i − v_j)
        let mut term = MultiPoly::one(names.clone());
        for i in 0..size_b {
            for j in i + 1..size_b {
                if i != skip && j != skip {
                    term = term.mul(&v(i).sub(&v(j)));
                }
            }
        }
        for other in (0..size_b).filter(|&l| l != skip) {
            for alpha in 0..size_a {
                term = term.mul(&v(other).sub(&u(alpha)));
            }
        }
        numerator = if skip % 2 == 0 { numerator.add(&term) } else { numerator.sub(&term) };
    }

    let mut quotient = numerator;
    for i in 0..size_b {
        for j in i + 1..size_b {
            quotient = quotient
                .div_exact_linear(size_a + i, size_a + j)
                .ok_or(Error::DivisibilityFailure { first: i, second: j })?;
        }
    }

    let mut prefactor = BigRational::one();
    for _ in 1..size_a {
        prefactor *= b;
    }
    for _ in 1..size_b {
        prefactor *= a;
    }
    Ok(quotient.scale(&prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::j_sum;
    use num_bigint::BigInt;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn single_roots_give_one() {
        let j = expand_j_symbolic(1, 1, &int(1), &int(1)).unwrap();
        assert_eq!(j.to_string(), "1");
    }

    #[test]
    fn one_by_two_is_minus_one() {
        // monic linear P against a quadratic: the divided difference of P is 1
        let j = expand_j_symbolic(1, 2, &int(1), &int(1)).unwrap();
        assert_eq!(j.to_string(), "-1");
        assert_eq!(j.eval(&[int(0), int(1), int(2)]), int(-1));
    }

    #[test]
    fn two_by_two_matches_sum() {
        let (a, b) = (int(3), int(-2));
        let j = expand_j_symbolic(2, 2, &a, &b).unwrap();
        let u = [int(1), int(-4)];
        let v = [int(5), BigRational::new(BigInt::from(7), BigInt::from(3))];
        let point: Vec<BigRational> = u.iter().chain(v.iter()).cloned().collect();
        assert_eq!(j.eval(&point), j_sum(&a, &b, &u, &v));
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(expand_j_symbolic(0, 2, &int(1), &int(1)).is_err());
        assert!(expand_j_symbolic(1, 2, &int(0), &int(1)).is_err());
    }
}
