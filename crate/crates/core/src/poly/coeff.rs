use crate::{Error, Result};

/// Real polynomial in coefficient form, ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPoly {
    coeffs: Vec<f64>,
}

impl CoeffPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::InvalidInput("empty coefficient list".into())),
            Some(&top) if top == 0.0 => {
                Err(Error::InvalidInput("highest-degree coefficient must be nonzero".into()))
            }
            _ if coeffs.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidInput("coefficients must be finite".into()))
            }
            _ => Ok(Self { coeffs }),
        }
    }

    /// Drops vanishing top coefficients before validating. The zero
    /// polynomial is kept as the single coefficient `[0]`.
    pub fn trimmed(mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs == [0.0] {
            return Ok(Self { coeffs });
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Sylvester matrix of two coefficient vectors (ascending order, formal
/// degrees `p.len() - 1` and `q.len() - 1`). The first `deg q` rows hold the
/// shifted coefficients of `p` in descending order, the next `deg p` rows
/// those of `q`.
pub fn sylvester_matrix(p: &[f64], q: &[f64]) -> Vec<Vec<f64>> {
    let n = p.len() - 1;
    let m = q.len() - 1;
    let size = n + m;
    let mut rows = vec![vec![0.0; size]; size];
    for i in 0..m {
        for (j, c) in p.iter().rev().enumerate() {
            rows[i][i + j] = *c;
        }
    }
    for i in 0..n {
        for (j, c) in q.iter().rev().enumerate() {
            rows[m + i][i + j] = *c;
        }
    }
    rows
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut rows: Vec<Vec<f64>>) -> f64 {
    let n = rows.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs()))
            .unwrap();
        if rows[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let pv = rows[col][col];
        det *= pv;
        for r in col + 1..n {
            let factor = rows[r][col] / pv;
            if factor != 0.0 {
                for c in col..n {
                    rows[r][c] -= factor * rows[col][c];
                }
            }
        }
    }
    det
}

pub(crate) fn sylvester_determinant(p: &[f64], q: &[f64]) -> f64 {
    determinant(sylvester_matrix(p, q))
}

/// Resultant as the Sylvester determinant. With the row layout of
/// [`sylvester_matrix`] this equals `lc(p)^{deg q} lc(q)^{deg p} ∏ (u_i − v_j)`,
/// the root-product normalization of [`super::resultant_roots`].
pub fn resultant_sylvester(p: &CoeffPoly, q: &CoeffPoly) -> Result<f64> {
    if p.degree() == 0 || q.degree() == 0 {
        return Err(Error::InvalidInput("resultant needs two non-constant polynomials".into()));
    }
    Ok(sylvester_determinant(p.coeffs(), q.coeffs()))
}

/// Real roots of a quadratic in ascending order, or `None` when they are
/// complex. The larger-magnitude root is formed first to avoid cancellation.
pub fn coeffs_to_roots_quadratic(p: &CoeffPoly) -> Result<Option<(f64, f64)>> {
    if p.degree() != 2 {
        return Err(Error::DegreeMismatch { expected: 2, found: p.degree() });
    }
    let (c, b, a) = (p.coeffs[0], p.coeffs[1], p.coeffs[2]);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(None);
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return Ok(Some((0.0, 0.0)));
    }
    let (r1, r2) = (q / a, c / q);
    Ok(Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(c: &[f64]) -> CoeffPoly {
        CoeffPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn sylvester_examples() {
        // x − 1 and x² − 3x + 2 share the root 1
        assert_eq!(resultant_sylvester(&cp(&[-1.0, 1.0]), &cp(&[2.0, -3.0, 1.0])).unwrap(), 0.0);
        // roots 0 and 1: (0 − 1)
        assert_eq!(resultant_sylvester(&cp(&[0.0, 1.0]), &cp(&[-1.0, 1.0])).unwrap(), -1.0);
        // root 0 against roots 1, 2: (0 − 1)(0 − 2)
        let r = resultant_sylvester(&cp(&[0.0, 1.0]), &cp(&[2.0, -3.0, 1.0])).unwrap();
        assert!((r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sylvester_rejects_constants() {
        assert!(resultant_sylvester(&cp(&[3.0]), &cp(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn quadratic_roots() {
        assert_eq!(coeffs_to_roots_quadratic(&cp(&[2.0, -3.0, 1.0])).unwrap(), Some((1.0, 2.0)));
        assert_eq!(coeffs_to_roots_quadratic(&cp(&[1.0, 0.0, 1.0])).unwrap(), None);
        assert_eq!(
            coeffs_to_roots_quadratic(&cp(&[1.0, 1.0])),
            Err(Error::DegreeMismatch { expected: 2, found: 1 })
        );
        // tiny root survives: x² − 1e8 x + 1
        let (small, big) = coeffs_to_roots_quadratic(&cp(&[1.0, -1e8, 1.0])).unwrap().unwrap();
        assert!((small - 1e-8).abs() < 1e-22);
        assert!((big - 1e8).abs() < 1e-6);
    }

    #[test]
    fn coeff_poly_invariants() {
        assert!(CoeffPoly::new(vec![1.0, 0.0]).is_err());
        assert!(CoeffPoly::new(vec![]).is_err());
        assert_eq!(CoeffPoly::trimmed(vec![1.0, 2.0, 0.0]).unwrap().degree(), 1);
        assert_eq!(cp(&[2.0, -3.0, 1.0]).eval(4.0), 6.0);
    }
}
