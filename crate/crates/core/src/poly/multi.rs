use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Terms with a zero coefficient are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    names: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

/// Graded lexicographic order, earlier variables more significant.
fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl MultiPoly {
    pub fn zero(names: Vec<String>) -> Self {
        Self { names, terms: BTreeMap::new() }
    }

    pub fn constant(names: Vec<String>, c: BigRational) -> Self {
        let mut p = Self::zero(names);
        let n = p.nvars();
        p.add_term(vec![0; n], c);
        p
    }

    pub fn one(names: Vec<String>) -> Self {
        Self::constant(names, BigRational::one())
    }

    pub fn var(names: Vec<String>, index: usize) -> Self {
        let mut exps = vec![0; names.len()];
        exps[index] = 1;
        let mut p = Self::zero(names);
        p.add_term(exps, BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.names.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.names.clone());
        if c.is_zero() {
            return out;
        }
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k * c);
        }
        out
    }

    /// `self · x_var`.
    fn shift(&self, var: usize) -> Self {
        let mut out = Self::zero(self.names.clone());
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[var] += 1;
            out.terms.insert(e, c.clone());
        }
        out
    }

    /// Exact quotient by `x_i − x_j`, or `None` when the remainder is nonzero.
    pub fn div_exact_linear(&self, i: usize, j: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // coefficients of powers of x_i
        let top = self.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
        let mut slices: Vec<Self> = vec![Self::zero(self.names.clone()); top + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut e = e.clone();
            e[i] = 0;
            slices[k].terms.insert(e, c.clone());
        }
        if top == 0 {
            return None;
        }
        // synthetic division by (x_i − x_j)
        let mut quotient_slices: Vec<Self> = vec![Self::zero(self.names.clone()); top];
        quotient_slices[top - 1] = slices[top].clone();
        for k in (1..top).rev() {
            quotient_slices[k - 1] = slices[k].add(&quotient_slices[k].shift(j));
        }
        let remainder = slices[0].add(&quotient_slices[0].shift(j));
        if !remainder.is_zero() {
            return None;
        }
        let mut out = Self::zero(self.names.clone());
        for (k, s) in quotient_slices.into_iter().enumerate() {
            for (mut e, c) in s.terms {
                e[i] += k as u32;
                out.add_term(e, c);
            }
        }
        Some(out)
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars(), "point dimension");
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term *= x;
                }
            }
            total += term;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = point.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * mono
            })
            .sum()
    }

    /// Terms in descending graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&[u32], &BigRational)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|x, y| grlex(y.0, x.0));
        v
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (exps, coeff)) in terms.into_iter().enumerate() {
            let negative = coeff.is_negative();
            match (n, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = coeff.abs();
            let mut factors: Vec<String> = Vec::new();
            for (name, &k) in self.names.iter().zip(exps) {
                match k {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{k}")),
                }
            }
            if factors.is_empty() || !magnitude.is_one() {
                factors.insert(0, magnitude.to_string());
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}
