//! Multivariate Laurent polynomials over the rationals.
//!
//! A `LaurentPoly` stores a map from exponent vectors to coefficients and
//! maintains one invariant: no zero coefficient is ever kept. The zero
//! polynomial is the empty map. All arithmetic is exact; there is no
//! floating point in this crate.
//!
//! Variable names live in a shared [`VarSet`]. The conventional set for
//! chart calculations is [`VarSet::base`], producing `x1,…,x{n−1}, y`.
//! Printing uses graded lexicographic order on exponent vectors (total
//! degree first, ties broken lexicographically, highest first) and the
//! grammar `<rational>*x1^e1*...*y^e`; [`LaurentPoly::parse`] reads the
//! same grammar back, ignoring whitespace.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{format_rational, parse_rational};

/// Shared, ordered list of variable names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    /// Builds a variable set from explicit names.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        VarSet(Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect()))
    }

    /// The chart variables `x1,…,x{n−1}, y` for an n-dimensional chart.
    pub fn base(n: usize) -> Self {
        assert!(n >= 1, "chart dimension must be positive");
        let mut names: Vec<String> = (1..n).map(|i| format!("x{i}")).collect();
        names.push("y".to_string());
        VarSet(Arc::new(names))
    }

    /// Generic chart coordinates `t1,…,tn` for toric charts.
    pub fn chart(n: usize) -> Self {
        VarSet(Arc::new((1..=n).map(|i| format!("t{i}")).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, k: usize) -> &str {
        &self.0[k]
    }

    /// Index of a variable name, if present.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }
}

/// Graded lexicographic comparison, higher first: larger total degree wins,
/// ties are broken lexicographically on the exponent vector.
fn graded_lex_desc(a: &[i64], b: &[i64]) -> Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

/// A Laurent polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    vars: VarSet,
    terms: BTreeMap<Vec<i64>, BigRational>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("parse error at offset {at}: {msg}")]
    Parse { at: usize, msg: String },
    #[error("polynomial is not a single monomial")]
    NotAMonomial,
    #[error("evaluation point has a zero coordinate raised to a negative exponent")]
    ZeroToNegativePower,
}

impl LaurentPoly {
    // ---- Constructors ----

    pub fn zero(vars: &VarSet) -> Self {
        LaurentPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn constant(vars: &VarSet, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        LaurentPoly { vars: vars.clone(), terms }
    }

    pub fn constant_i64(vars: &VarSet, c: i64) -> Self {
        Self::constant(vars, BigRational::from(BigInt::from(c)))
    }

    /// Single term `c * vars^exps`.
    pub fn monomial(vars: &VarSet, c: BigRational, exps: &[i64]) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps.to_vec(), c);
        }
        LaurentPoly { vars: vars.clone(), terms }
    }

    /// The variable `vars[k]` as a polynomial.
    pub fn var(vars: &VarSet, k: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[k] = 1;
        Self::monomial(vars, BigRational::one(), &exps)
    }

    // ---- Inspection ----

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True when the polynomial is a constant (including zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// The constant coefficient (zero if absent).
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of a specific exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[i64]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Iterates over `(exponents, coefficient)` pairs in map order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigRational)> {
        self.terms.iter()
    }

    /// If the polynomial is a single term, returns its exponents and coefficient.
    pub fn as_monomial(&self) -> Result<(Vec<i64>, BigRational), PolyError> {
        if self.terms.len() != 1 {
            return Err(PolyError::NotAMonomial);
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Ok((e.clone(), c.clone()))
    }

    /// True when all exponents are nonnegative (an ordinary polynomial).
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    /// Smallest exponent of variable `k` over all terms (0 for the zero poly).
    pub fn min_exponent(&self, k: usize) -> i64 {
        self.terms.keys().map(|e| e[k]).min().unwrap_or(0)
    }

    // ---- Arithmetic helpers ----

    fn assert_same_vars(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "mixed variable sets");
    }

    fn insert_term(terms: &mut BTreeMap<Vec<i64>, BigRational>, e: Vec<i64>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Multiplies by a single monomial in place-friendly form.
    pub fn mul_monomial(&self, c: &BigRational, exps: &[i64]) -> Self {
        assert_eq!(exps.len(), self.vars.len());
        let mut terms = BTreeMap::new();
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        for (e, k) in &self.terms {
            let shifted: Vec<i64> = e.iter().zip(exps).map(|(a, b)| a + b).collect();
            terms.insert(shifted, k * c);
        }
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.mul_monomial(c, &vec![0; self.vars.len()])
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Applies an integer map to each exponent vector, merging collisions.
    /// Used for torsion reduction and index relabeling.
    pub fn map_exponents<F: Fn(&[i64]) -> Vec<i64>>(&self, f: F) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let ne = f(e);
            assert_eq!(ne.len(), self.vars.len());
            Self::insert_term(&mut terms, ne, c.clone());
        }
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    /// Substitutes each variable by an integer power of itself:
    /// `vars[k] ↦ vars[k]^powers[k]`.
    pub fn substitute_powers(&self, powers: &[i64]) -> Self {
        assert_eq!(powers.len(), self.vars.len());
        self.map_exponents(|e| e.iter().zip(powers).map(|(a, p)| a * p).collect())
    }

    /// Exact evaluation at a rational point. Coordinates hit by a negative
    /// exponent must be nonzero; zero to a positive power is zero.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, PolyError> {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = BigRational::zero();
        'terms: for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e.iter()) {
                if k == 0 {
                    continue;
                }
                if x.is_zero() {
                    if k > 0 {
                        continue 'terms;
                    }
                    return Err(PolyError::ZeroToNegativePower);
                }
                let p = num_traits::pow::pow(x.clone(), k.unsigned_abs() as usize);
                if k > 0 {
                    term *= p;
                } else {
                    term /= p;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Terms in the canonical printing order (graded lex, highest first).
    pub fn sorted_terms(&self) -> Vec<(Vec<i64>, BigRational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        v.sort_by(|a, b| graded_lex_desc(&a.0, &b.0));
        v
    }

    // ---- Parsing ----

    /// Parses the grammar printed by `Display`: a sum of terms
    /// `<rational>*name^exp*...`, whitespace-insensitive. A bare name has
    /// exponent 1; a term without a leading rational has coefficient 1.
    pub fn parse(vars: &VarSet, input: &str) -> Result<Self, PolyError> {
        let mut acc = Self::zero(vars);
        for (at, chunk) in split_top_level_sum(input) {
            let (c, exps) = parse_term(vars, chunk, at)?;
            acc = &acc + &Self::monomial(vars, c, &exps);
        }
        Ok(acc)
    }
}

/// Splits `a + b - c` into signed chunks, keeping each chunk's sign glued to
/// its coefficient. Returns `(offset, chunk)` pairs; an empty input yields
/// nothing (the zero polynomial).
fn split_top_level_sum(input: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut cur_at = 0;
    let mut prev_meaningful: Option<char> = None;
    for (i, ch) in input.char_indices() {
        if ch.is_whitespace() {
            continue;
        }
        let splits_here = (ch == '+' || ch == '-')
            && !matches!(prev_meaningful, None | Some('^') | Some('*') | Some('/') | Some('+') | Some('-'));
        if splits_here {
            if !cur.trim().is_empty() {
                out.push((cur_at, std::mem::take(&mut cur)));
            }
            cur_at = i;
            if ch == '-' {
                cur.push('-');
            }
        } else {
            cur.push(ch);
        }
        prev_meaningful = Some(ch);
    }
    if !cur.trim().is_empty() {
        out.push((cur_at, cur));
    }
    out
}

fn parse_term(vars: &VarSet, chunk: String, at: usize) -> Result<(BigRational, Vec<i64>), PolyError> {
    let mut coeff = BigRational::one();
    let mut exps = vec![0i64; vars.len()];
    let mut body = chunk.as_str();
    if let Some(rest) = body.strip_prefix('-') {
        coeff = -coeff;
        body = rest;
    }
    if body == "0" {
        return Ok((BigRational::zero(), exps));
    }
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(PolyError::Parse { at, msg: "empty factor".into() });
        }
        if factor.chars().next().unwrap().is_ascii_digit() {
            let c = parse_rational(factor)
                .ok_or_else(|| PolyError::Parse { at, msg: format!("bad rational `{factor}`") })?;
            coeff *= c;
            continue;
        }
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => {
                let exp: i64 = e.parse().map_err(|_| PolyError::Parse {
                    at,
                    msg: format!("bad exponent `{e}`"),
                })?;
                (n, exp)
            }
            None => (factor, 1),
        };
        let k = vars.position(name).ok_or_else(|| PolyError::Parse {
            at,
            msg: format!("unknown variable `{name}`"),
        })?;
        exps[k] += exp;
    }
    Ok((coeff, exps))
}

// ---- Display ----

/// Renders one monomial factor list (no coefficient) or empty for a constant.
fn push_monomial(out: &mut String, vars: &VarSet, exps: &[i64]) {
    for (k, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        out.push('*');
        out.push_str(vars.name(k));
        if e != 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms() {
            if first {
                first = false;
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut s = String::new();
            push_monomial(&mut s, &self.vars, &e);
            let abs = c.abs();
            if s.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", &s[1..])?;
            } else {
                write!(f, "{}{}", format_rational(&abs), s)?;
            }
        }
        Ok(())
    }
}

// ---- Add ----

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.assert_same_vars(rhs);
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            LaurentPoly::insert_term(&mut terms, e.clone(), c.clone());
        }
        LaurentPoly { vars: self.vars.clone(), terms }
    }
}

impl std::ops::Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

// ---- Sub ----

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl std::ops::Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

// ---- Neg ----

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }
}

impl std::ops::Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

// ---- Mul ----

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.assert_same_vars(rhs);
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                LaurentPoly::insert_term(&mut terms, e, ca * cb);
            }
        }
        LaurentPoly { vars: self.vars.clone(), terms }
    }
}

impl std::ops::Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn zero_is_empty_map() {
        let vars = VarSet::base(2);
        let x = LaurentPoly::var(&vars, 0);
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn display_matches_grammar() {
        let vars = VarSet::base(2);
        // 3/2*x1^2*y^-1 - x1
        let p = &LaurentPoly::monomial(&vars, BigRational::new(BigInt::from(3), BigInt::from(2)), &[2, -1])
            - &LaurentPoly::var(&vars, 0);
        assert_eq!(p.to_string(), "3/2*x1^2*y^-1 - x1");
        let back = LaurentPoly::parse(&vars, &p.to_string()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn parse_accepts_loose_spacing() {
        let vars = VarSet::base(3);
        let p = LaurentPoly::parse(&vars, " - 2 * x1 ^ 2 * y + x2 -1/3 ").unwrap();
        assert_eq!(p.coeff(&[2, 0, 1]), q(-2));
        assert_eq!(p.coeff(&[0, 1, 0]), q(1));
        assert_eq!(p.coeff(&[0, 0, 0]), BigRational::new(BigInt::from(-1), BigInt::from(3)));
    }

    #[test]
    fn parse_rejects_unknown_variable() {
        let vars = VarSet::base(2);
        assert!(matches!(
            LaurentPoly::parse(&vars, "w^2"),
            Err(PolyError::Parse { .. })
        ));
    }

    #[test]
    fn product_of_laurent_monomials() {
        let vars = VarSet::base(2);
        let a = LaurentPoly::monomial(&vars, q(2), &[1, -3]);
        let b = LaurentPoly::monomial(&vars, q(-1), &[-1, 5]);
        let ab = &a * &b;
        assert_eq!(ab, LaurentPoly::monomial(&vars, q(-2), &[0, 2]));
    }

    #[test]
    fn eval_with_negative_exponents() {
        let vars = VarSet::base(2);
        let p = LaurentPoly::parse(&vars, "x1^2*y^-1 + 3").unwrap();
        let v = p.eval(&[q(2), q(4)]).unwrap();
        assert_eq!(v, q(4));
        assert!(matches!(
            p.eval(&[q(2), q(0)]),
            Err(PolyError::ZeroToNegativePower)
        ));
    }

    #[test]
    fn substitute_powers_scales_exponents() {
        let vars = VarSet::base(2);
        let p = LaurentPoly::parse(&vars, "x1*y^-2 + y").unwrap();
        let sq = p.substitute_powers(&[3, 3]);
        assert_eq!(sq, LaurentPoly::parse(&vars, "x1^3*y^-6 + y^3").unwrap());
    }
}
