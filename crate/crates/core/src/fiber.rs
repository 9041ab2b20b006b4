//! Homogeneous fiber polynomials and the chart semigroup ring.
//!
//! A `FiberPoly` is a polynomial of fixed total degree `d` in fiber
//! variables `z1,…,zr`, with Laurent-polynomial coefficients in the chart
//! variables. Coefficients are stored per composition of `d`; zero
//! coefficients are never kept, and the nominal degree survives even for
//! the zero polynomial.
//!
//! `SemigroupRing` models the coordinate ring
//! `C[x1*y^-a1, …, x{n−1}*y^-a{n−1}, y^-1]` of the chart across a wall.
//! Membership of a Laurent monomial is decided exactly: the x-exponents
//! force the witness on the first n−1 generators, leaving one sign check.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::comp::{self, Composition};
use crate::poly::{LaurentPoly, PolyError, VarSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiberError {
    #[error("composition {0:?} does not match degree {1}")]
    DegreeMismatch(Composition, u32),
    #[error("substitution image for z{0} is not homogeneous of degree 1")]
    NonLinearImage(usize),
    #[error("wrong number of substitution images: got {got}, need {need}")]
    ImageCount { got: usize, need: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Homogeneous degree-d polynomial in `z1,…,zr` over Laurent coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPoly {
    vars: VarSet,
    nfiber: usize,
    degree: u32,
    coeffs: BTreeMap<Composition, LaurentPoly>,
}

impl FiberPoly {
    // ---- Constructors ----

    pub fn zero(vars: &VarSet, nfiber: usize, degree: u32) -> Self {
        assert!(nfiber >= 1);
        FiberPoly { vars: vars.clone(), nfiber, degree, coeffs: BTreeMap::new() }
    }

    /// Single fiber monomial `coeff * z^lambda`.
    pub fn monomial(vars: &VarSet, lambda: &Composition, coeff: LaurentPoly) -> Self {
        let degree = comp::total(lambda);
        let mut f = Self::zero(vars, lambda.len(), degree);
        f.add_term(lambda, coeff);
        f
    }

    /// The fiber variable `z{k+1}` as a degree-1 polynomial.
    pub fn fiber_var(vars: &VarSet, nfiber: usize, k: usize) -> Self {
        Self::monomial(vars, &comp::scaled_unit(1, nfiber, k), LaurentPoly::one(vars))
    }

    /// Adds `coeff * z^lambda`, merging with an existing term.
    pub fn add_term(&mut self, lambda: &Composition, coeff: LaurentPoly) {
        assert_eq!(lambda.len(), self.nfiber, "composition length mismatch");
        assert_eq!(comp::total(lambda), self.degree, "inhomogeneous term");
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(lambda.clone()) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    // ---- Inspection ----

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_fiber_vars(&self) -> usize {
        self.nfiber
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Compositions carrying a nonzero coefficient, in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &Composition> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Composition, &LaurentPoly)> {
        self.coeffs.iter()
    }

    /// The coefficient-extraction operator `[z^lambda]`.
    pub fn extract_coeff(&self, lambda: &Composition) -> Result<LaurentPoly, FiberError> {
        if lambda.len() != self.nfiber || comp::total(lambda) != self.degree {
            return Err(FiberError::DegreeMismatch(lambda.clone(), self.degree));
        }
        Ok(self
            .coeffs
            .get(lambda)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(&self.vars)))
    }

    // ---- Arithmetic ----

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch in fiber sum");
        assert_eq!(self.nfiber, other.nfiber);
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_term(l, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(l, c)| (l.clone(), -c)).collect();
        FiberPoly { vars: self.vars.clone(), nfiber: self.nfiber, degree: self.degree, coeffs }
    }

    /// Multiplies every coefficient by a Laurent polynomial.
    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(&self.vars, self.nfiber, self.degree);
        for (l, k) in &self.coeffs {
            out.add_term(l, k * c);
        }
        out
    }

    /// Product of fiber polynomials; degrees add.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nfiber, other.nfiber);
        let mut out = Self::zero(&self.vars, self.nfiber, self.degree + other.degree);
        for (la, ca) in &self.coeffs {
            for (lb, cb) in &other.coeffs {
                let l: Composition = la.iter().zip(lb).map(|(a, b)| a + b).collect();
                out.add_term(&l, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::monomial(
            &self.vars,
            &vec![0; self.nfiber],
            LaurentPoly::one(&self.vars),
        );
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Full expansion of `f(images)`, where `images[k]` replaces `z{k+1}`.
    /// Every image must be homogeneous of degree 1, so the result keeps the
    /// degree of `f`.
    pub fn substitute(&self, images: &[FiberPoly]) -> Result<Self, FiberError> {
        if images.len() != self.nfiber {
            return Err(FiberError::ImageCount { got: images.len(), need: self.nfiber });
        }
        for (k, img) in images.iter().enumerate() {
            if img.degree != 1 {
                return Err(FiberError::NonLinearImage(k + 1));
            }
            assert_eq!(img.nfiber, self.nfiber);
        }
        let mut out = Self::zero(&self.vars, self.nfiber, self.degree);
        for (lambda, c) in &self.coeffs {
            let mut term = Self::monomial(
                &self.vars,
                &vec![0; self.nfiber],
                LaurentPoly::one(&self.vars),
            );
            for (k, &e) in lambda.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[k].pow(e));
                }
            }
            out = out.add(&term.scale(c));
        }
        Ok(out)
    }

    /// Applies a map to every coefficient (e.g. a variable substitution).
    pub fn map_coeffs<F: Fn(&LaurentPoly) -> LaurentPoly>(&self, f: F) -> Self {
        let mut out = Self::zero(&self.vars, self.nfiber, self.degree);
        for (l, c) in &self.coeffs {
            out.add_term(l, f(c));
        }
        out
    }

    /// Relabels fiber variables by `perm`: new index `perm[k]` receives the
    /// old `z{k+1}` exponent. Used to report in original wall indexing.
    pub fn permute_fiber(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nfiber);
        let mut out = Self::zero(&self.vars, self.nfiber, self.degree);
        for (l, c) in &self.coeffs {
            let mut nl = vec![0u32; self.nfiber];
            for (k, &e) in l.iter().enumerate() {
                nl[perm[k]] = e;
            }
            out.add_term(&nl, c.clone());
        }
        out
    }

    /// Exact evaluation at a base point and fiber point.
    pub fn eval(
        &self,
        base: &[BigRational],
        fiber: &[BigRational],
    ) -> Result<BigRational, FiberError> {
        assert_eq!(fiber.len(), self.nfiber);
        let mut acc = BigRational::zero();
        for (l, c) in &self.coeffs {
            let mut term = c.eval(base)?;
            if term.is_zero() {
                continue;
            }
            for (zk, &e) in fiber.iter().zip(l.iter()) {
                for _ in 0..e {
                    term *= zk;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Parses the expanded grammar over `vars + z1..zr`: the z-exponents of
    /// every term must be nonnegative and sum to the same degree.
    pub fn parse(vars: &VarSet, nfiber: usize, input: &str) -> Result<Self, FiberError> {
        let mut names: Vec<String> = vars.names().to_vec();
        for k in 1..=nfiber {
            names.push(format!("z{k}"));
        }
        let ext = VarSet::new(&names);
        let p = LaurentPoly::parse(&ext, input)?;
        let nbase = vars.len();
        let mut degree: Option<u32> = None;
        let mut terms: Vec<(Composition, Vec<i64>, BigRational)> = Vec::new();
        for (e, c) in p.terms() {
            let (base, zpart) = e.split_at(nbase);
            if zpart.iter().any(|&v| v < 0) {
                return Err(PolyError::Parse {
                    at: 0,
                    msg: "negative fiber exponent".into(),
                }
                .into());
            }
            let lambda: Composition = zpart.iter().map(|&v| v as u32).collect();
            let d = comp::total(&lambda);
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => {
                    return Err(FiberError::DegreeMismatch(lambda, d0));
                }
                _ => {}
            }
            terms.push((lambda, base.to_vec(), c.clone()));
        }
        let mut out = Self::zero(vars, nfiber, degree.unwrap_or(0));
        for (lambda, base, c) in terms {
            out.add_term(&lambda, LaurentPoly::monomial(vars, c, &base));
        }
        Ok(out)
    }
}

impl fmt::Display for FiberPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (lambda, c) in &self.coeffs {
            let mut zpart = String::new();
            for (k, &e) in lambda.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                zpart.push('*');
                zpart.push_str(&format!("z{}", k + 1));
                if e != 1 {
                    zpart.push('^');
                    zpart.push_str(&e.to_string());
                }
            }
            let inner = c.to_string();
            let wrapped = if c.num_terms() > 1 {
                format!("({inner})")
            } else {
                inner
            };
            if first {
                first = false;
                write!(f, "{wrapped}{zpart}")?;
            } else {
                write!(f, " + {wrapped}{zpart}")?;
            }
        }
        Ok(())
    }
}

// ---- Semigroup membership ----

/// The ring `C[x1*y^-a1, …, x{n−1}*y^-a{n−1}, y^-1]` attached to a wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupRing {
    a: Vec<i64>,
}

/// Outcome of a membership test, with the witness when the answer is yes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub member: bool,
    /// Exponents (α_1,…,α_{n−1}, β) with monomial = Π gens^α · (y^-1)^β.
    pub witness: Option<Vec<i64>>,
}

impl SemigroupRing {
    pub fn new(a: &[i64]) -> Self {
        SemigroupRing { a: a.to_vec() }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.a
    }

    /// Number of generators (= chart dimension n).
    pub fn ngens(&self) -> usize {
        self.a.len() + 1
    }

    /// The generator exponent vectors over `(x1,…,x{n−1}, y)`.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        let n = self.ngens();
        let mut gens = Vec::with_capacity(n);
        for (i, &ai) in self.a.iter().enumerate() {
            let mut g = vec![0i64; n];
            g[i] = 1;
            g[n - 1] = -ai;
            gens.push(g);
        }
        let mut last = vec![0i64; n];
        last[n - 1] = -1;
        gens.push(last);
        gens
    }

    /// Exact membership of a Laurent monomial given by its exponent vector
    /// `(e_1,…,e_{n−1}, h)`. The x-exponents force α_i = e_i; membership
    /// then reduces to β = −h − Σ a_i e_i ≥ 0.
    pub fn member(&self, exps: &[i64]) -> MembershipReport {
        assert_eq!(exps.len(), self.ngens(), "exponent vector length mismatch");
        let (xs, h) = (&exps[..exps.len() - 1], exps[exps.len() - 1]);
        if xs.iter().any(|&e| e < 0) {
            return MembershipReport { member: false, witness: None };
        }
        let balance: i64 = -h - self.a.iter().zip(xs).map(|(a, e)| a * e).sum::<i64>();
        if balance < 0 {
            return MembershipReport { member: false, witness: None };
        }
        let mut witness = xs.to_vec();
        witness.push(balance);
        MembershipReport { member: true, witness: Some(witness) }
    }

    /// Membership of a one-term Laurent polynomial.
    pub fn member_poly(&self, m: &LaurentPoly) -> Result<MembershipReport, PolyError> {
        let (exps, _) = m.as_monomial()?;
        Ok(self.member(&exps))
    }
}
