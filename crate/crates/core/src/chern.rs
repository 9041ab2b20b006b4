//! Symbolic verification of the Chern-class constraints a based fiber map
//! places on a projectivized bundle.
//!
//! The ambient ring is modeled as Q[c]/(c^{dim+1}) with one formal class
//! generator, so every Chern class is a polynomial in `c` (a [`ChernTable`]
//! holds one polynomial per degree). The relative hyperplane class `L`
//! satisfies `P(L) = Σ (-1)^i L^{r-i} c_i = 0`, and a degree-d fiber map
//! pulls `L` back to `d·L + α` while scaling `c_i` by `q^i`. Comparing
//! `L`-power coefficients of the pulled-back relation against `d^r` times
//! the original gives one equation per power; [`expand_pullback`] computes
//! those residuals exactly, with `d` and `q` symbolic.
//!
//! The binomial table `c_k = binom(r,k) c^k / r^k` satisfies every
//! equation identically: with `α = (q-d)c/r` the relation collapses to
//! `(dL + (q-d)c/r - qc/r)^r = d^r (L - c/r)^r`. The remaining items walk
//! the supporting algebra - the closed form for a single `L`-power
//! coefficient, the forced value of `α`, the alternating binomial identity
//! the induction bottoms out on, and the integer comparison that rules
//! out nontrivial based maps on projectivized tangent bundles of
//! projective spaces.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{binomial, int_pow};
use crate::poly::{LaurentPoly, VarSet};

/// Variable order of the shared ring: the class generator, the fiber
/// degree, the eigenvalue scale, and the relative hyperplane class.
pub fn chern_vars() -> VarSet {
    VarSet::new(&["c", "d", "q", "L"])
}

const C: usize = 0;
const D: usize = 1;
const Q: usize = 2;
const L: usize = 3;

fn mono(vars: &VarSet, coeff: BigRational, exps: [i64; 4]) -> LaurentPoly {
    LaurentPoly::monomial(vars, coeff, &exps)
}

fn var_power(vars: &VarSet, idx: usize, e: i64) -> LaurentPoly {
    let mut exps = [0i64; 4];
    exps[idx] = e;
    mono(vars, BigRational::one(), exps)
}

/// Coefficient of `L^e`, as a polynomial in the remaining variables.
fn coeff_of_l(p: &LaurentPoly, e: i64) -> LaurentPoly {
    let vars = p.vars().clone();
    let mut out = LaurentPoly::zero(&vars);
    for (exps, c) in p.terms() {
        if exps[L] == e {
            let mut reduced = exps.clone();
            reduced[L] = 0;
            out = &out + &LaurentPoly::monomial(&vars, c.clone(), &reduced);
        }
    }
    out
}

/// Reduction modulo `c^{dim+1}`.
fn truncate_class(p: &LaurentPoly, dim: usize) -> LaurentPoly {
    let vars = p.vars().clone();
    let mut out = LaurentPoly::zero(&vars);
    for (exps, c) in p.terms() {
        if exps[C] <= dim as i64 {
            out = &out + &LaurentPoly::monomial(&vars, c.clone(), exps);
        }
    }
    out
}

fn substitute_value(p: &LaurentPoly, idx: usize, value: &BigRational) -> LaurentPoly {
    let vars = p.vars().clone();
    let mut out = LaurentPoly::zero(&vars);
    for (exps, c) in p.terms() {
        let e = exps[idx];
        assert!(e >= 0 || !value.is_zero(), "negative power of zero");
        let factor = if e >= 0 {
            num_traits::pow::pow(value.clone(), e as usize)
        } else {
            num_traits::pow::pow(value.clone(), (-e) as usize).recip()
        };
        let mut reduced = exps.clone();
        reduced[idx] = 0;
        out = &out + &LaurentPoly::monomial(&vars, c * factor, &reduced);
    }
    out
}

/// Chern classes of a rank-r bundle, each written in powers of the class
/// generator. Entry `k` is `c_k`; entry 0 must be 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernTable {
    r: usize,
    entries: Vec<LaurentPoly>,
}

impl ChernTable {
    /// The binomial table `c_k = binom(r,k) c^k / r^k`, the unique one (up
    /// to the class-ring truncation) compatible with a based fiber map.
    pub fn canonical(r: usize) -> Self {
        assert!(r >= 1);
        let vars = chern_vars();
        let entries = (0..=r)
            .map(|k| {
                let coeff = BigRational::new(binomial(r as i64, k as i64), int_pow(r as i64, k as u32));
                mono(&vars, coeff, [k as i64, 0, 0, 0])
            })
            .collect();
        ChernTable { r, entries }
    }

    /// A custom table; entries must use only the class generator.
    pub fn custom(r: usize, entries: Vec<LaurentPoly>) -> Self {
        assert_eq!(entries.len(), r + 1, "need entries c_0..c_r");
        assert!(entries[0].is_constant(), "c_0 must be the unit");
        for e in &entries {
            for (exps, _) in e.terms() {
                assert!(exps[D] == 0 && exps[Q] == 0 && exps[L] == 0, "table entries live in c only");
                assert!(exps[C] >= 0, "table entries are polynomials");
            }
        }
        ChernTable { r, entries }
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn entry(&self, k: usize) -> &LaurentPoly {
        &self.entries[k]
    }

    /// Returns a copy with `delta` added to `c_k`; used to probe how the
    /// residuals detect a wrong table.
    pub fn perturbed(&self, k: usize, delta: &LaurentPoly) -> Self {
        let mut entries = self.entries.clone();
        entries[k] = &entries[k] + delta;
        ChernTable { r: self.r, entries }
    }

    /// The defining relation `P(L) = Σ (-1)^i L^{r-i} c_i`.
    pub fn relation(&self) -> LaurentPoly {
        let vars = chern_vars();
        let mut p = LaurentPoly::zero(&vars);
        for (i, ci) in self.entries.iter().enumerate() {
            let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            let term = &var_power(&vars, L, (self.r - i) as i64) * ci;
            p = &p + &term.scale(&sign);
        }
        p
    }
}

/// The transition summand forced on the pulled-back hyperplane class.
pub fn forced_alpha(r: usize) -> LaurentPoly {
    let vars = chern_vars();
    let rr = BigRational::from(BigInt::from(r as i64));
    let q_term = mono(&vars, (&rr).recip(), [1, 0, 1, 0]);
    let d_term = mono(&vars, (&rr).recip(), [1, 1, 0, 0]);
    &q_term - &d_term
}

/// Pullback of the defining relation: `L ↦ d·L + α`, `c_i ↦ q^i c_i`.
fn pulled_relation(table: &ChernTable, alpha: &LaurentPoly) -> LaurentPoly {
    let vars = chern_vars();
    let r = table.r;
    let dl = mono(&vars, BigRational::one(), [0, 1, 0, 1]);
    let image_l = &dl + alpha;
    let mut p = LaurentPoly::zero(&vars);
    for (i, ci) in table.entries.iter().enumerate() {
        let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let term = &image_l.pow((r - i) as u32) * &(ci * &var_power(&vars, Q, i as i64));
        p = &p + &term.scale(&sign);
    }
    p
}

/// One residual per `L`-power of the pulled-back relation minus `d^r`
/// times the original, reduced modulo `c^{dim+1}`. Entry `k` belongs to
/// `L^{r-k}`; all entries vanish exactly when the table is compatible.
#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub rank: usize,
    pub dim: usize,
    pub residuals: Vec<LaurentPoly>,
}

impl PullbackReport {
    pub fn ok(&self) -> bool {
        self.residuals.iter().all(LaurentPoly::is_zero)
    }

    /// Indices whose residual survives, i.e. the failing `L`-powers.
    pub fn failing(&self) -> Vec<usize> {
        self.residuals
            .iter()
            .enumerate()
            .filter_map(|(k, p)| (!p.is_zero()).then_some(k))
            .collect()
    }
}

/// Symbolic residuals in `(c, d, q)` with `α = (q-d)c/r` substituted.
pub fn expand_pullback(table: &ChernTable, dim: usize) -> PullbackReport {
    let r = table.r;
    let alpha = forced_alpha(r);
    let lhs = pulled_relation(table, &alpha);
    let rhs = table.relation();
    let dr = var_power(&chern_vars(), D, r as i64);
    let diff = &lhs - &(&dr * &rhs);
    let reduced = truncate_class(&diff, dim);
    let residuals = (0..=r)
        .map(|k| coeff_of_l(&reduced, (r - k) as i64))
        .collect();
    PullbackReport { rank: r, dim, residuals }
}

/// Residuals with specific integers substituted for `d` and `q`.
pub fn expand_pullback_at(table: &ChernTable, dim: usize, d: i64, q: i64) -> PullbackReport {
    let symbolic = expand_pullback(table, dim);
    let dv = BigRational::from(BigInt::from(d));
    let qv = BigRational::from(BigInt::from(q));
    let residuals = symbolic
        .residuals
        .iter()
        .map(|p| substitute_value(&substitute_value(p, D, &dv), Q, &qv))
        .collect();
    PullbackReport { rank: symbolic.rank, dim, residuals }
}

/// Variables for the opaque-coefficient view: the fiber degree, the
/// transition summand, the hyperplane class, and one symbol per pulled
/// Chern class.
pub fn opaque_vars(r: usize) -> VarSet {
    let mut names = vec!["d".to_string(), "alpha".to_string(), "L".to_string()];
    for i in 0..=r {
        names.push(format!("c{i}"));
    }
    VarSet::new(&names)
}

/// Closed form for the coefficient of `L^k` in the pulled-back relation,
/// with the pulled Chern classes kept opaque:
/// `Σ_{i=0}^{r-k} (-1)^i binom(r-i, k) d^k α^{r-k-i} c_i`.
pub fn lemma_coefficient(r: usize, k: usize) -> LaurentPoly {
    let vars = opaque_vars(r);
    let mut out = LaurentPoly::zero(&vars);
    for i in 0..=(r - k) {
        let b = binomial((r - i) as i64, k as i64);
        if b.is_zero() {
            continue;
        }
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let mut exps = vec![0i64; vars.len()];
        exps[0] = k as i64;
        exps[1] = (r - k - i) as i64;
        exps[3 + i] = 1;
        out = &out + &LaurentPoly::monomial(&vars, BigRational::from(sign * b), &exps);
    }
    out
}

/// The same coefficient obtained by brute expansion of
/// `Σ (-1)^i (dL + α)^{r-i} c_i`; the closed form above must agree.
pub fn lemma_coefficient_by_expansion(r: usize, k: usize) -> LaurentPoly {
    let vars = opaque_vars(r);
    let dl = {
        let mut exps = vec![0i64; vars.len()];
        exps[0] = 1;
        exps[2] = 1;
        LaurentPoly::monomial(&vars, BigRational::one(), &exps)
    };
    let alpha = {
        let mut exps = vec![0i64; vars.len()];
        exps[1] = 1;
        LaurentPoly::monomial(&vars, BigRational::one(), &exps)
    };
    let image_l = &dl + &alpha;
    let mut total = LaurentPoly::zero(&vars);
    for i in 0..=r {
        let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let mut exps = vec![0i64; vars.len()];
        exps[3 + i] = 1;
        let ci = LaurentPoly::monomial(&vars, sign, &exps);
        total = &total + &(&image_l.pow((r - i) as u32) * &ci);
    }
    let mut out = LaurentPoly::zero(&vars);
    for (exps, c) in total.terms() {
        if exps[2] == k as i64 {
            let mut reduced = exps.clone();
            reduced[2] = 0;
            out = &out + &LaurentPoly::monomial(&vars, c.clone(), &reduced);
        }
    }
    out
}

/// The alternating binomial identity the induction bottoms out on:
/// `Σ_{i=0}^{k} (-1)^i binom(k+1,i) q^i (q-d)^{k+1-i} = (-1)^{k+1}(d^{k+1} - q^{k+1})`.
///
/// Implemented in the divided normal form: adding the missing `i = k+1`
/// term turns the left side into `((q-d) - q)^{k+1}`.
pub fn appendix_identity(k: u32, d: i64, q: i64) -> bool {
    let mut lhs = BigInt::zero();
    for i in 0..=k {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        lhs += sign * binomial(k as i64 + 1, i as i64) * int_pow(q, i) * int_pow(q - d, k + 1 - i);
    }
    let sign = if (k + 1) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let rhs = sign * (int_pow(d, k + 1) - int_pow(q, k + 1));
    lhs == rhs
}

fn dq_vars() -> VarSet {
    VarSet::new(&["d", "q"])
}

fn dq_var(vars: &VarSet, idx: usize) -> LaurentPoly {
    let mut exps = [0i64; 2];
    exps[idx] = 1;
    LaurentPoly::monomial(vars, BigRational::one(), &exps)
}

/// The same identity as a polynomial statement in `(d, q)`.
pub fn appendix_identity_symbolic(k: u32) -> bool {
    let vars = dq_vars();
    let d = dq_var(&vars, 0);
    let q = dq_var(&vars, 1);
    let q_minus_d = &q - &d;
    let mut lhs = LaurentPoly::zero(&vars);
    for i in 0..=k {
        let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let coeff = BigRational::from(binomial(k as i64 + 1, i as i64)) * sign;
        let term = &q.pow(i) * &q_minus_d.pow(k + 1 - i);
        lhs = &lhs + &term.scale(&coeff);
    }
    let sign = if (k + 1) % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    let rhs = (&d.pow(k + 1) - &q.pow(k + 1)).scale(&sign);
    (&lhs - &rhs).is_zero()
}

/// Subset-of-a-subset revision used to collapse the induction:
/// `binom(r-i, r-m) binom(r,i) = binom(r,m) binom(m,i)` for all
/// `0 <= i <= m <= r`.
pub fn trinomial_revision(r: usize) -> bool {
    for m in 0..=r as i64 {
        for i in 0..=m {
            let lhs = binomial(r as i64 - i, r as i64 - m) * binomial(r as i64, i);
            let rhs = binomial(r as i64, m) * binomial(m, i);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Mechanical replay of one induction step: assuming the binomial table
/// through degree `k`, the `L^{r-(k+1)}` equation determines `c_{k+1}`
/// exactly when
/// `Σ_{i=0}^{k} (-1)^i binom(r-i, r-(k+1)) binom(r,i) (q-d)^{k+1-i} q^i`
/// equals `(-1)^{k+1} (d^{k+1} - q^{k+1}) binom(r, k+1)` - the divided
/// identity scaled by the revision factor. Verified as a polynomial
/// identity in `(d, q)`.
pub fn inductive_step(r: usize, k: usize) -> bool {
    assert!(k + 1 <= r, "the step needs a class of degree k+1 <= r");
    let vars = dq_vars();
    let d = dq_var(&vars, 0);
    let q = dq_var(&vars, 1);
    let q_minus_d = &q - &d;
    let mut lhs = LaurentPoly::zero(&vars);
    for i in 0..=k {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let coeff = sign
            * binomial((r - i) as i64, (r - (k + 1)) as i64)
            * binomial(r as i64, i as i64);
        if coeff.is_zero() {
            continue;
        }
        let term = &q.pow(i as u32) * &q_minus_d.pow((k + 1 - i) as u32);
        lhs = &lhs + &term.scale(&BigRational::from(coeff));
    }
    let sign = if (k + 1) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let scale = BigRational::from(sign * binomial(r as i64, (k + 1) as i64));
    let rhs = (&d.pow((k + 1) as u32) - &q.pow((k + 1) as u32)).scale(&scale);
    (&lhs - &rhs).is_zero()
}

/// Outcome of the integer comparison on a projectivized tangent bundle of
/// projective n-space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PnVerdict {
    /// `n = 1`: no degree in range, nothing to obstruct.
    Vacuous,
    /// Some degree fails the comparison; no based fiber map can satisfy
    /// the Chern constraints.
    NoExoticBasedMap { k: usize, lhs: BigInt, rhs: BigInt },
    /// All comparisons hold (does not occur for `n >= 2`).
    ConstraintsConsistent,
}

/// One comparison row: `binom(n+1,k) n^k` against `binom(n,k) (n+1)^k`.
#[derive(Clone, Debug)]
pub struct PnComparison {
    pub k: usize,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl PnComparison {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug)]
pub struct PnObstruction {
    pub n: usize,
    pub comparisons: Vec<PnComparison>,
    pub verdict: PnVerdict,
}

/// The tangent bundle of projective n-space has `c_k = binom(n+1,k) h^k`;
/// compatibility with a based fiber map would force the binomial table,
/// i.e. `binom(n+1,k) n^k = binom(n,k) (n+1)^k` for every `2 <= k <= n`.
/// The comparison already fails at `k = n`, where it reads
/// `(n+1) n^n = (n+1)^n`.
pub fn pn_tangent_obstruction(n: usize) -> PnObstruction {
    assert!(n >= 1);
    let mut comparisons = Vec::new();
    for k in 2..=n {
        let lhs = binomial(n as i64 + 1, k as i64) * int_pow(n as i64, k as u32);
        let rhs = binomial(n as i64, k as i64) * int_pow(n as i64 + 1, k as u32);
        comparisons.push(PnComparison { k, lhs, rhs });
    }
    // witness at k = n when it fails (it always does for n >= 2); fall
    // back to the first failing row only as defensive coverage
    let verdict = if comparisons.is_empty() {
        PnVerdict::Vacuous
    } else if let Some(bad) = comparisons
        .iter()
        .rev()
        .find(|c| c.k == n && !c.holds())
        .or_else(|| comparisons.iter().find(|c| !c.holds()))
    {
        PnVerdict::NoExoticBasedMap { k: bad.k, lhs: bad.lhs.clone(), rhs: bad.rhs.clone() }
    } else {
        PnVerdict::ConstraintsConsistent
    };
    PnObstruction { n, comparisons, verdict }
}
