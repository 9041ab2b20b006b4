//! Transition matrices across a wall and their action on symmetric powers.
//!
//! Fix a wall with relation coefficients `a = (a_1, …, a_{n−1})`. On the
//! overlap of the two dual charts the tangent and cotangent bundles
//! trivialize with transition matrices that are Laurent monomial matrices
//! in the chart coordinates `x_1, …, x_{n−1}, y`:
//!
//! * tangent: diagonal `y^{−a_i}`, last column `−a_i·x_i·y^{−a_i−1}`,
//!   corner `−y^{−2}`;
//! * cotangent: the inverse transpose, with diagonal `y^{a_i}`, last row
//!   `−a_i·x_i·y`, corner `−y^2`.
//!
//! A matrix acts on fiber coordinates by its columns, `z_k ↦ Σ_i M_{ik}
//! z_i`, and on a degree-d fiber form by substitution, which is the induced
//! action on the d-th symmetric power. For the tangent matrix this action
//! has a closed form per matrix entry, [`closed_form_coeff`], and two
//! cotangent coefficient extractions come in closed form as well,
//! [`cotangent_key_coeffs`]. Both are the workhorses of the obstruction
//! analysis; both are cross-checked against raw substitution in the tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{int_pow, multinomial};
use crate::comp::{self, CompError, Composition};
use crate::fiber::FiberPoly;
use crate::poly::{LaurentPoly, VarSet};

/// A square matrix of Laurent polynomials acting on fiber coordinates.
///
/// `entries[i][k]` is the coefficient of `z_i` in the image of `z_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    vars: VarSet,
    size: usize,
    entries: Vec<Vec<LaurentPoly>>,
}

impl TransitionMatrix {
    pub fn new(vars: VarSet, entries: Vec<Vec<LaurentPoly>>) -> Self {
        let size = entries.len();
        assert!(entries.iter().all(|r| r.len() == size), "matrix must be square");
        TransitionMatrix { vars, size, entries }
    }

    pub fn identity(vars: &VarSet, size: usize) -> Self {
        let entries = (0..size)
            .map(|i| {
                (0..size)
                    .map(|k| {
                        if i == k {
                            LaurentPoly::one(vars)
                        } else {
                            LaurentPoly::zero(vars)
                        }
                    })
                    .collect()
            })
            .collect();
        TransitionMatrix { vars: vars.clone(), size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn entry(&self, i: usize, k: usize) -> &LaurentPoly {
        &self.entries[i][k]
    }

    pub fn transpose(&self) -> Self {
        let entries = (0..self.size)
            .map(|i| (0..self.size).map(|k| self.entries[k][i].clone()).collect())
            .collect();
        TransitionMatrix { vars: self.vars.clone(), size: self.size, entries }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.size, other.size);
        let entries = (0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|k| {
                        let mut acc = LaurentPoly::zero(&self.vars);
                        for j in 0..self.size {
                            acc = &acc + &(&self.entries[i][j] * &other.entries[j][k]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        TransitionMatrix { vars: self.vars.clone(), size: self.size, entries }
    }

    /// Laplace expansion determinant; the matrices here are tiny.
    pub fn det(&self) -> LaurentPoly {
        fn go(m: &TransitionMatrix, rows: &[usize], cols: &[usize]) -> LaurentPoly {
            if rows.is_empty() {
                return LaurentPoly::one(&m.vars);
            }
            let mut acc = LaurentPoly::zero(&m.vars);
            let r = rows[0];
            for (pos, &c) in cols.iter().enumerate() {
                if m.entries[r][c].is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> =
                    cols.iter().copied().filter(|&x| x != c).collect();
                let minor = go(m, &rows[1..], &sub_cols);
                let term = &m.entries[r][c] * &minor;
                acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.size).collect();
        go(self, &idx, &idx)
    }

    /// Column `k` as a degree-one fiber form `Σ_i M_{ik} z_i`.
    pub fn column_form(&self, k: usize) -> FiberPoly {
        let mut f = FiberPoly::zero(&self.vars, self.size, 1);
        for i in 0..self.size {
            if !self.entries[i][k].is_zero() {
                let unit: Composition = (0..self.size)
                    .map(|j| if j == i { 1 } else { 0 })
                    .collect();
                f.add_term(&unit, self.entries[i][k].clone());
            }
        }
        f
    }
}

/// The tangent transition matrix for wall coefficients `a`.
pub fn tangent_jacobian(a: &[i64]) -> TransitionMatrix {
    let n = a.len() + 1;
    let vars = VarSet::base(n);
    let mut entries = vec![vec![LaurentPoly::zero(&vars); n]; n];
    for (i, &ai) in a.iter().enumerate() {
        let mut diag = vec![0i64; n];
        diag[n - 1] = -ai;
        entries[i][i] = LaurentPoly::monomial(&vars, BigRational::one(), &diag);
        let mut last = vec![0i64; n];
        last[i] = 1;
        last[n - 1] = -ai - 1;
        entries[i][n - 1] = LaurentPoly::monomial(
            &vars,
            BigRational::from(BigInt::from(-ai)),
            &last,
        );
    }
    let mut corner = vec![0i64; n];
    corner[n - 1] = -2;
    entries[n - 1][n - 1] =
        LaurentPoly::monomial(&vars, -BigRational::one(), &corner);
    TransitionMatrix::new(vars, entries)
}

/// The cotangent transition matrix (inverse transpose of the tangent one).
pub fn cotangent_jacobian(a: &[i64]) -> TransitionMatrix {
    let n = a.len() + 1;
    let vars = VarSet::base(n);
    let mut entries = vec![vec![LaurentPoly::zero(&vars); n]; n];
    for (i, &ai) in a.iter().enumerate() {
        let mut diag = vec![0i64; n];
        diag[n - 1] = ai;
        entries[i][i] = LaurentPoly::monomial(&vars, BigRational::one(), &diag);
        let mut row = vec![0i64; n];
        row[i] = 1;
        row[n - 1] = 1;
        entries[n - 1][i] = LaurentPoly::monomial(
            &vars,
            BigRational::from(BigInt::from(-ai)),
            &row,
        );
    }
    let mut corner = vec![0i64; n];
    corner[n - 1] = 2;
    entries[n - 1][n - 1] =
        LaurentPoly::monomial(&vars, -BigRational::one(), &corner);
    TransitionMatrix::new(vars, entries)
}

/// Induced action on a degree-d fiber form: substitute `z_k ↦ Σ_i M_{ik}
/// z_i` and expand. Exact, no truncation.
pub fn sym_action(m: &TransitionMatrix, f: &FiberPoly) -> FiberPoly {
    assert_eq!(m.size(), f.num_fiber_vars(), "matrix size must match fiber count");
    let images: Vec<FiberPoly> = (0..m.size()).map(|k| m.column_form(k)).collect();
    f.substitute(&images).expect("column forms are linear")
}

/// One entry of the symmetric-power tangent action in closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymEntry {
    /// Integer coefficient; zero exactly when some `a_i = 0` meets
    /// `λ_i > μ_i`.
    pub coeff: BigInt,
    /// Exponents of the accompanying Laurent monomial in `x_1, …, y`.
    pub exps: Vec<i64>,
}

impl SymEntry {
    pub fn to_poly(&self, vars: &VarSet) -> LaurentPoly {
        LaurentPoly::monomial(vars, BigRational::from(self.coeff.clone()), &self.exps)
    }
}

/// Closed form for `[z^λ] (Sym^d J)(z^μ)` with `J` the tangent matrix of
/// `a`. Returns `None` when `μ ≰ λ` in the coefficient order, where the
/// entry vanishes identically.
///
/// For comparable pairs the entry is `C · x^{λ°−μ°} · y^{−a·λ° − λ_n −
/// μ_n}` with
/// `C = (−1)^{μ_n} · multinomial(μ_n; λ_1−μ_1, …, λ_{n−1}−μ_{n−1}, λ_n) ·
/// a^{λ°−μ°}`.
pub fn closed_form_coeff(
    a: &[i64],
    mu: &Composition,
    lambda: &Composition,
) -> Result<Option<SymEntry>, CompError> {
    let n = a.len() + 1;
    assert_eq!(mu.len(), n, "composition length must be a.len() + 1");
    if !comp::poset_leq(mu, lambda)? {
        return Ok(None);
    }
    let mu_n = mu[n - 1] as i64;
    let mut parts: Vec<i64> = (0..n - 1)
        .map(|i| lambda[i] as i64 - mu[i] as i64)
        .collect();
    parts.push(lambda[n - 1] as i64);
    let mut coeff = multinomial(mu_n, &parts);
    if mu_n % 2 == 1 {
        coeff = -coeff;
    }
    let mut exps = vec![0i64; n];
    let mut y_exp: i64 = -(lambda[n - 1] as i64) - mu_n;
    for i in 0..n - 1 {
        let diff = lambda[i] as i64 - mu[i] as i64;
        coeff *= int_pow(a[i], diff as u32);
        exps[i] = diff;
        y_exp -= a[i] * lambda[i] as i64;
    }
    exps[n - 1] = y_exp;
    Ok(Some(SymEntry { coeff, exps }))
}

/// Applies the closed form across a whole fiber form:
/// `(Sym^d J)(f) = Σ_λ z^λ Σ_{μ≤λ} C_{μ,λ} m_{μ,λ} [z^μ]f`.
pub fn closed_form_action(a: &[i64], f: &FiberPoly) -> FiberPoly {
    let n = a.len() + 1;
    assert_eq!(f.num_fiber_vars(), n);
    let vars = f.vars().clone();
    let d = f.degree();
    let mut out = FiberPoly::zero(&vars, n, d);
    for lambda in comp::compositions(d, n) {
        let mut acc = LaurentPoly::zero(&vars);
        for (mu, c_mu) in f.terms() {
            if let Some(entry) = closed_form_coeff(a, mu, &lambda).expect("degrees match") {
                if !entry.coeff.is_zero() {
                    acc = &acc + &(c_mu * &entry.to_poly(&vars));
                }
            }
        }
        if !acc.is_zero() {
            out.add_term(&lambda, acc);
        }
    }
    out
}

/// The two cotangent coefficient extractions used by the obstruction
/// analysis, in closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentKey {
    /// `[z_1^{d−1} z_n] (Sym^d J†)(f)`.
    pub c1: LaurentPoly,
    /// `[z_n^d] (Sym^d J†)(f)`.
    pub c2: LaurentPoly,
}

/// Closed forms: only compositions with λ_1 ≥ d−1 reach `z_1^{d−1}z_n`,
/// so
/// `c1 = −y^{a_1(d−1)+1} (y·[z_1^{d−1}z_n]f + d·a_1·x_1·[z_1^d]f
///        + Σ_{i=2}^{n−1} a_i·x_i·[z_1^{d−1}z_i]f)`
/// (the middle sum is empty for n = 2), and
/// `c2 = (−1)^d y^d Σ_{λ⊨d} a^{λ°} x^{λ°} y^{λ_n} [z^λ]f`.
pub fn cotangent_key_coeffs(a: &[i64], f: &FiberPoly) -> CotangentKey {
    let n = a.len() + 1;
    assert_eq!(f.num_fiber_vars(), n);
    let vars = f.vars().clone();
    let d = f.degree();

    // c1
    let mut lam = vec![0u32; n];
    lam[0] = d.saturating_sub(1);
    lam[n - 1] = if d >= 1 { 1 } else { 0 };
    let f_mixed = f.extract_coeff(&lam).expect("degree matches");
    let f_top = f
        .extract_coeff(&comp::scaled_unit(d, n, 0))
        .expect("degree matches");
    let mut y1 = vec![0i64; n];
    y1[n - 1] = 1;
    let y_poly = LaurentPoly::monomial(&vars, BigRational::one(), &y1);
    let mut x1y = vec![0i64; n];
    x1y[0] = 1;
    let da1 = BigRational::from(BigInt::from(d as i64) * BigInt::from(a[0]));
    let mut inner = &(&y_poly * &f_mixed)
        + &(&LaurentPoly::monomial(&vars, da1, &x1y) * &f_top);
    for i in 1..n - 1 {
        if a[i] == 0 || d == 0 {
            continue;
        }
        let mut lam_i = vec![0u32; n];
        lam_i[0] = d - 1;
        lam_i[i] = 1;
        let f_i = f.extract_coeff(&lam_i).expect("degree matches");
        let mut xi = vec![0i64; n];
        xi[i] = 1;
        let ai = BigRational::from(BigInt::from(a[i]));
        inner = &inner + &(&LaurentPoly::monomial(&vars, ai, &xi) * &f_i);
    }
    let mut pre = vec![0i64; n];
    pre[n - 1] = a[0] * (d as i64 - 1) + 1;
    let c1 = &LaurentPoly::monomial(&vars, -BigRational::one(), &pre) * &inner;

    // c2
    let mut acc = LaurentPoly::zero(&vars);
    for (lambda, c_lam) in f.terms() {
        let mut coeff = BigInt::one();
        let mut exps = vec![0i64; n];
        for i in 0..n - 1 {
            coeff *= int_pow(a[i], lambda[i]);
            exps[i] = lambda[i] as i64;
        }
        if coeff.is_zero() {
            continue;
        }
        exps[n - 1] = lambda[n - 1] as i64;
        let m = LaurentPoly::monomial(&vars, BigRational::from(coeff), &exps);
        acc = &acc + &(&m * c_lam);
    }
    let mut yd = vec![0i64; n];
    yd[n - 1] = d as i64;
    let sign = if d % 2 == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let c2 = &LaurentPoly::monomial(&vars, sign, &yd) * &acc;

    CotangentKey { c1, c2 }
}
