//! Based maps of projectivized split bundles: section data, cocycles,
//! gluing verification, common-zero analysis, and the worked families.
//!
//! A based map of `P(L_1 ⊕ … ⊕ L_r)` over a base map with pullback
//! exponent q and relative degree d is the data of global sections
//! `a_{ℓ,λ} ∈ Γ(L^λ ⊗ L_ℓ^{−q})`, one per summand ℓ and exponent λ with
//! `|λ| = d`, assembled into fiber polynomials `f_ℓ = Σ_λ a_{ℓ,λ} z^λ`
//! that must have no common zero on any fiber. This module holds that
//! data ([`BasedMapData`]), restricts it to charts, verifies the gluing
//! identity across chart pairs, and runs a verified pipeline of
//! common-zero checks. It also packages the concrete families the
//! machinery classifies: the fiberwise Frobenius choice, the Hirzebruch
//! surface endomorphism family, the two-chart torsion instance, the
//! `(P¹)ⁿ` tangent classification, and a large lower-triangular family
//! over P².

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::comp::{self, Composition};
use crate::fiber::FiberPoly;
use crate::lattice::{p1, p1_power, p2, Fan, Wall};
use crate::poly::{LaurentPoly, VarSet};
use crate::sections::{
    family_dimension, polytope_of, section_space, SectionError, SplitBundleSpec, ToricDivisor,
};
use crate::transition::{sym_action, TransitionMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("slot (ell={ell}, lambda={lambda:?}): monomial {point:?} lies outside its section space")]
    SectionNotInSpace {
        ell: usize,
        lambda: Composition,
        point: Vec<i64>,
    },
    #[error("slot (ell={ell}, lambda={lambda:?}) does not fit a rank-{rank} degree-{degree} bundle")]
    BadSlot {
        ell: usize,
        lambda: Composition,
        rank: usize,
        degree: u32,
    },
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error("torsion pullback exponent must be odd, got {0}")]
    EvenTorsionExponent(u32),
}

/// One chosen global section: rational coefficients on lattice points.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SectionChoice {
    pub terms: Vec<(Vec<i64>, BigRational)>,
}

impl SectionChoice {
    pub fn constant(rank: usize, c: BigRational) -> Self {
        SectionChoice { terms: vec![(vec![0; rank], c)] }
    }

    pub fn single(point: Vec<i64>, c: BigRational) -> Self {
        SectionChoice { terms: vec![(point, c)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_zero())
    }
}

/// The full data of a based map candidate on a split bundle.
#[derive(Clone, Debug)]
pub struct BasedMapData {
    pub fan: Fan,
    pub spec: SplitBundleSpec,
    sections: BTreeMap<(usize, Composition), SectionChoice>,
}

impl BasedMapData {
    pub fn new(fan: Fan, spec: SplitBundleSpec) -> Self {
        BasedMapData { fan, spec, sections: BTreeMap::new() }
    }

    /// Installs the section for slot `(ell, lambda)`. No polytope check
    /// happens here; [`BasedMapData::validate`] and the gluing check
    /// report violations.
    pub fn set_section(
        &mut self,
        ell: usize,
        lambda: Composition,
        choice: SectionChoice,
    ) -> Result<(), SplitError> {
        let total: u32 = lambda.iter().sum();
        if ell >= self.spec.rank() || lambda.len() != self.spec.rank() || total != self.spec.d {
            return Err(SplitError::BadSlot {
                ell,
                lambda,
                rank: self.spec.rank(),
                degree: self.spec.d,
            });
        }
        self.sections.insert((ell, lambda), choice);
        Ok(())
    }

    pub fn sections(&self) -> &BTreeMap<(usize, Composition), SectionChoice> {
        &self.sections
    }

    /// Every chosen monomial must lie in its slot's polytope.
    pub fn validate(&self) -> Result<(), SplitError> {
        for ((ell, lambda), choice) in &self.sections {
            let space = section_space(&self.fan, &self.spec, *ell, lambda)?;
            for (point, coeff) in &choice.terms {
                if !coeff.is_zero() && !space.contains(point) {
                    return Err(SplitError::SectionNotInSpace {
                        ell: *ell,
                        lambda: lambda.clone(),
                        point: point.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The slot divisor `Σ_k λ_k L_k − q L_ℓ`.
    fn slot_divisor(&self, ell: usize, lambda: &Composition) -> ToricDivisor {
        let mut div = ToricDivisor::zero(self.fan.rays().len());
        for (k, bundle) in self.spec.line_bundles.iter().enumerate() {
            div = div.add(&bundle.scale(lambda[k] as i64));
        }
        div.add(&self.spec.line_bundles[ell].scale(-(self.spec.q as i64)))
    }
}

// ---- Local characters and cocycles ----

/// The character trivializing a divisor on a chart: the unique m with
/// `⟨m, v_j⟩ = −c_{ρ_j}` over the cone's generators.
pub fn local_character(fan: &Fan, cone: usize, divisor: &ToricDivisor) -> Vec<i64> {
    let n = fan.rank();
    let gens = &fan.max_cones()[cone];
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|i| gens.iter().map(|&r| fan.ray(r)[i].clone()).collect())
        .collect();
    let w: Vec<BigInt> = gens
        .iter()
        .map(|&r| BigInt::from(-divisor.ray_coeffs[r]))
        .collect();
    let coords = crate::lattice::solve_columns(&cols, &w).expect("cone basis invertible");
    coords
        .iter()
        .map(|c| {
            assert!(c.denom().is_one(), "smooth fan forces integral characters");
            i64::try_from(c.numer()).expect("character fits i64")
        })
        .collect()
}

/// Transition monomials of the line bundles between charts, stored via
/// the per-chart local characters.
#[derive(Clone, Debug)]
pub struct Cocycle {
    rank: usize,
    /// `local_chars[chart][bundle]` = trivializing character m.
    local_chars: Vec<Vec<Vec<i64>>>,
}

impl Cocycle {
    pub fn build(fan: &Fan, bundles: &[ToricDivisor]) -> Self {
        let local_chars = (0..fan.max_cones().len())
            .map(|c| bundles.iter().map(|b| local_character(fan, c, b)).collect())
            .collect();
        Cocycle { rank: fan.rank(), local_chars }
    }

    /// Exponent vector of `M_{ji}^{(k)} = χ^{m_i^{(k)} − m_j^{(k)}}`, the
    /// transition of bundle k from chart i to chart j.
    pub fn transition_exps(&self, j: usize, i: usize, k: usize) -> Vec<i64> {
        self.local_chars[i][k]
            .iter()
            .zip(&self.local_chars[j][k])
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn transition_monomial(&self, vars: &VarSet, j: usize, i: usize, k: usize) -> LaurentPoly {
        LaurentPoly::monomial(vars, BigRational::one(), &self.transition_exps(j, i, k))
    }

    pub fn nchartz(&self) -> usize {
        self.local_chars.len()
    }

    pub fn nbundles(&self) -> usize {
        self.local_chars.first().map_or(0, |v| v.len())
    }

    /// Verifies `M_{ℓj}·M_{ji} = M_{ℓi}` for every chart triple and every
    /// bundle, multiplying actual monomials in global coordinates.
    pub fn cocycle_condition_holds(&self) -> bool {
        let vars = torus_vars(self.rank);
        let nc = self.nchartz();
        for k in 0..self.nbundles() {
            for l in 0..nc {
                for j in 0..nc {
                    for i in 0..nc {
                        let lhs = &self.transition_monomial(&vars, l, j, k)
                            * &self.transition_monomial(&vars, j, i, k);
                        if lhs != self.transition_monomial(&vars, l, i, k) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Global torus coordinates u_1, …, u_n (characters of a lattice basis).
fn torus_vars(n: usize) -> VarSet {
    let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    VarSet::new(&names)
}

// ---- Chart restriction ----

/// Restricts every slot to a chart, producing the r fiber polynomials in
/// that chart's coordinates. Exponents are guaranteed nonnegative exactly
/// when each monomial lies in its slot polytope.
pub fn build_fiber_polys(data: &BasedMapData, chart: usize) -> Result<Vec<FiberPoly>, SplitError> {
    let n = data.fan.rank();
    let r = data.spec.rank();
    let vars = VarSet::chart(n);
    let gens = &data.fan.max_cones()[chart];
    let mut out = vec![FiberPoly::zero(&vars, r, data.spec.d); r];
    for ((ell, lambda), choice) in &data.sections {
        let divisor = data.slot_divisor(*ell, lambda);
        let mut poly = LaurentPoly::zero(&vars);
        for (point, coeff) in &choice.terms {
            if coeff.is_zero() {
                continue;
            }
            let mut exps = vec![0i64; n];
            for (pos, &ray) in gens.iter().enumerate() {
                let pairing: i64 = point
                    .iter()
                    .zip(fan_ray_i64(&data.fan, ray))
                    .map(|(a, b)| a * b)
                    .sum();
                let e = pairing + divisor.ray_coeffs[ray];
                if e < 0 {
                    return Err(SplitError::SectionNotInSpace {
                        ell: *ell,
                        lambda: lambda.clone(),
                        point: point.clone(),
                    });
                }
                exps[pos] = e;
            }
            poly = &poly + &LaurentPoly::monomial(&vars, coeff.clone(), &exps);
        }
        if !poly.is_zero() {
            out[*ell].add_term(lambda, poly);
        }
    }
    Ok(out)
}

fn fan_ray_i64(fan: &Fan, ray: usize) -> Vec<i64> {
    fan.ray(ray)
        .iter()
        .map(|x| i64::try_from(x).expect("ray coordinate fits i64"))
        .collect()
}

/// The fiber polynomial of summand ℓ on a chart written in global torus
/// coordinates: coefficients `χ^{m − m_chart}` may have negative
/// exponents, which is fine away from the boundary.
fn global_fiber_poly(data: &BasedMapData, cocycle: &Cocycle, chart: usize, ell: usize) -> FiberPoly {
    let n = data.fan.rank();
    let r = data.spec.rank();
    let vars = torus_vars(n);
    let mut f = FiberPoly::zero(&vars, r, data.spec.d);
    for ((l, lambda), choice) in &data.sections {
        if *l != ell {
            continue;
        }
        // trivializing character of the slot divisor on this chart
        let mut m_combo = vec![0i64; n];
        for (k, lk) in lambda.iter().enumerate() {
            for (s, x) in m_combo.iter_mut().zip(&cocycle.local_chars[chart][k]) {
                *s += (*lk as i64) * x;
            }
        }
        for (s, x) in m_combo.iter_mut().zip(&cocycle.local_chars[chart][ell]) {
            *s -= (data.spec.q as i64) * x;
        }
        let mut poly = LaurentPoly::zero(&vars);
        for (point, coeff) in &choice.terms {
            if coeff.is_zero() {
                continue;
            }
            let exps: Vec<i64> = point.iter().zip(&m_combo).map(|(p, m)| p - m).collect();
            poly = &poly + &LaurentPoly::monomial(&vars, coeff.clone(), &exps);
        }
        if !poly.is_zero() {
            f.add_term(lambda, poly);
        }
    }
    f
}

// ---- Gluing check ----

#[derive(Clone, Debug, PartialEq)]
pub enum GluingFailure {
    /// A section monomial with a negative chart exponent; the point lies
    /// outside the slot polytope.
    NotRegular {
        chart: usize,
        ell: usize,
        lambda: Composition,
        point: Vec<i64>,
    },
    /// The transition identity fails on this slot.
    CoefficientMismatch {
        ell: usize,
        lambda: Composition,
        lhs: String,
        rhs: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingReport {
    /// Transition from chart `.0` to chart `.1`.
    pub pair: (usize, usize),
    pub failures: Vec<GluingFailure>,
}

impl GluingReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies the transition identity
/// `f_{i,ℓ}(z_1 M_{ji}^{(1)}, …, z_r M_{ji}^{(r)}) = (M_{ji}^{(ℓ)})^q ·
/// f_{j,ℓ}` for every summand, in global torus coordinates, along with
/// per-chart regularity of every section monomial.
pub fn gluing_check(data: &BasedMapData, from: usize, to: usize) -> GluingReport {
    let n = data.fan.rank();
    let r = data.spec.rank();
    let vars = torus_vars(n);
    let cocycle = Cocycle::build(&data.fan, &data.spec.line_bundles);
    let mut failures = Vec::new();

    // regularity on both charts
    for &chart in &[from, to] {
        let gens = &data.fan.max_cones()[chart];
        for ((ell, lambda), choice) in &data.sections {
            let divisor = data.slot_divisor(*ell, lambda);
            for (point, coeff) in &choice.terms {
                if coeff.is_zero() {
                    continue;
                }
                let bad = gens.iter().any(|&ray| {
                    let pairing: i64 = point
                        .iter()
                        .zip(fan_ray_i64(&data.fan, ray))
                        .map(|(a, b)| a * b)
                        .sum();
                    pairing + divisor.ray_coeffs[ray] < 0
                });
                if bad {
                    failures.push(GluingFailure::NotRegular {
                        chart,
                        ell: *ell,
                        lambda: lambda.clone(),
                        point: point.clone(),
                    });
                }
            }
        }
    }

    // the split-diagonal transition matrix for the ordered pair
    let mut entries = vec![vec![LaurentPoly::zero(&vars); r]; r];
    for (k, row) in entries.iter_mut().enumerate() {
        row[k] = cocycle.transition_monomial(&vars, to, from, k);
    }
    let diag = TransitionMatrix::new(vars.clone(), entries);

    for ell in 0..r {
        let f_from = global_fiber_poly(data, &cocycle, from, ell);
        let f_to = global_fiber_poly(data, &cocycle, to, ell);
        let lhs = sym_action(&diag, &f_from);
        let factor = {
            let t = cocycle.transition_exps(to, from, ell);
            let scaled: Vec<i64> = t.iter().map(|x| x * data.spec.q as i64).collect();
            LaurentPoly::monomial(&vars, BigRational::one(), &scaled)
        };
        let rhs = f_to.map_coeffs(|c| &factor * c);
        if lhs != rhs {
            for lambda in comp::compositions(data.spec.d, r) {
                let l = lhs.extract_coeff(&lambda).expect("degree matches");
                let r_ = rhs.extract_coeff(&lambda).expect("degree matches");
                if l != r_ {
                    failures.push(GluingFailure::CoefficientMismatch {
                        ell,
                        lambda,
                        lhs: l.to_string(),
                        rhs: r_.to_string(),
                    });
                }
            }
        }
    }

    GluingReport { pair: (from, to), failures }
}

/// Runs the gluing check in both directions across a wall.
pub fn gluing_check_wall(data: &BasedMapData, wall: &Wall) -> Vec<GluingReport> {
    vec![
        gluing_check(data, wall.sigma, wall.sigma_prime),
        gluing_check(data, wall.sigma_prime, wall.sigma),
    ]
}

/// All walls, deterministic order; the map glues iff every report is ok.
pub fn gluing_check_all(data: &BasedMapData) -> Vec<GluingReport> {
    data.fan
        .find_walls()
        .iter()
        .flat_map(|w| gluing_check_wall(data, w))
        .collect()
}

// ---- Common-zero analysis ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroMethod {
    Triangular,
    Resultant,
    FixedPointBezout,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroWitness {
    /// An exact common zero, verified by evaluation.
    Point {
        chart: usize,
        base: Vec<BigRational>,
        fiber: Vec<BigRational>,
    },
    /// A fiber polynomial vanishes identically, so the remaining r−1
    /// forms must share a zero on P^{r−1} by dimension count.
    VanishingComponent { ell: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroStatus {
    NoCommonZero,
    CommonZeroFound(ZeroWitness),
    Inconclusive { note: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommonZeroVerdict {
    pub status: ZeroStatus,
    pub method: ZeroMethod,
}

/// Three-stage pipeline. A vanishing component is caught first; then the
/// triangular sufficient condition; then, for rank 2, the exact
/// resultant criterion; finally torus-fixed-point tests. Inconclusive is
/// an honest answer for rank > 2 without triangular structure.
pub fn no_common_zero(data: &BasedMapData) -> Result<CommonZeroVerdict, SplitError> {
    let r = data.spec.rank();
    let d = data.spec.d;
    let ncones = data.fan.max_cones().len();
    let polys: Vec<Vec<FiberPoly>> = (0..ncones)
        .map(|c| build_fiber_polys(data, c))
        .collect::<Result<_, _>>()?;

    // a section that restricts to zero on one chart is zero everywhere
    for ell in 0..r {
        if polys[0][ell].is_zero() {
            return Ok(CommonZeroVerdict {
                status: ZeroStatus::CommonZeroFound(ZeroWitness::VanishingComponent { ell }),
                method: ZeroMethod::FixedPointBezout,
            });
        }
    }

    if triangular_permutation(&polys, r, d).is_some() {
        return Ok(CommonZeroVerdict {
            status: ZeroStatus::NoCommonZero,
            method: ZeroMethod::Triangular,
        });
    }

    if r == 2 {
        return Ok(rank2_resultant_verdict(&polys, d));
    }

    if let Some(witness) = fixed_point_zero(&polys, r, d) {
        return Ok(CommonZeroVerdict {
            status: ZeroStatus::CommonZeroFound(witness),
            method: ZeroMethod::FixedPointBezout,
        });
    }

    Ok(CommonZeroVerdict {
        status: ZeroStatus::Inconclusive {
            note: "no triangular structure; rank > 2 lies outside the exact resultant criterion"
                .into(),
        },
        method: ZeroMethod::FixedPointBezout,
    })
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            acc.push(v);
            go(rest, acc, out);
            acc.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..r).collect(), &mut Vec::new(), &mut out);
    out
}

/// Searches for a variable ordering under which the system is lower
/// triangular with nonzero constant leading coefficients on every chart.
/// Such a system cannot vanish at any fiber point: at the last nonzero
/// coordinate (in the ordering) only the leading monomial survives.
fn triangular_permutation(polys: &[Vec<FiberPoly>], r: usize, d: u32) -> Option<Vec<usize>> {
    'perm: for pi in permutations(r) {
        for chart_polys in polys {
            for (slot, &orig) in pi.iter().enumerate() {
                let f = &chart_polys[orig];
                for (lambda, _) in f.terms() {
                    if pi[..slot].iter().any(|&earlier| lambda[earlier] > 0) {
                        continue 'perm;
                    }
                }
                let lead = f
                    .extract_coeff(&comp::scaled_unit(d, r, orig))
                    .expect("degree matches");
                if !(lead.is_constant() && !lead.is_zero()) {
                    continue 'perm;
                }
            }
        }
        return Some(pi);
    }
    None
}

fn rank2_resultant_verdict(polys: &[Vec<FiberPoly>], d: u32) -> CommonZeroVerdict {
    let mut bad_chart = None;
    for (chart, pair) in polys.iter().enumerate() {
        let res = sylvester_resultant(&pair[0], &pair[1]);
        if !(res.is_constant() && !res.is_zero()) {
            bad_chart = Some(chart);
            break;
        }
    }
    let Some(chart) = bad_chart else {
        return CommonZeroVerdict {
            status: ZeroStatus::NoCommonZero,
            method: ZeroMethod::Resultant,
        };
    };
    // the resultant vanishes somewhere: hunt for an exact rational witness
    for (c, pair) in polys.iter().enumerate() {
        if let Some((base, fiber)) = rank2_witness_on_chart(&pair[0], &pair[1], d) {
            return CommonZeroVerdict {
                status: ZeroStatus::CommonZeroFound(ZeroWitness::Point {
                    chart: c,
                    base,
                    fiber,
                }),
                method: ZeroMethod::Resultant,
            };
        }
    }
    CommonZeroVerdict {
        status: ZeroStatus::Inconclusive {
            note: format!(
                "resultant on chart {chart} is not a nonzero constant, but no rational witness was found"
            ),
        },
        method: ZeroMethod::Resultant,
    }
}

/// Sylvester resultant of two binary forms in z_1, z_2 with Laurent
/// polynomial coefficients, computed division-free.
pub fn sylvester_resultant(f: &FiberPoly, g: &FiberPoly) -> LaurentPoly {
    assert_eq!(f.num_fiber_vars(), 2);
    assert_eq!(g.num_fiber_vars(), 2);
    let vars = f.vars().clone();
    let d = f.degree() as usize;
    let e = g.degree() as usize;
    let a: Vec<LaurentPoly> = (0..=d)
        .map(|i| f.extract_coeff(&vec![(d - i) as u32, i as u32]).unwrap())
        .collect();
    let b: Vec<LaurentPoly> = (0..=e)
        .map(|i| g.extract_coeff(&vec![(e - i) as u32, i as u32]).unwrap())
        .collect();
    let m = d + e;
    let mut mat = vec![vec![LaurentPoly::zero(&vars); m]; m];
    for row in 0..e {
        for (i, ai) in a.iter().enumerate() {
            mat[row][row + i] = ai.clone();
        }
    }
    for row in 0..d {
        for (i, bi) in b.iter().enumerate() {
            mat[e + row][row + i] = bi.clone();
        }
    }
    poly_det(&vars, &mat)
}

/// Determinant by dynamic programming over column subsets: O(2^m · m)
/// polynomial multiplications, no division.
fn poly_det(vars: &VarSet, mat: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let m = mat.len();
    assert!(m <= 20, "determinant size out of supported range");
    let mut dp: Vec<Option<LaurentPoly>> = vec![None; 1 << m];
    dp[0] = Some(LaurentPoly::one(vars));
    for mask in 0..(1u32 << m) {
        let Some(prefix) = dp[mask as usize].clone() else {
            continue;
        };
        if prefix.is_zero() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == m {
            continue;
        }
        for col in 0..m {
            if mask & (1 << col) != 0 || mat[row][col].is_zero() {
                continue;
            }
            let sign_flips = (mask >> (col + 1)).count_ones();
            let term = &prefix * &mat[row][col];
            let term = if sign_flips % 2 == 0 { term } else { -term };
            let slot = &mut dp[(mask | (1 << col)) as usize];
            *slot = Some(match slot.take() {
                Some(acc) => &acc + &term,
                None => term,
            });
        }
    }
    dp[(1usize << m) - 1]
        .clone()
        .unwrap_or_else(|| LaurentPoly::zero(vars))
}

/// Tries small rational base points, specializes both forms, and looks
/// for a shared rational fiber root. Every returned witness is verified
/// by exact evaluation.
fn rank2_witness_on_chart(
    f: &FiberPoly,
    g: &FiberPoly,
    d: u32,
) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let n = f.vars().len();
    for base in base_grid(n) {
        let Some(fc) = specialize_binary(f, &base, d) else { continue };
        let Some(gc) = specialize_binary(g, &base, d) else { continue };
        // fiber point [1:0] corresponds to vanishing z_1^d coefficients
        if fc[0].is_zero() && gc[0].is_zero() {
            let fiber = vec![BigRational::one(), BigRational::zero()];
            return Some((base, fiber));
        }
        // dehomogenize at z_2 = 1 and intersect the root sets
        let fu: Vec<BigRational> = fc.iter().rev().cloned().collect();
        let gu: Vec<BigRational> = gc.iter().rev().cloned().collect();
        let gcd = univ_gcd(&fu, &gu);
        for root in rational_roots(&gcd) {
            let fiber = vec![root, BigRational::one()];
            if eval_binary(&fc, &fiber).is_zero() && eval_binary(&gc, &fiber).is_zero() {
                return Some((base, fiber));
            }
        }
    }
    None
}

/// Coefficients (A_0, …, A_d) of `Σ A_i z_1^{d−i} z_2^i` at a base point.
fn specialize_binary(f: &FiberPoly, base: &[BigRational], d: u32) -> Option<Vec<BigRational>> {
    let mut out = Vec::with_capacity(d as usize + 1);
    for i in 0..=d {
        let c = f.extract_coeff(&vec![d - i, i]).ok()?;
        out.push(c.eval(base).ok()?);
    }
    Some(out)
}

fn eval_binary(coeffs: &[BigRational], fiber: &[BigRational]) -> BigRational {
    let d = coeffs.len() - 1;
    let mut acc = BigRational::zero();
    for (i, c) in coeffs.iter().enumerate() {
        let mut term = c.clone();
        for _ in 0..(d - i) {
            term *= &fiber[0];
        }
        for _ in 0..i {
            term *= &fiber[1];
        }
        acc += term;
    }
    acc
}

fn base_grid(n: usize) -> Vec<Vec<BigRational>> {
    let values: Vec<BigRational> = [
        (0, 1),
        (1, 1),
        (-1, 1),
        (2, 1),
        (-2, 1),
        (1, 2),
        (-1, 2),
        (3, 1),
        (-3, 1),
        (2, 3),
        (5, 1),
        (1, 3),
    ]
    .iter()
    .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
    .collect();
    let mut grid: Vec<Vec<BigRational>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(grid.len() * values.len());
        for prefix in &grid {
            for v in &values {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        grid = next;
    }
    grid
}

/// Euclidean gcd of univariate polynomials in ascending-coefficient form,
/// normalized monic. Zero inputs behave as expected.
fn univ_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    fn rem(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
        let mut r = num.to_vec();
        let dd = den.len() - 1;
        let lead = den[dd].clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let factor = &r[k] / &lead;
            if !factor.is_zero() {
                for i in 0..=dd {
                    let idx = k - dd + i;
                    let sub = &factor * &den[i];
                    r[idx] -= sub;
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            if r.len() <= dd {
                break;
            }
        }
        r
    }
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = if x.len() >= y.len() { rem(&x, &y) } else { x.clone() };
        x = y;
        y = trim(r);
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c = &*c / &lead;
        }
    }
    x
}

/// All rational roots of a univariate polynomial (ascending
/// coefficients), via the rational root theorem. Coefficients beyond the
/// supported factoring range simply yield fewer candidates.
fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut poly: Vec<BigRational> = coeffs.to_vec();
    while poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    if poly.is_empty() {
        // the zero polynomial: every point is a root; report a canonical one
        return vec![BigRational::zero()];
    }
    if poly.len() == 1 {
        return Vec::new();
    }
    // clear denominators to integer coefficients
    let mut denom_lcm = BigInt::one();
    for c in &poly {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = poly
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let mut roots = Vec::new();
    let zero_root = ints[0].is_zero();
    if zero_root {
        roots.push(BigRational::zero());
    }
    let low = ints.iter().find(|c| !c.is_zero()).unwrap().clone();
    let high = ints.last().unwrap().clone();
    for p in divisors(&low) {
        for q in divisors(&high) {
            for sign in [1i64, -1] {
                let cand = BigRational::new(&p * BigInt::from(sign), q.clone());
                let mut val = BigRational::zero();
                for c in ints.iter().rev() {
                    val = val * &cand + BigRational::from(c.clone());
                }
                if val.is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Positive divisors by trial division, for the root search. Values past
/// the u64 range would be astronomically unlikely here; they return just
/// 1 and |x| so the search stays sound, merely less complete.
fn divisors(x: &BigInt) -> Vec<BigInt> {
    let ax = x.abs();
    if ax.is_zero() {
        return vec![BigInt::one()];
    }
    match u64::try_from(&ax) {
        Ok(v) if v <= 10_000_000 => {
            let mut out = Vec::new();
            let mut i = 1u64;
            while i * i <= v {
                if v % i == 0 {
                    out.push(BigInt::from(i));
                    if i != v / i {
                        out.push(BigInt::from(v / i));
                    }
                }
                i += 1;
            }
            out.sort();
            out
        }
        _ => vec![BigInt::one(), ax],
    }
}

/// Checks the torus-fixed points of each chart: base at the chart origin,
/// fiber at a coordinate point e_j. All f_ℓ vanish there iff the constant
/// terms of their z_j^d coefficients vanish.
fn fixed_point_zero(polys: &[Vec<FiberPoly>], r: usize, d: u32) -> Option<ZeroWitness> {
    for (chart, chart_polys) in polys.iter().enumerate() {
        let n = chart_polys[0].vars().len();
        for j in 0..r {
            let lambda = comp::scaled_unit(d, r, j);
            let all_vanish = chart_polys.iter().all(|f| {
                let c = f.extract_coeff(&lambda).expect("degree matches");
                c.constant_term().is_zero()
            });
            if all_vanish {
                let mut fiber = vec![BigRational::zero(); r];
                fiber[j] = BigRational::one();
                return Some(ZeroWitness::Point {
                    chart,
                    base: vec![BigRational::zero(); n],
                    fiber,
                });
            }
        }
    }
    None
}

// ---- Frobenius section choice ----

/// The fiberwise d-th power choice: `a_{ℓ, d·e_ℓ} = 1`, everything else
/// zero. Valid for any split bundle when q = d.
pub fn frobenius_choice(fan: Fan, spec: SplitBundleSpec) -> BasedMapData {
    let r = spec.rank();
    let d = spec.d;
    let mut data = BasedMapData::new(fan, spec);
    for ell in 0..r {
        data.set_section(
            ell,
            comp::scaled_unit(d, r, ell),
            SectionChoice::constant(data.fan.rank(), BigRational::one()),
        )
        .expect("slot shape is valid");
    }
    data
}

// ---- (P¹)ⁿ tangent classification ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum P1nReason {
    /// Every slot of f_ℓ needs λ_ℓ ≥ d_ℓ > d, so f_ℓ ≡ 0 and Bézout
    /// provides a common zero.
    ComponentVanishes,
    /// f_ℓ(e_ℓ-fiber) is a section of O(2d − 2d_ℓ) with 2d − 2d_ℓ > 0; it
    /// vanishes somewhere on the base, giving a common zero over that
    /// point.
    CoefficientMustVanishSomewhere,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1nObstruction {
    pub ell: usize,
    pub base_degree: u32,
    pub reason: P1nReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum P1nVerdict {
    /// All factor degrees equal: the only based maps are `f_ℓ = A_ℓ
    /// z_ℓ^d` with nonzero scalars, the fiberwise Frobenius up to
    /// rescaling.
    Admissible { degree: u32, free_scalars: usize },
    NoBasedMapExists {
        candidate_degree: u32,
        trace: Vec<P1nObstruction>,
    },
}

/// Classifies based maps of the projectivized tangent bundle of (P¹)ⁿ
/// over a product base map of multidegree `degrees`. The tangent bundle
/// splits as ⊕ π_ℓ*O(2), so slot (ℓ,λ) is nonzero only when λ_ℓ ≥ d_ℓ;
/// with |λ| equal to the relative degree d this forces d = d_ℓ for every
/// ℓ and pins each f_ℓ to a scalar multiple of z_ℓ^d.
pub fn classify_p1n_tangent(degrees: &[u32]) -> P1nVerdict {
    assert!(!degrees.is_empty());
    assert!(degrees.iter().all(|&d| d >= 1), "factor degrees must be positive");
    let max = *degrees.iter().max().unwrap();
    if degrees.iter().all(|&d| d == max) {
        return P1nVerdict::Admissible { degree: max, free_scalars: degrees.len() };
    }
    // Any candidate relative degree fails. Report against d = max: every
    // component with a smaller factor degree forces a vanishing
    // coefficient; smaller candidates instead kill the max-degree
    // components outright.
    let trace = degrees
        .iter()
        .enumerate()
        .filter(|&(_, &dl)| dl < max)
        .map(|(ell, &dl)| P1nObstruction {
            ell,
            base_degree: dl,
            reason: P1nReason::CoefficientMustVanishSomewhere,
        })
        .collect();
    P1nVerdict::NoBasedMapExists { candidate_degree: max, trace }
}

/// Whether slot (ℓ,λ) of the (P¹)ⁿ tangent setup admits nonzero
/// sections, decided by the Künneth inequality λ_ℓ ≥ d_ℓ.
pub fn p1n_slot_allowed(lambda: &Composition, ell: usize, degrees: &[u32]) -> bool {
    lambda[ell] >= degrees[ell]
}

/// The same question answered through actual polytopes on the (P¹)ⁿ fan:
/// the slot divisor `Σ_k 2λ_k e_k − 2d_ℓ e_ℓ` has sections iff its
/// polytope is nonempty. Used to cross-check [`p1n_slot_allowed`].
pub fn p1n_slot_allowed_by_sections(
    lambda: &Composition,
    ell: usize,
    degrees: &[u32],
) -> bool {
    let n = degrees.len();
    let fan = p1_power(n);
    let nrays = fan.rays().len();
    // π_k*O(2) has coefficient 2 on the ray −e_k (index 2k+1)
    let mut coeffs = vec![0i64; nrays];
    for (k, lk) in lambda.iter().enumerate() {
        coeffs[2 * k + 1] += 2 * (*lk as i64);
    }
    coeffs[2 * ell + 1] -= 2 * degrees[ell] as i64;
    let divisor = ToricDivisor::new(coeffs);
    !polytope_of(&fan, &divisor)
        .expect("complete fan gives bounded polytopes")
        .is_empty()
}

// ---- Hirzebruch endomorphism family ----

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HirzebruchError {
    #[error("s_0 must be a nonzero constant: otherwise every fiber polynomial is divisible by z2 and the map vanishes at the fiber point [1:0]")]
    LeadingSectionZero,
    #[error("c must be nonzero: otherwise f_2 vanishes identically")]
    ScaleZero,
    #[error("s_{index} must have {expected} coefficients (a section of O_P1({degree})), got {got}")]
    SectionLength {
        index: usize,
        expected: usize,
        degree: i64,
        got: usize,
    },
}

/// Template of the endomorphism family of the n-th Hirzebruch surface
/// with base degree d: slot dimensions and total parameter count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HirzebruchTemplate {
    pub n: i64,
    pub d: u32,
    /// dim Γ(O_{P¹}(n·i)) for i = 0..=d.
    pub slot_dims: Vec<usize>,
    /// The extra scalar c.
    pub scale_dim: usize,
    pub parameter_sum: usize,
}

/// Slot structure of the Hirzebruch family: s_i ranges over sections of
/// O_{P¹}(n·i), plus one scalar c.
pub fn hirzebruch_enumerate(n: i64, d: u32) -> HirzebruchTemplate {
    assert!(n >= 1 && d >= 1);
    let slot_dims: Vec<usize> = (0..=d as i64).map(|i| (n * i + 1) as usize).collect();
    let parameter_sum = slot_dims.iter().sum::<usize>() + 1;
    HirzebruchTemplate { n, d, slot_dims, scale_dim: 1, parameter_sum }
}

/// A concrete member of the family: `F_1 = Σ s_i z_1^{d−i} z_2^i`,
/// `F_2 = c·z_2^d`, with s_i ∈ Γ(O_{P¹}(n·i)) stored by coefficients on
/// the lattice points 0..=n·i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HirzebruchFamily {
    pub n: i64,
    pub d: u32,
    pub s: Vec<Vec<BigRational>>,
    pub c: BigRational,
}

impl HirzebruchFamily {
    pub fn new(
        n: i64,
        d: u32,
        s: Vec<Vec<BigRational>>,
        c: BigRational,
    ) -> Result<Self, HirzebruchError> {
        assert!(n >= 1 && d >= 1);
        assert_eq!(s.len(), d as usize + 1, "need d+1 sections s_0..s_d");
        for (i, si) in s.iter().enumerate() {
            let degree = n * i as i64;
            let expected = (degree + 1) as usize;
            if si.len() != expected {
                return Err(HirzebruchError::SectionLength {
                    index: i,
                    expected,
                    degree,
                    got: si.len(),
                });
            }
        }
        if s[0][0].is_zero() {
            return Err(HirzebruchError::LeadingSectionZero);
        }
        if c.is_zero() {
            return Err(HirzebruchError::ScaleZero);
        }
        Ok(HirzebruchFamily { n, d, s, c })
    }

    /// Packages the family as based-map data over P¹ with bundles
    /// (O, O(n)) and q = d.
    pub fn to_based_map(&self) -> BasedMapData {
        let fan = p1();
        let spec = SplitBundleSpec::new(
            vec![ToricDivisor::new(vec![0, 0]), ToricDivisor::new(vec![0, self.n])],
            self.d,
            self.d,
        )
        .expect("two summands");
        let mut data = BasedMapData::new(fan, spec);
        for (i, si) in self.s.iter().enumerate() {
            let lambda = vec![self.d - i as u32, i as u32];
            let terms: Vec<(Vec<i64>, BigRational)> = si
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (vec![m as i64], c.clone()))
                .collect();
            data.set_section(0, lambda, SectionChoice { terms }).unwrap();
        }
        data.set_section(
            1,
            vec![0, self.d],
            SectionChoice::constant(1, self.c.clone()),
        )
        .unwrap();
        data
    }

    /// Evaluates s_i at a base chart coordinate.
    pub fn section_value(&self, i: usize, p: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.s[i].iter().rev() {
            acc = acc * p + c;
        }
        acc
    }

    /// The fiber image of a point: `[Σ s_i(p) z_1^{d−i} z_2^i : c·z_2^d]`.
    pub fn fiber_value(
        &self,
        p: &BigRational,
        z: (&BigRational, &BigRational),
    ) -> (BigRational, BigRational) {
        let mut first = BigRational::zero();
        for i in 0..=self.d as usize {
            let mut term = self.section_value(i, p);
            for _ in 0..(self.d as usize - i) {
                term *= z.0;
            }
            for _ in 0..i {
                term *= z.1;
            }
            first += term;
        }
        let mut second = self.c.clone();
        for _ in 0..self.d {
            second *= z.1;
        }
        (first, second)
    }
}

// ---- Abstract two-chart torsion instance ----

/// A split bundle `O ⊕ L` with L two-torsion, over an abstract two-chart
/// base carrying a formal torsion coordinate u with u² = 1. The bundle
/// transition of L is the monomial u itself; exponent arithmetic happens
/// modulo 2.
#[derive(Clone, Debug)]
pub struct TorsionTwoChart {
    pub q: u32,
    pub d: u32,
    /// Constant sections per slot: (ℓ, λ) → coefficient.
    pub slots: BTreeMap<(usize, Composition), BigRational>,
}

/// The worked instance: q odd (the base map is the identity, q = 1),
/// d = 2, fiber polynomials (z_1² + z_2², z_1·z_2).
pub fn torsion_two_chart(q: u32) -> Result<TorsionTwoChart, SplitError> {
    if q % 2 == 0 {
        return Err(SplitError::EvenTorsionExponent(q));
    }
    let mut slots = BTreeMap::new();
    slots.insert((0, vec![2u32, 0]), BigRational::one());
    slots.insert((0, vec![0u32, 2]), BigRational::one());
    slots.insert((1, vec![1u32, 1]), BigRational::one());
    Ok(TorsionTwoChart { q, d: 2, slots })
}

impl TorsionTwoChart {
    /// Torsion exponents of the bundles: L_1 = O carries u⁰, L_2 = L
    /// carries u¹.
    fn torsion_exponent(k: usize) -> u32 {
        k as u32
    }

    /// Slots where the transition identity fails modulo u² = 1. A slot
    /// (ℓ,λ) glues iff `Σ_k λ_k·t_k ≡ q·t_ℓ (mod 2)` for the torsion
    /// exponents t.
    pub fn gluing_failures(&self) -> Vec<(usize, Composition)> {
        self.slots
            .iter()
            .filter(|((ell, lambda), coeff)| {
                if coeff.is_zero() {
                    return false;
                }
                let lhs: u32 = lambda
                    .iter()
                    .enumerate()
                    .map(|(k, lk)| lk * Self::torsion_exponent(k))
                    .sum();
                let rhs = self.q * Self::torsion_exponent(*ell);
                (lhs % 2) != (rhs % 2)
            })
            .map(|(key, _)| key.clone())
            .collect()
    }

    pub fn gluing_holds(&self) -> bool {
        self.gluing_failures().is_empty()
    }

    /// The chart fiber polynomials; the torsion coordinate never appears
    /// because all sections are constants.
    pub fn fiber_polys(&self) -> Vec<FiberPoly> {
        let vars = VarSet::new(&["u"]);
        let mut out = vec![FiberPoly::zero(&vars, 2, self.d); 2];
        for ((ell, lambda), coeff) in &self.slots {
            if !coeff.is_zero() {
                out[*ell].add_term(lambda, LaurentPoly::constant(&vars, coeff.clone()));
            }
        }
        out
    }

    /// Resultant criterion on the two binary forms.
    pub fn no_common_zero(&self) -> CommonZeroVerdict {
        let polys = vec![self.fiber_polys()];
        rank2_resultant_verdict(&polys, self.d)
    }
}

// ---- The lower-triangular P² family ----

/// Summary of the explicit degree-2 family on P(O ⊕ O(2) ⊕ O(4)) over P²
/// with Frobenius base map: slot dimensions, the derived product of
/// degrees of freedom, and the figure reported in the source example,
/// which disagrees with its own slot dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Pp2Report {
    /// (name, ell, lambda) for the seven non-constant slots, display order.
    pub slots: Vec<(String, usize, Composition)>,
    pub slot_dims: Vec<usize>,
    pub derived_product: String,
    pub quoted_product: String,
    pub products_disagree: bool,
    pub verdict: CommonZeroVerdict,
}

/// Builds the family with generic nonzero choices in every slot and unit
/// constants c_1, c_2, c_3, then runs the common-zero pipeline (the
/// triangular structure accepts it) and the dimension bookkeeping.
pub fn pp2_family() -> (BasedMapData, Pp2Report) {
    let fan = p2();
    let o = |k: i64| ToricDivisor::new(vec![0, 0, k]);
    let spec = SplitBundleSpec::new(vec![o(0), o(2), o(4)], 2, 2).unwrap();
    let mut data = BasedMapData::new(fan.clone(), spec.clone());

    // constants on the diagonal slots
    for ell in 0..3 {
        data.set_section(
            ell,
            comp::scaled_unit(2, 3, ell),
            SectionChoice::constant(2, BigRational::one()),
        )
        .unwrap();
    }

    // the seven non-constant slots, in the display order of the family
    let named: Vec<(&str, usize, Composition)> = vec![
        ("a", 1, vec![0, 0, 2]),
        ("b", 1, vec![0, 1, 1]),
        ("c", 0, vec![0, 0, 2]),
        ("d", 0, vec![0, 2, 0]),
        ("e", 0, vec![0, 1, 1]),
        ("f", 0, vec![1, 0, 1]),
        ("g", 0, vec![1, 1, 0]),
    ];
    let mut dims = Vec::new();
    for (_, ell, lambda) in &named {
        let space = section_space(&fan, &spec, *ell, lambda).unwrap();
        let points = space.lattice_points();
        dims.push(points.len());
        // a generic-looking nonzero element: alternating signs over all
        // lattice points
        let terms: Vec<(Vec<i64>, BigRational)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                (p.clone(), BigRational::from(BigInt::from(sign * (i as i64 + 1))))
            })
            .collect();
        data.set_section(*ell, lambda.clone(), SectionChoice { terms }).unwrap();
    }

    let pattern: Vec<(usize, Composition)> =
        named.iter().map(|(_, e, l)| (*e, l.clone())).collect();
    let fam = family_dimension(&fan, &spec, &pattern).unwrap();
    let verdict = no_common_zero(&data).expect("sections lie in their spaces");
    let quoted = "714420000".to_string();
    let report = Pp2Report {
        slots: named
            .into_iter()
            .map(|(n, e, l)| (n.to_string(), e, l))
            .collect(),
        slot_dims: dims,
        products_disagree: fam.product_of_dims != quoted,
        derived_product: fam.product_of_dims,
        quoted_product: quoted,
        verdict,
    };
    (data, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hirzebruch;

    fn frobenius_on_surface(n: i64, d: u32) -> BasedMapData {
        let fan = hirzebruch(n);
        let bundles = vec![
            ToricDivisor::new(vec![0, 0, 0, 0]),
            ToricDivisor::new(vec![0, 0, n, 0]),
        ];
        frobenius_choice(fan, SplitBundleSpec::new(bundles, d, d).unwrap())
    }

    #[test]
    fn cocycle_condition_on_p2_and_hirzebruch() {
        let fan = p2();
        let bundles = vec![
            ToricDivisor::new(vec![0, 0, 2]),
            ToricDivisor::new(vec![1, 0, 3]),
        ];
        assert!(Cocycle::build(&fan, &bundles).cocycle_condition_holds());
        let fan = hirzebruch(2);
        let bundles = vec![
            ToricDivisor::new(vec![0, 1, 2, 0]),
            ToricDivisor::new(vec![0, 0, 0, 1]),
        ];
        assert!(Cocycle::build(&fan, &bundles).cocycle_condition_holds());
    }

    #[test]
    fn frobenius_restricts_to_power_maps() {
        let data = frobenius_on_surface(2, 3);
        for chart in 0..4 {
            let polys = build_fiber_polys(&data, chart).unwrap();
            let vars = VarSet::chart(2);
            for (ell, f) in polys.iter().enumerate() {
                let lead = f.extract_coeff(&comp::scaled_unit(3, 2, ell)).unwrap();
                assert_eq!(lead, LaurentPoly::one(&vars));
                assert_eq!(f.terms().count(), 1, "chart {chart} ell {ell}");
            }
        }
    }

    #[test]
    fn frobenius_glues_on_every_wall() {
        for n in 1..=3 {
            for d in 2..=3 {
                let data = frobenius_on_surface(n, d);
                let reports = gluing_check_all(&data);
                assert_eq!(reports.len(), 8, "4 walls, both directions");
                for r in &reports {
                    assert!(r.ok(), "n={n} d={d} pair {:?}: {:?}", r.pair, r.failures);
                }
                let verdict = no_common_zero(&data).unwrap();
                assert_eq!(verdict.status, ZeroStatus::NoCommonZero);
                assert_eq!(verdict.method, ZeroMethod::Triangular);
            }
        }
    }

    #[test]
    fn identity_map_glues() {
        let fan = p2();
        let bundles = vec![
            ToricDivisor::new(vec![0, 0, 1]),
            ToricDivisor::new(vec![0, 0, 3]),
        ];
        let data = frobenius_choice(fan, SplitBundleSpec::new(bundles, 1, 1).unwrap());
        assert!(gluing_check_all(&data).iter().all(|r| r.ok()));
    }

    #[test]
    fn perturbed_section_fails_gluing_with_culprit() {
        let mut data = frobenius_on_surface(1, 2);
        // drop in a monomial outside the slot polytope
        data.set_section(
            0,
            vec![2, 0],
            SectionChoice::single(vec![5, 7], BigRational::one()),
        )
        .unwrap();
        assert!(data.validate().is_err());
        // the stray point only pairs negatively with the -e2 ray, so the
        // complaint surfaces on the walls whose charts contain that ray
        let reports = gluing_check_all(&data);
        let failing: Vec<_> = reports
            .iter()
            .flat_map(|r| r.failures.iter())
            .filter(|f| matches!(f, GluingFailure::NotRegular { ell: 0, .. }))
            .collect();
        assert!(!failing.is_empty(), "perturbation must be named");
        for f in failing {
            let GluingFailure::NotRegular { point, lambda, .. } = f else {
                unreachable!()
            };
            assert_eq!(point, &vec![5, 7]);
            assert_eq!(lambda, &vec![2, 0]);
        }
    }

    #[test]
    fn triangular_catches_frobenius_and_pp2() {
        let data = frobenius_on_surface(1, 2);
        let verdict = no_common_zero(&data).unwrap();
        assert_eq!(verdict.method, ZeroMethod::Triangular);
        let (_, report) = pp2_family();
        assert_eq!(report.verdict.status, ZeroStatus::NoCommonZero);
        assert_eq!(report.verdict.method, ZeroMethod::Triangular);
    }

    #[test]
    fn pp2_dimensions_and_products() {
        let (data, report) = pp2_family();
        assert_eq!(report.slot_dims, vec![15, 6, 45, 15, 28, 15, 6]);
        assert_eq!(report.derived_product, "153090000");
        assert_eq!(report.quoted_product, "714420000");
        assert!(report.products_disagree);
        assert!(data.validate().is_ok());
        assert!(gluing_check_all(&data).iter().all(|r| r.ok()));
    }

    #[test]
    fn zero_component_is_rejected() {
        let fan = p1();
        let bundles = vec![ToricDivisor::new(vec![0, 0]), ToricDivisor::new(vec![0, 1])];
        let mut data = BasedMapData::new(fan, SplitBundleSpec::new(bundles, 2, 2).unwrap());
        data.set_section(0, vec![2, 0], SectionChoice::constant(1, BigRational::one()))
            .unwrap();
        // summand 1 left empty
        let verdict = no_common_zero(&data).unwrap();
        assert_eq!(
            verdict.status,
            ZeroStatus::CommonZeroFound(ZeroWitness::VanishingComponent { ell: 1 })
        );
    }

    #[test]
    fn torsion_instance_glues_and_has_no_common_zero() {
        let t = torsion_two_chart(1).unwrap();
        assert!(t.gluing_holds());
        let verdict = t.no_common_zero();
        assert_eq!(verdict.status, ZeroStatus::NoCommonZero);
        assert_eq!(verdict.method, ZeroMethod::Resultant);
        assert!(matches!(
            torsion_two_chart(2),
            Err(SplitError::EvenTorsionExponent(2))
        ));
        // dropping the wrong-parity slot breaks gluing
        let mut bad = torsion_two_chart(1).unwrap();
        bad.slots.insert((0, vec![1, 1]), BigRational::one());
        assert!(!bad.gluing_holds());
        assert_eq!(bad.gluing_failures(), vec![(0usize, vec![1u32, 1])]);
    }

    #[test]
    fn torsion_resultant_value() {
        // the resultant of z_1² + z_2² and z_1·z_2 is the constant 1
        let t = torsion_two_chart(1).unwrap();
        let polys = t.fiber_polys();
        let res = sylvester_resultant(&polys[0], &polys[1]);
        let vars = VarSet::new(&["u"]);
        assert_eq!(res, LaurentPoly::one(&vars));
    }

    #[test]
    fn rank2_witness_extraction() {
        // both forms divisible by z_2: common zero at [1:0]
        let fan = p1();
        let bundles = vec![ToricDivisor::new(vec![0, 0]), ToricDivisor::new(vec![0, 1])];
        let mut data = BasedMapData::new(fan, SplitBundleSpec::new(bundles, 2, 2).unwrap());
        data.set_section(0, vec![1, 1], SectionChoice::single(vec![0], BigRational::one()))
            .unwrap();
        data.set_section(1, vec![0, 2], SectionChoice::constant(1, BigRational::one()))
            .unwrap();
        let verdict = no_common_zero(&data).unwrap();
        match verdict.status {
            ZeroStatus::CommonZeroFound(ZeroWitness::Point { fiber, .. }) => {
                assert_eq!(fiber, vec![BigRational::one(), BigRational::zero()]);
            }
            other => panic!("expected a point witness, got {other:?}"),
        }
    }

    #[test]
    fn rank2_shared_linear_factor_witness() {
        // f_1 = z_1² − z_2², f_2 = z_1·z_2 − z_2²: both vanish at [1:1]
        let fan = p1();
        let bundles = vec![ToricDivisor::new(vec![0, 0]), ToricDivisor::new(vec![0, 0])];
        let mut data = BasedMapData::new(fan, SplitBundleSpec::new(bundles, 2, 2).unwrap());
        data.set_section(0, vec![2, 0], SectionChoice::constant(1, BigRational::one()))
            .unwrap();
        data.set_section(0, vec![0, 2], SectionChoice::constant(1, -BigRational::one()))
            .unwrap();
        data.set_section(1, vec![1, 1], SectionChoice::constant(1, BigRational::one()))
            .unwrap();
        data.set_section(1, vec![0, 2], SectionChoice::constant(1, -BigRational::one()))
            .unwrap();
        let verdict = no_common_zero(&data).unwrap();
        match verdict.status {
            ZeroStatus::CommonZeroFound(ZeroWitness::Point { chart, base, fiber }) => {
                let polys = build_fiber_polys(&data, chart).unwrap();
                for f in &polys {
                    assert!(f.eval(&base, &fiber).unwrap().is_zero());
                }
            }
            other => panic!("expected a point witness, got {other:?}"),
        }
    }

    #[test]
    fn p1n_classification() {
        assert_eq!(
            classify_p1n_tangent(&[2, 2]),
            P1nVerdict::Admissible { degree: 2, free_scalars: 2 }
        );
        assert_eq!(
            classify_p1n_tangent(&[3]),
            P1nVerdict::Admissible { degree: 3, free_scalars: 1 }
        );
        match classify_p1n_tangent(&[2, 3]) {
            P1nVerdict::NoBasedMapExists { candidate_degree, trace } => {
                assert_eq!(candidate_degree, 3);
                assert_eq!(trace.len(), 1);
                assert_eq!(trace[0].ell, 0);
                assert_eq!(trace[0].reason, P1nReason::CoefficientMustVanishSomewhere);
            }
            other => panic!("expected nonexistence, got {other:?}"),
        }
    }

    #[test]
    fn p1n_slot_rule_matches_polytopes() {
        for degrees in [vec![2u32, 2], vec![2, 3], vec![1, 2, 2]] {
            let n = degrees.len();
            let d = *degrees.iter().max().unwrap();
            for lambda in comp::compositions(d, n) {
                for ell in 0..n {
                    assert_eq!(
                        p1n_slot_allowed(&lambda, ell, &degrees),
                        p1n_slot_allowed_by_sections(&lambda, ell, &degrees),
                        "degrees={degrees:?} lambda={lambda:?} ell={ell}"
                    );
                }
            }
        }
    }

    #[test]
    fn hirzebruch_template_and_family() {
        let t = hirzebruch_enumerate(1, 2);
        assert_eq!(t.slot_dims, vec![1, 2, 3]);
        assert_eq!(t.parameter_sum, 7);

        let fam = HirzebruchFamily::new(
            1,
            2,
            vec![
                vec![BigRational::from(BigInt::from(2))],
                vec![BigRational::one(), -BigRational::one()],
                vec![
                    BigRational::one(),
                    BigRational::from(BigInt::from(3)),
                    BigRational::zero(),
                ],
            ],
            BigRational::from(BigInt::from(5)),
        )
        .unwrap();
        let data = fam.to_based_map();
        assert!(data.validate().is_ok());
        assert!(gluing_check_all(&data).iter().all(|r| r.ok()));
        let verdict = no_common_zero(&data).unwrap();
        assert_eq!(verdict.status, ZeroStatus::NoCommonZero);
        assert_eq!(verdict.method, ZeroMethod::Triangular);

        // point evaluation agrees with the chart polynomials
        let p = BigRational::new(BigInt::from(3), BigInt::from(2));
        let z1 = BigRational::from(BigInt::from(2));
        let z2 = -BigRational::one();
        let (v1, v2) = fam.fiber_value(&p, (&z1, &z2));
        let polys = build_fiber_polys(&data, 0).unwrap();
        let base = vec![p.clone()];
        let fiber = vec![z1.clone(), z2.clone()];
        assert_eq!(polys[0].eval(&base, &fiber).unwrap(), v1);
        assert_eq!(polys[1].eval(&base, &fiber).unwrap(), v2);
    }

    #[test]
    fn hirzebruch_degenerate_instances_rejected() {
        let err = HirzebruchFamily::new(
            1,
            2,
            vec![
                vec![BigRational::zero()],
                vec![BigRational::one(), BigRational::one()],
                vec![BigRational::one(), BigRational::zero(), BigRational::one()],
            ],
            BigRational::one(),
        )
        .unwrap_err();
        assert_eq!(err, HirzebruchError::LeadingSectionZero);
        assert!(err.to_string().contains("divisible by z2"));

        let err = HirzebruchFamily::new(
            1,
            2,
            vec![
                vec![BigRational::one()],
                vec![BigRational::zero(), BigRational::zero()],
                vec![BigRational::zero(), BigRational::zero(), BigRational::zero()],
            ],
            BigRational::zero(),
        )
        .unwrap_err();
        assert_eq!(err, HirzebruchError::ScaleZero);
    }
}
