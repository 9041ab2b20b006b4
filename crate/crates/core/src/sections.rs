//! Toric divisors, their polytopes, and section spaces of split bundles.
//!
//! A torus-invariant divisor on a complete smooth fan is a tuple of integer
//! coefficients, one per ray. Its polytope `{m : ⟨m, u_ρ⟩ ≥ −c_ρ for all
//! rays u_ρ}` is bounded (the fan is complete) and its lattice points index
//! a character basis of the sections of the associated line bundle. For a
//! split bundle `L_1 ⊕ … ⊕ L_r` with pullback exponent q and fiber degree
//! d, the coefficient slot `(ℓ, λ)` of a based map lives in the sections of
//! `L^λ ⊗ L_ℓ^{−q}`, computed here by integer-linear divisor arithmetic.
//!
//! Enumeration is bounding box plus filter. The box comes from writing
//! `±e_i` in the generator basis of a containing maximal cone, which turns
//! the defining inequalities into bounds on each coordinate of m.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comp::Composition;
use crate::lattice::{dot, Fan, LatticeVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SectionError {
    #[error("divisor has {0} coefficients but the fan has {1} rays")]
    CoefficientCount(usize, usize),
    #[error("polytope is unbounded in direction {0:?} (fan not complete?)")]
    UnboundedPolytope(Vec<i64>),
    #[error("split bundle needs at least 2 summands, got {0}")]
    TooFewSummands(usize),
    #[error("composition has {0} parts but the bundle has {1} summands")]
    SlotArity(usize, usize),
}

/// A T-invariant divisor `Σ c_ρ D_ρ`, stored by ray coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricDivisor {
    pub ray_coeffs: Vec<i64>,
}

impl ToricDivisor {
    pub fn new(ray_coeffs: Vec<i64>) -> Self {
        ToricDivisor { ray_coeffs }
    }

    pub fn zero(nrays: usize) -> Self {
        ToricDivisor { ray_coeffs: vec![0; nrays] }
    }

    pub fn scale(&self, k: i64) -> Self {
        ToricDivisor {
            ray_coeffs: self.ray_coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ray_coeffs.len(), other.ray_coeffs.len());
        ToricDivisor {
            ray_coeffs: self
                .ray_coeffs
                .iter()
                .zip(&other.ray_coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// The principal divisor of the character χ^m: coefficients ⟨m, u_ρ⟩.
    pub fn principal(fan: &Fan, m: &[i64]) -> Self {
        let mv: LatticeVec = m.iter().map(|&x| BigInt::from(x)).collect();
        ToricDivisor {
            ray_coeffs: fan
                .rays()
                .iter()
                .map(|u| i64::try_from(&dot(&mv, u)).expect("pairing fits i64"))
                .collect(),
        }
    }
}

/// H-representation of a divisor polytope plus a certified bounding box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorPolytope {
    /// Pairs (ray, coefficient): the inequality is ⟨m, ray⟩ ≥ −coefficient.
    inequalities: Vec<(LatticeVec, i64)>,
    /// Inclusive per-coordinate bounds; low may exceed high (empty box).
    low: Vec<i64>,
    high: Vec<i64>,
}

impl DivisorPolytope {
    pub fn inequalities(&self) -> &[(LatticeVec, i64)] {
        &self.inequalities
    }

    pub fn bounding_box(&self) -> (&[i64], &[i64]) {
        (&self.low, &self.high)
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        let mv: Vec<BigInt> = m.iter().map(|&x| BigInt::from(x)).collect();
        self.inequalities
            .iter()
            .all(|(u, c)| dot(&mv, u) >= BigInt::from(-c))
    }

    /// All lattice points, in lexicographic order. Count equals h⁰ of the
    /// associated line bundle.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let dim = self.low.len();
        if self.low.iter().zip(&self.high).any(|(l, h)| l > h) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut point = self.low.clone();
        loop {
            if self.contains(&point) {
                out.push(point.clone());
            }
            let mut i = dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if point[i] < self.high[i] {
                    point[i] += 1;
                    for (j, p) in point.iter_mut().enumerate().skip(i + 1) {
                        *p = self.low[j];
                    }
                    break;
                }
            }
        }
    }

    pub fn point_count(&self) -> usize {
        self.lattice_points().len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice_points().is_empty()
    }
}

/// Assembles the divisor polytope with a bounding box certified from the
/// fan's completeness.
pub fn polytope_of(fan: &Fan, divisor: &ToricDivisor) -> Result<DivisorPolytope, SectionError> {
    let nrays = fan.rays().len();
    if divisor.ray_coeffs.len() != nrays {
        return Err(SectionError::CoefficientCount(divisor.ray_coeffs.len(), nrays));
    }
    let n = fan.rank();
    let inequalities: Vec<(LatticeVec, i64)> = fan
        .rays()
        .iter()
        .cloned()
        .zip(divisor.ray_coeffs.iter().copied())
        .collect();

    let mut low = vec![0i64; n];
    let mut high = vec![0i64; n];
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::from(1);
        low[i] = directional_bound(fan, divisor, &e)
            .ok_or_else(|| SectionError::UnboundedPolytope(signed_unit(n, i, 1)))?;
        let mut neg = vec![BigInt::zero(); n];
        neg[i] = BigInt::from(-1);
        let upper = directional_bound(fan, divisor, &neg)
            .ok_or_else(|| SectionError::UnboundedPolytope(signed_unit(n, i, -1)))?;
        high[i] = -upper;
    }
    Ok(DivisorPolytope { inequalities, low, high })
}

fn signed_unit(n: usize, i: usize, sign: i64) -> Vec<i64> {
    let mut v = vec![0i64; n];
    v[i] = sign;
    v
}

/// Lower bound on ⟨m, w⟩ over the polytope: writes w in the generator
/// basis of a containing maximal cone and combines the defining
/// inequalities. None when no cone contains w.
fn directional_bound(fan: &Fan, divisor: &ToricDivisor, w: &[BigInt]) -> Option<i64> {
    let cone = fan.containing_cone(w)?;
    let coords = fan.cone_coordinates(cone, w);
    let mut bound = BigRational::zero();
    for (coef, &ray_idx) in coords.iter().zip(&fan.max_cones()[cone]) {
        debug_assert!(!coef.is_negative());
        bound -= coef * BigRational::from(BigInt::from(divisor.ray_coeffs[ray_idx]));
    }
    let ceil = bound.ceil().to_integer();
    Some(i64::try_from(&ceil).expect("polytope bound fits i64"))
}

/// A split bundle `L_1 ⊕ … ⊕ L_r` with pullback exponent q and fiber
/// degree d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBundleSpec {
    pub line_bundles: Vec<ToricDivisor>,
    pub q: u32,
    pub d: u32,
}

impl SplitBundleSpec {
    pub fn new(line_bundles: Vec<ToricDivisor>, q: u32, d: u32) -> Result<Self, SectionError> {
        if line_bundles.len() < 2 {
            return Err(SectionError::TooFewSummands(line_bundles.len()));
        }
        assert!(d >= 1, "fiber degree must be positive");
        Ok(SplitBundleSpec { line_bundles, q, d })
    }

    pub fn rank(&self) -> usize {
        self.line_bundles.len()
    }
}

/// The section space of the coefficient slot `(ℓ, λ)`: the polytope of
/// `Σ_k λ_k·L_k − q·L_ℓ`. Empty is a normal answer meaning the slot is
/// forced zero. `ell` is 0-based.
pub fn section_space(
    fan: &Fan,
    spec: &SplitBundleSpec,
    ell: usize,
    lambda: &Composition,
) -> Result<DivisorPolytope, SectionError> {
    if lambda.len() != spec.rank() {
        return Err(SectionError::SlotArity(lambda.len(), spec.rank()));
    }
    assert!(ell < spec.rank());
    let nrays = fan.rays().len();
    let mut divisor = ToricDivisor::zero(nrays);
    for (k, bundle) in spec.line_bundles.iter().enumerate() {
        divisor = divisor.add(&bundle.scale(lambda[k] as i64));
    }
    divisor = divisor.add(&spec.line_bundles[ell].scale(-(spec.q as i64)));
    polytope_of(fan, &divisor)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDimension {
    pub sum_dim: u64,
    /// Product over the slots with nonzero section space. Serialized as a
    /// string to survive JSON integer limits.
    pub product_of_dims: String,
    pub slot_dims: Vec<usize>,
}

/// Dimension bookkeeping across a family of slots: both Σ h⁰ and Π h⁰ over
/// the slots with nonzero space.
pub fn family_dimension(
    fan: &Fan,
    spec: &SplitBundleSpec,
    pattern: &[(usize, Composition)],
) -> Result<FamilyDimension, SectionError> {
    let mut sum = 0u64;
    let mut product = BigInt::from(1);
    let mut dims = Vec::with_capacity(pattern.len());
    for (ell, lambda) in pattern {
        let dim = section_space(fan, spec, *ell, lambda)?.point_count();
        dims.push(dim);
        sum += dim as u64;
        if dim > 0 {
            product *= BigInt::from(dim);
        }
    }
    Ok(FamilyDimension {
        sum_dim: sum,
        product_of_dims: product.to_string(),
        slot_dims: dims,
    })
}
