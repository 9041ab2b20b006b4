//! Compositions of a nonnegative integer into a fixed number of parts,
//! together with the partial order used by the coefficient calculus.
//!
//! A composition of `d` of length `n` is an ordered vector of nonnegative
//! integers summing to `d`; they index the degree-d monomials `z^λ`. The
//! order compares only the first `n−1` parts componentwise, so comparable
//! compositions automatically satisfy `μ_n ≥ λ_n` when `μ ≤ λ`.

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::binomial;

pub type Composition = Vec<u32>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompError {
    #[error("compositions have different degree or length ({0:?} vs {1:?})")]
    DegreeMismatch(Composition, Composition),
}

/// All compositions of `d` into `n` parts, in ascending lexicographic order.
pub fn compositions(d: u32, n: usize) -> Vec<Composition> {
    assert!(n >= 1, "composition length must be positive");
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(d, 0, &mut cur, &mut out);
    out
}

fn fill(rest: u32, k: usize, cur: &mut Composition, out: &mut Vec<Composition>) {
    if k == cur.len() - 1 {
        cur[k] = rest;
        out.push(cur.clone());
        return;
    }
    for v in 0..=rest {
        cur[k] = v;
        fill(rest - v, k + 1, cur, out);
    }
}

/// Number of compositions of `d` into `n` parts: binom(d+n−1, n−1).
pub fn count(d: u32, n: usize) -> BigInt {
    binomial(d as i64 + n as i64 - 1, n as i64 - 1)
}

/// Total of all parts.
pub fn total(c: &Composition) -> u32 {
    c.iter().sum()
}

/// The truncation λ° obtained by removing the last coordinate.
pub fn truncate(c: &Composition) -> Vec<u32> {
    c[..c.len() - 1].to_vec()
}

/// `μ ≤ λ` iff `μ_i ≤ λ_i` for all i < n; the last parts are not compared.
pub fn poset_leq(mu: &Composition, lambda: &Composition) -> Result<bool, CompError> {
    if mu.len() != lambda.len() || total(mu) != total(lambda) {
        return Err(CompError::DegreeMismatch(mu.clone(), lambda.clone()));
    }
    Ok(mu[..mu.len() - 1]
        .iter()
        .zip(&lambda[..lambda.len() - 1])
        .all(|(m, l)| m <= l))
}

/// The composition `d·e_k` (0-based index k).
pub fn scaled_unit(d: u32, n: usize, k: usize) -> Composition {
    let mut c = vec![0u32; n];
    c[k] = d;
    c
}
