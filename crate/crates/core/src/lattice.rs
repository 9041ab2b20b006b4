//! Integer lattice geometry: fans, walls, wall relations, and analysis of
//! lattice endomorphisms.
//!
//! A [`Fan`] is stored as primitive ray vectors plus maximal cones given by
//! ray-index sets. Construction certifies the properties the rest of the
//! crate relies on: simplicial maximal cones of full rank with generator
//! determinant ±1 (smoothness), every facet of a maximal cone shared with
//! exactly one other maximal cone, the two cones across each facet lying on
//! opposite sides of it, and a connected adjacency graph. Together these
//! certify a complete smooth fan without any volume computation.
//!
//! Coordinates are arbitrary-precision integers throughout; linear algebra
//! is exact rational.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{LaurentPoly, VarSet};

pub type LatticeVec = Vec<BigInt>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FanError {
    #[error("rank must be positive")]
    RankZero,
    #[error("ray {0} has {1} coordinates, expected rank {2}")]
    RayLength(usize, usize, usize),
    #[error("ray {0} is the zero vector")]
    ZeroRay(usize),
    #[error("ray {0} is not primitive (gcd of coordinates > 1)")]
    NonPrimitiveRay(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("maximal cone {0} has {1} generators, expected rank {2} (fan must be simplicial)")]
    NonSimplicialFan(usize, usize, usize),
    #[error("maximal cone {0} references ray index {1} out of range")]
    RayIndexOutOfRange(usize, usize),
    #[error("maximal cone {0} repeats a ray index")]
    RepeatedIndex(usize),
    #[error("maximal cones {0} and {1} have identical generator sets")]
    DuplicateCone(usize, usize),
    #[error("ray {0} appears in no maximal cone")]
    UnusedRay(usize),
    #[error("maximal cone {0} is not smooth: |det| = {1}")]
    NotSmooth(usize, BigInt),
    #[error("facet {0:?} is shared by {1} maximal cones, expected exactly 2 (fan not complete)")]
    FacetPairing(Vec<usize>, usize),
    #[error("cones {0} and {1} overlap across their common facet")]
    OverlappingCones(usize, usize),
    #[error("the maximal-cone adjacency graph is disconnected")]
    Disconnected,
    #[error("no maximal cones given")]
    NoCones,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WallError {
    #[error("wall relation has no integer solution (malformed fan data)")]
    InconsistentWall,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EndoError {
    #[error("matrix is singular over Q")]
    SingularMatrix,
    #[error("matrix has {0} rows, expected rank {1}")]
    ShapeMismatch(usize, usize),
    #[error("image of maximal cone {0} is contained in no maximal cone")]
    NotToric(usize),
}

// ---- Exact linear algebra helpers ----

fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact determinant by fraction-free Gaussian elimination.
pub fn det(mat: &[LatticeVec]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = val;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Solves `cols · x = w` exactly over Q, where `cols` are the columns of a
/// square invertible matrix. Returns None when the matrix is singular.
pub fn solve_columns(cols: &[LatticeVec], w: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = cols.len();
    assert!(cols.iter().all(|c| c.len() == n));
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|j| BigRational::from(cols[j][i].clone()))
                .collect();
            row.push(BigRational::from(w[i].clone()));
            row
        })
        .collect();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, pivot);
        let p = m[k][k].clone();
        for j in k..=n {
            m[k][j] = &m[k][j] / &p;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in k..=n {
                    m[i][j] = &m[i][j] - &(&f * &m[k][j]);
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Rank over Q of a list of integer vectors.
fn rational_rank(vectors: &[LatticeVec]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let mut m: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        if rank == m.len() {
            break;
        }
        let Some(pivot) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let p = m[rank][c].clone();
        for j in 0..cols {
            m[rank][j] = &m[rank][j] / &p;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    m[i][j] = &m[i][j] - &(&f * &m[rank][j]);
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---- Fan ----

/// A complete smooth fan, certified at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVec>,
    max_cones: Vec<Vec<usize>>,
}

/// A codimension-one cone shared by exactly two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// Shared ray indices, ascending.
    pub tau_indices: Vec<usize>,
    /// Indices into the fan's maximal cone list.
    pub sigma: usize,
    pub sigma_prime: usize,
    /// The ray of sigma not on the wall.
    pub v_n: usize,
    /// The ray of sigma_prime not on the wall.
    pub v_n_prime: usize,
}

/// The unique integer relation `a·v_τ + v_n + v_n' = 0` across a wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallRelation {
    /// Coefficients aligned with `tau_indices` order.
    pub a: Vec<BigInt>,
}

impl WallRelation {
    /// Coefficients as machine integers; panics if a coefficient is
    /// astronomically large (they index polynomial exponents downstream).
    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.a
            .iter()
            .map(|x| {
                i64::try_from(x).expect("wall coefficient exceeds supported exponent range")
            })
            .collect()
    }
}

impl Fan {
    /// Validates and certifies a fan. Every failure names the violated
    /// invariant.
    pub fn new(
        rank: usize,
        rays: Vec<LatticeVec>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        if rank == 0 {
            return Err(FanError::RankZero);
        }
        if max_cones.is_empty() {
            return Err(FanError::NoCones);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(FanError::RayLength(i, r.len(), rank));
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(FanError::ZeroRay(i));
            }
            if gcd_all(r) != BigInt::one() {
                return Err(FanError::NonPrimitiveRay(i));
            }
            for (j, s) in rays.iter().enumerate().take(i) {
                if r == s {
                    return Err(FanError::DuplicateRay(j, i));
                }
            }
        }
        let mut cones: Vec<Vec<usize>> = Vec::with_capacity(max_cones.len());
        for (ci, cone) in max_cones.iter().enumerate() {
            if cone.len() != rank {
                return Err(FanError::NonSimplicialFan(ci, cone.len(), rank));
            }
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(FanError::RepeatedIndex(ci));
            }
            if let Some(&bad) = sorted.iter().find(|&&r| r >= rays.len()) {
                return Err(FanError::RayIndexOutOfRange(ci, bad));
            }
            for (cj, prev) in cones.iter().enumerate() {
                if *prev == sorted {
                    return Err(FanError::DuplicateCone(cj, ci));
                }
            }
            cones.push(sorted);
        }
        for ri in 0..rays.len() {
            if !cones.iter().any(|c| c.contains(&ri)) {
                return Err(FanError::UnusedRay(ri));
            }
        }
        for (ci, cone) in cones.iter().enumerate() {
            let mat: Vec<LatticeVec> = cone.iter().map(|&r| rays[r].clone()).collect();
            let d = det(&mat).abs();
            if d != BigInt::one() {
                return Err(FanError::NotSmooth(ci, d));
            }
        }
        let fan = Fan { rank, rays, max_cones: cones };
        fan.certify_complete()?;
        Ok(fan)
    }

    /// Structural completeness: every facet of a maximal cone is shared with
    /// exactly one other maximal cone, the opposite rays lie on opposite
    /// sides of each facet, and the adjacency graph is connected.
    fn certify_complete(&self) -> Result<(), FanError> {
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for skip in 0..cone.len() {
                let facet: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &r)| r)
                    .collect();
                facets.entry(facet).or_default().push(ci);
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.max_cones.len()];
        for (facet, owners) in &facets {
            if owners.len() != 2 {
                return Err(FanError::FacetPairing(facet.clone(), owners.len()));
            }
            let (a, b) = (owners[0], owners[1]);
            // Opposite-side condition: expressing the off-facet ray of one
            // cone in the other cone's basis must give coefficient −1 on
            // that cone's off-facet ray. Smoothness makes it ±1; +1 would
            // mean the cones overlap.
            let v_b = self.off_facet_ray(b, facet);
            let cols: Vec<LatticeVec> =
                self.max_cones[a].iter().map(|&r| self.rays[r].clone()).collect();
            let coords = solve_columns(&cols, &self.rays[v_b])
                .expect("smooth cone basis must be invertible");
            let pos = self.max_cones[a]
                .iter()
                .position(|&r| !facet.contains(&r))
                .expect("off-facet ray exists");
            if coords[pos] != BigRational::from(BigInt::from(-1)) {
                return Err(FanError::OverlappingCones(a, b));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.max_cones.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for &n in &adj[c] {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(FanError::Disconnected);
        }
        Ok(())
    }

    fn off_facet_ray(&self, cone: usize, facet: &[usize]) -> usize {
        *self.max_cones[cone]
            .iter()
            .find(|r| !facet.contains(r))
            .expect("maximal cone has one ray off each facet")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVec] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVec {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Rational coordinates of `v` in the generator basis of a maximal cone.
    pub fn cone_coordinates(&self, cone: usize, v: &[BigInt]) -> Vec<BigRational> {
        let cols: Vec<LatticeVec> = self.max_cones[cone]
            .iter()
            .map(|&r| self.rays[r].clone())
            .collect();
        solve_columns(&cols, v).expect("smooth cone basis must be invertible")
    }

    /// True when `v` lies in the (closed) maximal cone.
    pub fn cone_contains(&self, cone: usize, v: &[BigInt]) -> bool {
        self.cone_coordinates(cone, v)
            .iter()
            .all(|c| !c.is_negative())
    }

    /// Some maximal cone containing `v`; exists for every vector since the
    /// fan is complete.
    pub fn containing_cone(&self, v: &[BigInt]) -> Option<usize> {
        (0..self.max_cones.len()).find(|&c| self.cone_contains(c, v))
    }

    /// Enumerates the walls (adjacent maximal-cone pairs), each listed once,
    /// sorted by cone index pair.
    pub fn find_walls(&self) -> Vec<Wall> {
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for skip in 0..cone.len() {
                let facet: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &r)| r)
                    .collect();
                facets.entry(facet).or_default().push(ci);
            }
        }
        let mut walls: Vec<Wall> = facets
            .into_iter()
            .map(|(facet, owners)| {
                let (a, b) = (owners[0].min(owners[1]), owners[0].max(owners[1]));
                Wall {
                    v_n: self.off_facet_ray(a, &facet),
                    v_n_prime: self.off_facet_ray(b, &facet),
                    tau_indices: facet,
                    sigma: a,
                    sigma_prime: b,
                }
            })
            .collect();
        walls.sort_by_key(|w| (w.sigma, w.sigma_prime, w.tau_indices.clone()));
        walls
    }

    /// Solves the unique relation `a_1 v_1 + … + a_{n−1} v_{n−1} + v_n +
    /// v_n' = 0` with the v_i running over the wall rays in `tau_indices`
    /// order.
    pub fn wall_relation(&self, wall: &Wall) -> Result<WallRelation, WallError> {
        let mut cols: Vec<LatticeVec> = wall
            .tau_indices
            .iter()
            .map(|&r| self.rays[r].clone())
            .collect();
        cols.push(self.rays[wall.v_n].clone());
        let coords = solve_columns(&cols, &self.rays[wall.v_n_prime])
            .ok_or(WallError::InconsistentWall)?;
        let minus_one = BigRational::from(BigInt::from(-1));
        if coords[self.rank - 1] != minus_one {
            return Err(WallError::InconsistentWall);
        }
        let mut a = Vec::with_capacity(self.rank - 1);
        for c in &coords[..self.rank - 1] {
            if !c.denom().is_one() {
                return Err(WallError::InconsistentWall);
            }
            a.push(-c.numer().clone());
        }
        Ok(WallRelation { a })
    }

    /// The σ-chart coordinates written in the σ'-chart variables: the
    /// substitution table `(x_1·y^{−a_1}, …, x_{n−1}·y^{−a_{n−1}}, y^{−1})`.
    pub fn dual_chart_coordinates(&self, wall: &Wall) -> Result<Vec<LaurentPoly>, WallError> {
        let rel = self.wall_relation(wall)?;
        let a = rel.coeffs_i64();
        let n = self.rank;
        let vars = VarSet::base(n);
        let mut out = Vec::with_capacity(n);
        for (i, &ai) in a.iter().enumerate() {
            let mut exps = vec![0i64; n];
            exps[i] = 1;
            exps[n - 1] = -ai;
            out.push(LaurentPoly::monomial(&vars, BigRational::one(), &exps));
        }
        let mut exps = vec![0i64; n];
        exps[n - 1] = -1;
        out.push(LaurentPoly::monomial(&vars, BigRational::one(), &exps));
        Ok(out)
    }

    // ---- JSON ----

    pub fn from_json_str(s: &str) -> Result<Self, String> {
        let raw: FanJson = serde_json::from_str(s).map_err(|e| format!("invalid fan JSON: {e}"))?;
        raw.try_into_fan()
    }

    pub fn to_json(&self) -> FanJson {
        FanJson {
            rank: self.rank,
            rays: self
                .rays
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|x| i64::try_from(x).expect("ray coordinate out of i64 range"))
                        .collect()
                })
                .collect(),
            max_cones: self.max_cones.clone(),
        }
    }
}

/// Serde mirror of the fan interchange format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanJson {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanJson {
    pub fn try_into_fan(self) -> Result<Fan, String> {
        let rays = self
            .rays
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Fan::new(self.rank, rays, self.max_cones).map_err(|e| e.to_string())
    }
}

// ---- Builtin fans ----

fn iv(v: &[i64]) -> LatticeVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// The fan of P¹ (rays ±1).
pub fn p1() -> Fan {
    Fan::new(1, vec![iv(&[1]), iv(&[-1])], vec![vec![0], vec![1]]).unwrap()
}

/// The fan of Pⁿ (rays e_1,…,e_n, −e_1−…−e_n).
pub fn projective_space(n: usize) -> Fan {
    assert!(n >= 1);
    let mut rays: Vec<LatticeVec> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    rays.push(vec![BigInt::from(-1); n]);
    let cones: Vec<Vec<usize>> = (0..=n)
        .map(|skip| (0..=n).filter(|&r| r != skip).collect())
        .collect();
    Fan::new(n, rays, cones).unwrap()
}

/// The fan of P².
pub fn p2() -> Fan {
    projective_space(2)
}

/// The Hirzebruch surface F_n: rays e1, e2, −e1+n·e2, −e2.
pub fn hirzebruch(n: i64) -> Fan {
    assert!(n >= 0);
    Fan::new(
        2,
        vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, n]), iv(&[0, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .unwrap()
}

/// The fan of (P¹)ⁿ: rays ±e_i, maximal cones all sign patterns.
pub fn p1_power(n: usize) -> Fan {
    assert!(n >= 1);
    let mut rays = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut plus = vec![BigInt::zero(); n];
        plus[i] = BigInt::one();
        let mut minus = vec![BigInt::zero(); n];
        minus[i] = -BigInt::one();
        rays.push(plus);
        rays.push(minus);
    }
    let mut cones = Vec::with_capacity(1 << n);
    for signs in 0..(1usize << n) {
        let cone: Vec<usize> = (0..n)
            .map(|i| 2 * i + ((signs >> i) & 1))
            .collect();
        cones.push(cone);
    }
    Fan::new(n, rays, cones).unwrap()
}

/// The fan of P¹×P¹.
pub fn p1xp1() -> Fan {
    p1_power(2)
}

// ---- Lattice endomorphism analysis ----

/// An integer matrix acting on the cocharacter lattice (columns act on
/// column vectors: `v ↦ A·v`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeEndo {
    matrix: Vec<Vec<BigInt>>,
}

impl LatticeEndo {
    pub fn new(matrix: Vec<Vec<BigInt>>) -> Self {
        let n = matrix.len();
        assert!(matrix.iter().all(|r| r.len() == n), "matrix must be square");
        LatticeEndo { matrix }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Vec<Vec<BigInt>> {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> LatticeVec {
        self.matrix.iter().map(|row| dot(row, v)).collect()
    }

    pub fn compose(&self, other: &Self) -> Self {
        let n = self.rank();
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..n).map(|k| &self.matrix[i][k] * &other.matrix[k][j]).sum();
            }
        }
        LatticeEndo { matrix: out }
    }

    fn as_scalar(&self) -> Option<BigInt> {
        let d = self.matrix[0][0].clone();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { &d } else { &BigInt::zero() };
                if x != want {
                    return None;
                }
            }
        }
        Some(d)
    }
}

/// Result of iterating a toric lattice endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrobeniusAnalysis {
    /// `φ̄^power = scale · Id` with `scale ≥ 1`, smallest such power.
    Scalar { power: u32, scale: BigInt },
    /// At `power`, every ray is an eigenvector; the eigenvalues split the
    /// lattice into the recorded factors.
    ProductDecomposition { power: u32, factors: Vec<FrobeniusFactor> },
    /// No scalar power or eigen-decomposition up to the bound.
    NotFound { max_power: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusFactor {
    pub scale: BigInt,
    /// Ray indices with this eigenvalue.
    pub rays: Vec<usize>,
    pub rank: usize,
}

/// Checks that the endomorphism maps every cone into some cone, then looks
/// for the smallest power that acts as a scalar, or an eigen-splitting of
/// the rays into sublattice factors.
pub fn frobenius_power_analysis(
    phi: &LatticeEndo,
    fan: &Fan,
    max_power: u32,
) -> Result<FrobeniusAnalysis, EndoError> {
    if phi.rank() != fan.rank() {
        return Err(EndoError::ShapeMismatch(phi.rank(), fan.rank()));
    }
    let mat: Vec<LatticeVec> = phi.matrix.clone();
    if det(&mat).is_zero() {
        return Err(EndoError::SingularMatrix);
    }
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let images: Vec<LatticeVec> = cone.iter().map(|&r| phi.apply(fan.ray(r))).collect();
        let ok = (0..fan.max_cones().len())
            .any(|target| images.iter().all(|w| fan.cone_contains(target, w)));
        if !ok {
            return Err(EndoError::NotToric(ci));
        }
    }

    let mut power = phi.clone();
    for m in 1..=max_power {
        if let Some(d) = power.as_scalar() {
            if d >= BigInt::one() {
                return Ok(FrobeniusAnalysis::Scalar { power: m, scale: d });
            }
        } else if let Some(groups) = eigen_ray_groups(&power, fan) {
            if groups.len() >= 2 && lattice_splits(&groups, fan) {
                let factors = groups
                    .into_iter()
                    .map(|(scale, rays)| {
                        let vecs: Vec<LatticeVec> =
                            rays.iter().map(|&r| fan.ray(r).clone()).collect();
                        FrobeniusFactor { scale, rank: rational_rank(&vecs), rays }
                    })
                    .collect();
                return Ok(FrobeniusAnalysis::ProductDecomposition { power: m, factors });
            }
        }
        power = power.compose(phi);
    }
    Ok(FrobeniusAnalysis::NotFound { max_power })
}

/// Groups rays by eigenvalue when every ray is a positive eigenvector of
/// the matrix; None otherwise.
fn eigen_ray_groups(power: &LatticeEndo, fan: &Fan) -> Option<Vec<(BigInt, Vec<usize>)>> {
    let mut groups: BTreeMap<BigInt, Vec<usize>> = BTreeMap::new();
    for (ri, ray) in fan.rays().iter().enumerate() {
        let image = power.apply(ray);
        let k = ray.iter().position(|x| !x.is_zero()).expect("rays are nonzero");
        let (num, den) = (&image[k], &ray[k]);
        if (num % den) != BigInt::zero() {
            return None;
        }
        let scale = num / den;
        if scale < BigInt::one() {
            return None;
        }
        let expected: LatticeVec = ray.iter().map(|x| x * &scale).collect();
        if expected != image {
            return None;
        }
        groups.entry(scale).or_default().push(ri);
    }
    Some(groups.into_iter().collect())
}

/// True when the eigen-groups span complementary sublattices whose direct
/// sum is the whole lattice (a basis drawn from the groups has det ±1).
fn lattice_splits(groups: &[(BigInt, Vec<usize>)], fan: &Fan) -> bool {
    let mut basis: Vec<LatticeVec> = Vec::new();
    for (_, rays) in groups {
        for &r in rays {
            let mut candidate = basis.clone();
            candidate.push(fan.ray(r).clone());
            if rational_rank(&candidate) == candidate.len() {
                basis = candidate;
            }
        }
    }
    basis.len() == fan.rank() && det(&basis).abs() == BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_wall_counts() {
        assert_eq!(p2().find_walls().len(), 3);
        assert_eq!(hirzebruch(1).find_walls().len(), 4);
        assert_eq!(p1xp1().find_walls().len(), 4);
        assert_eq!(p1().find_walls().len(), 1);
        assert_eq!(p1_power(3).find_walls().len(), 12);
    }

    #[test]
    fn wall_relation_examples() {
        // P²: every wall has a = (1)
        let fan = p2();
        for wall in fan.find_walls() {
            let rel = fan.wall_relation(&wall).unwrap();
            assert_eq!(rel.a, vec![BigInt::from(1)]);
        }
        // F_n: walls carry a ∈ {−n, 0, 0, n}
        for n in 1..=3i64 {
            let fan = hirzebruch(n);
            let mut coeffs: Vec<i64> = fan
                .find_walls()
                .iter()
                .map(|w| fan.wall_relation(w).unwrap().coeffs_i64()[0])
                .collect();
            coeffs.sort_unstable();
            assert_eq!(coeffs, vec![-n, 0, 0, n]);
        }
        // P¹×P¹: all walls have a = (0)
        let fan = p1xp1();
        for wall in fan.find_walls() {
            assert_eq!(fan.wall_relation(&wall).unwrap().a, vec![BigInt::zero()]);
        }
    }

    #[test]
    fn wall_relation_round_trip() {
        for fan in [p2(), hirzebruch(2), p1xp1(), projective_space(3)] {
            for wall in fan.find_walls() {
                let rel = fan.wall_relation(&wall).unwrap();
                let mut acc = vec![BigInt::zero(); fan.rank()];
                for (ai, &ri) in rel.a.iter().zip(&wall.tau_indices) {
                    for (s, x) in acc.iter_mut().zip(fan.ray(ri)) {
                        *s += ai * x;
                    }
                }
                for (s, x) in acc.iter_mut().zip(fan.ray(wall.v_n)) {
                    *s += x;
                }
                for (s, x) in acc.iter_mut().zip(fan.ray(wall.v_n_prime)) {
                    *s += x;
                }
                assert!(acc.iter().all(|x| x.is_zero()), "relation failed on {wall:?}");
            }
        }
    }

    #[test]
    fn dual_chart_examples() {
        let vars = VarSet::base(2);
        let fan = p2();
        let wall = &fan.find_walls()[0];
        let coords = fan.dual_chart_coordinates(wall).unwrap();
        // a = (1): (x1*y^-1, y^-1)
        assert_eq!(coords[0], LaurentPoly::parse(&vars, "x1*y^-1").unwrap());
        assert_eq!(coords[1], LaurentPoly::parse(&vars, "y^-1").unwrap());
    }

    #[test]
    fn rejects_bad_fans() {
        // non-primitive ray
        let e = Fan::new(1, vec![iv(&[2]), iv(&[-1])], vec![vec![0], vec![1]]);
        assert_eq!(e, Err(FanError::NonPrimitiveRay(0)));
        // half-space only: the facet pairing fails
        let e = Fan::new(2, vec![iv(&[1, 0]), iv(&[0, 1])], vec![vec![0, 1]]);
        assert!(matches!(e, Err(FanError::FacetPairing(..))));
        // non-smooth cone
        let e = Fan::new(
            2,
            vec![iv(&[1, 0]), iv(&[1, 2]), iv(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        );
        assert!(matches!(e, Err(FanError::NotSmooth(0, _))));
        // overlapping cones across a facet (both on the same side)
        let e = Fan::new(
            2,
            vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[1, 1])],
            vec![vec![0, 1], vec![0, 2]],
        );
        assert!(matches!(
            e,
            Err(FanError::OverlappingCones(..)) | Err(FanError::FacetPairing(..))
        ));
    }

    #[test]
    fn completeness_sampling() {
        // deterministic pseudo-random directions all land in some cone
        let fans = [p2(), hirzebruch(3), p1xp1(), projective_space(3)];
        let mut state = 0x9e3779b97f4a7c15u64;
        for fan in &fans {
            for _ in 0..50 {
                let v: LatticeVec = (0..fan.rank())
                    .map(|_| {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        BigInt::from((state >> 33) as i64 - (1 << 30))
                    })
                    .collect();
                assert!(fan.containing_cone(&v).is_some());
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        // 3·Id on P² is scalar immediately
        let fan = p2();
        let phi = LatticeEndo::from_i64(&[vec![3, 0], vec![0, 3]]);
        assert_eq!(
            frobenius_power_analysis(&phi, &fan, 64).unwrap(),
            FrobeniusAnalysis::Scalar { power: 1, scale: BigInt::from(3) }
        );
        // swap-and-double on P¹×P¹ squares to 4·Id
        let fan = p1xp1();
        let phi = LatticeEndo::from_i64(&[vec![0, 2], vec![2, 0]]);
        assert_eq!(
            frobenius_power_analysis(&phi, &fan, 64).unwrap(),
            FrobeniusAnalysis::Scalar { power: 2, scale: BigInt::from(4) }
        );
        // diag(2,3) splits the lattice into two eigen-factors
        let phi = LatticeEndo::from_i64(&[vec![2, 0], vec![0, 3]]);
        match frobenius_power_analysis(&phi, &fan, 64).unwrap() {
            FrobeniusAnalysis::ProductDecomposition { power, factors } => {
                assert_eq!(power, 1);
                let scales: Vec<BigInt> = factors.iter().map(|f| f.scale.clone()).collect();
                assert_eq!(scales, vec![BigInt::from(2), BigInt::from(3)]);
                assert!(factors.iter().all(|f| f.rank == 1));
            }
            other => panic!("expected product decomposition, got {other:?}"),
        }
        // scalar detection for a few d
        for d in 1..=4i64 {
            let phi = LatticeEndo::from_i64(&[vec![d, 0], vec![0, d]]);
            assert_eq!(
                frobenius_power_analysis(&phi, &fan, 64).unwrap(),
                FrobeniusAnalysis::Scalar { power: 1, scale: BigInt::from(d) }
            );
        }
        // a rotation by 90° is toric on P¹×P¹ and squares to... −Id, then
        // fourth power Id
        let phi = LatticeEndo::from_i64(&[vec![0, -1], vec![1, 0]]);
        assert_eq!(
            frobenius_power_analysis(&phi, &fan, 64).unwrap(),
            FrobeniusAnalysis::Scalar { power: 4, scale: BigInt::one() }
        );
        // shear is not toric on P¹×P¹: the cone on (e2, −e1) maps to the
        // span of (1,1) and (−1,0), which no quadrant contains
        let phi = LatticeEndo::from_i64(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(
            frobenius_power_analysis(&phi, &fan, 64),
            Err(EndoError::NotToric(1))
        );
    }

    #[test]
    fn fan_json_round_trip() {
        let fan = hirzebruch(2);
        let js = serde_json::to_string(&fan.to_json()).unwrap();
        let back = Fan::from_json_str(&js).unwrap();
        assert_eq!(fan, back);
        let bad = r#"{"rank": 2, "rays": [[2,0],[0,1],[-1,0],[0,-1]], "max_cones": [[0,1],[1,2],[2,3],[3,0]]}"#;
        let err = Fan::from_json_str(bad).unwrap_err();
        assert!(err.contains("not primitive"), "diagnostic was: {err}");
    }
}
