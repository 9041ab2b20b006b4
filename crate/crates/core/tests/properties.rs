//! Randomized property suite. Every runner is seeded with the zero seed,
//! so failures are reproducible without persistence files.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_endo::comp;
use toric_endo::fiber::{FiberPoly, SemigroupRing};
use toric_endo::lattice::{frobenius_power_analysis, p1, p2, p1xp1, FrobeniusAnalysis, LatticeEndo};
use toric_endo::poly::{LaurentPoly, VarSet};
use toric_endo::sections::{section_space, SplitBundleSpec, ToricDivisor};
use toric_endo::split::{
    build_fiber_polys, no_common_zero, BasedMapData, SectionChoice, ZeroStatus, ZeroWitness,
};
use toric_endo::transition::{
    closed_form_action, closed_form_coeff, cotangent_jacobian, sym_action, tangent_jacobian,
};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::from_seed(RngAlgorithm::ChaCha, &[0u8; 32]),
    )
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=4)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn laurent(nvars: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, nvars), rational()), 0..5).prop_map(
        move |terms| {
            let names: Vec<String> = (0..nvars).map(|i| format!("t{i}")).collect();
            let vars = VarSet::new(&names);
            let mut p = LaurentPoly::zero(&vars);
            for (exps, c) in terms {
                p = &p + &LaurentPoly::monomial(&vars, c, &exps);
            }
            p
        },
    )
}

fn fiber_poly(n: usize, d: u32) -> impl Strategy<Value = FiberPoly> {
    let cells = comp::compositions(d, n).len();
    prop::collection::vec(
        prop::option::of((prop::collection::vec(-2i64..=2, n), -3i64..=3)),
        cells..=cells,
    )
    .prop_map(move |slots| {
        let vars = VarSet::base(n);
        let mut f = FiberPoly::zero(&vars, n, d);
        for (lambda, slot) in comp::compositions(d, n).iter().zip(slots) {
            if let Some((exps, c)) = slot {
                if c != 0 {
                    f.add_term(
                        lambda,
                        LaurentPoly::monomial(&vars, BigRational::from(BigInt::from(c)), &exps),
                    );
                }
            }
        }
        f
    })
}

#[test]
fn laurent_ring_axioms() {
    runner(128)
        .run(&(laurent(3), laurent(3), laurent(3)), |(p, q, r)| {
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &q, &q * &p);
            Ok(())
        })
        .unwrap();
}

#[test]
fn substitution_is_multiplicative() {
    // shared degree-1 images turn products into products
    let image = |n: usize| {
        prop::collection::vec((prop::collection::vec(-1i64..=1, n), -2i64..=2), 1..=2)
            .prop_map(move |rows| {
                let vars = VarSet::base(n);
                let mut form = FiberPoly::zero(&vars, n, 1);
                for (k, (exps, c)) in rows.into_iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let mut lambda = vec![0u32; n];
                    lambda[k % n] = 1;
                    form.add_term(
                        &lambda,
                        LaurentPoly::monomial(&vars, BigRational::from(BigInt::from(c)), &exps),
                    );
                }
                form
            })
    };
    let n = 2usize;
    runner(64)
        .run(
            &(fiber_poly(n, 1), fiber_poly(n, 2), prop::collection::vec(image(n), n..=n)),
            |(f, g, images)| {
                let lhs = f.mul(&g).substitute(&images).unwrap();
                let rhs = f.substitute(&images).unwrap().mul(&g.substitute(&images).unwrap());
                prop_assert_eq!(lhs, rhs);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn semigroup_membership_matches_bounded_search() {
    fn brute(a: &[i64], exps: &[i64]) -> bool {
        let n = a.len() + 1;
        if exps.iter().take(n - 1).any(|&e| e < 0) {
            return false;
        }
        // alpha is forced coordinatewise; search the remaining beta
        let bound: i64 = 1 + exps[n - 1].abs()
            + a.iter().zip(exps).map(|(ai, e)| (ai * e).abs()).sum::<i64>();
        (0..=bound).any(|beta| {
            let y: i64 =
                -beta - a.iter().zip(exps).map(|(ai, e)| ai * e).sum::<i64>();
            y == exps[n - 1]
        })
    }
    runner(256)
        .run(
            &prop::collection::vec(-3i64..=3, 1..=3).prop_flat_map(|a| {
                let n = a.len() + 1;
                (Just(a), prop::collection::vec(-7i64..=7, n..=n))
            }),
            |(a, exps)| {
                let fast = SemigroupRing::new(&a).member(&exps);
                prop_assert_eq!(fast.member, brute(&a, &exps));
                if let Some(w) = fast.witness {
                    // witness really multiplies out to the monomial
                    let mut got = vec![0i64; a.len() + 1];
                    for (i, &alpha) in w.iter().enumerate().take(a.len()) {
                        got[i] += alpha;
                        let y = got.len() - 1;
                        got[y] -= a[i] * alpha;
                    }
                    let y = got.len() - 1;
                    got[y] -= w[a.len()];
                    prop_assert_eq!(got, exps);
                }
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn expansion_identity_reconstructs_sym_action() {
    for n in 2..=3usize {
        for d in 1..=3u32 {
            runner(10)
                .run(
                    &(prop::collection::vec(-3i64..=3, n - 1), fiber_poly(n, d)),
                    |(a, f)| {
                        let brute = sym_action(&tangent_jacobian(&a), &f);
                        let fast = closed_form_action(&a, &f);
                        prop_assert_eq!(brute, fast);
                        Ok(())
                    },
                )
                .unwrap();
        }
    }
}

#[test]
fn carrier_monomials_are_distinct_and_homogeneous() {
    // over mu <= eta with nonzero structural coefficient, the carrier
    // monomials never collide and share one total degree
    runner(128)
        .run(
            &(prop::collection::vec(-3i64..=3, 1..=2), 1u32..=3),
            |(a, d)| {
                let n = a.len() + 1;
                for eta in comp::compositions(d, n) {
                    let mut seen: Vec<Vec<i64>> = Vec::new();
                    let mut degree: Option<i64> = None;
                    for mu in comp::compositions(d, n) {
                        let Some(entry) = closed_form_coeff(&a, &mu, &eta).unwrap() else {
                            continue;
                        };
                        if entry.coeff.is_zero() {
                            continue;
                        }
                        prop_assert!(!seen.contains(&entry.exps), "collision at eta={eta:?}");
                        let total: i64 = entry.exps.iter().sum();
                        if let Some(t) = degree {
                            prop_assert_eq!(t, total, "degrees drift at eta={:?}", eta);
                        }
                        degree = Some(total);
                        seen.push(entry.exps);
                    }
                }
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn cotangent_is_inverse_transpose_of_tangent() {
    runner(64)
        .run(&prop::collection::vec(-5i64..=5, 1..=3), |a| {
            let n = a.len() + 1;
            let j = tangent_jacobian(&a);
            let jt = j.transpose();
            let jdag = cotangent_jacobian(&a);
            let prod = jdag.compose(&jt);
            let id = toric_endo::transition::TransitionMatrix::identity(prod.vars(), n);
            prop_assert_eq!(prod, id);
            Ok(())
        })
        .unwrap();
}

#[test]
fn scalar_lattice_maps_are_detected_immediately() {
    for d in 1..=8i64 {
        for fan in [p2(), p1xp1()] {
            let rows: Vec<Vec<i64>> = (0..2)
                .map(|i| (0..2).map(|j| if i == j { d } else { 0 }).collect())
                .collect();
            let phi = LatticeEndo::from_i64(&rows);
            assert_eq!(
                frobenius_power_analysis(&phi, &fan, 64).unwrap(),
                FrobeniusAnalysis::Scalar { power: 1, scale: BigInt::from(d) }
            );
        }
    }
}

#[test]
fn equal_bundles_always_admit_the_power_sections() {
    // the constant section inhabits the diagonal slots both for q = 0 and
    // for the pullback-matched q = d
    runner(64)
        .run(
            &(prop::collection::vec(0i64..=3, 3..=3), 1u32..=3, 0u32..=1),
            |(coeffs, d, q_is_d)| {
                let fan = p2();
                let bundle = ToricDivisor::new(coeffs);
                let q = if q_is_d == 1 { d } else { 0 };
                let spec = SplitBundleSpec::new(vec![bundle.clone(), bundle.clone()], q, d)
                    .unwrap();
                for ell in 0..2usize {
                    let lambda = comp::scaled_unit(d, 2, ell);
                    let space = section_space(&fan, &spec, ell, &lambda).unwrap();
                    prop_assert!(
                        space.contains(&[0, 0]),
                        "origin missing for q={q} d={d} ell={ell}"
                    );
                }
                Ok(())
            },
        )
        .unwrap();
}

/// 100 random rank-2 instances over the line: every Point witness must
/// evaluate to an exact common zero, and NoCommonZero instances must
/// survive a dense rational sweep of base and fiber points.
#[test]
fn rank2_zero_checker_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let fan = p1();
    let mut found = 0usize;
    let mut cleared = 0usize;

    for _ in 0..100 {
        let k1 = rng.gen_range(0..=2i64);
        let k2 = rng.gen_range(0..=2i64);
        let d = rng.gen_range(1..=2u32);
        let q = rng.gen_range(0..=2u32);
        let spec = SplitBundleSpec::new(
            vec![ToricDivisor::new(vec![0, k1]), ToricDivisor::new(vec![0, k2])],
            q,
            d,
        )
        .unwrap();
        let mut data = BasedMapData::new(fan.clone(), spec.clone());
        for ell in 0..2usize {
            for lambda in comp::compositions(d, 2) {
                let space = section_space(&fan, &spec, ell, &lambda).unwrap();
                let points = space.lattice_points();
                if points.is_empty() {
                    continue;
                }
                let mut terms: Vec<(Vec<i64>, BigRational)> = Vec::new();
                for p in points {
                    if !rng.gen_bool(0.7) {
                        continue;
                    }
                    let c = rng.gen_range(-3..=3i64);
                    if c != 0 {
                        terms.push((p, BigRational::from(BigInt::from(c))));
                    }
                }
                if terms.is_empty() {
                    continue;
                }
                data.set_section(ell, lambda.clone(), SectionChoice { terms }).unwrap();
            }
        }

        let verdict = no_common_zero(&data).unwrap();
        match verdict.status {
            ZeroStatus::CommonZeroFound(ZeroWitness::Point { chart, base, fiber }) => {
                let polys = build_fiber_polys(&data, chart).unwrap();
                assert!(fiber.iter().any(|z| !z.is_zero()), "projective point");
                for f in &polys {
                    assert!(f.eval(&base, &fiber).unwrap().is_zero(), "witness must vanish");
                }
                found += 1;
            }
            ZeroStatus::CommonZeroFound(ZeroWitness::VanishingComponent { ell }) => {
                let polys = build_fiber_polys(&data, 0).unwrap();
                assert!(polys[ell].is_zero());
                found += 1;
            }
            ZeroStatus::NoCommonZero => {
                let polys = build_fiber_polys(&data, 0).unwrap();
                let samples: Vec<BigRational> = (-6..=6)
                    .map(|k| BigRational::new(BigInt::from(k), BigInt::from(2)))
                    .collect();
                for p in &samples {
                    for t in &samples {
                        for fiber in [
                            vec![BigRational::from(BigInt::from(1)), t.clone()],
                            vec![t.clone(), BigRational::from(BigInt::from(1))],
                        ] {
                            let all_zero = polys.iter().all(|f| {
                                f.eval(std::slice::from_ref(p), &fiber).unwrap().is_zero()
                            });
                            assert!(!all_zero, "NoCommonZero contradicted at p={p} t={t}");
                        }
                    }
                }
                cleared += 1;
            }
            ZeroStatus::Inconclusive { .. } => {
                // allowed: the exact rational hunt can miss irrational
                // resultant roots; no claim is made either way
            }
        }
    }

    assert!(found + cleared >= 60, "the sweep must exercise both outcomes: {found} + {cleared}");
}
