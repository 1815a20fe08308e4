//! Property checks shared by the property suite and the acceptance target.
//! Each returns `Err` with the failing input on the first counterexample.

#![allow(dead_code)]

use involution_lattice::certificate::Verdict;
use involution_lattice::lattice::{
    det_poly, gram_matrix, hodge_bound, rational_roots, signature, solve_in_basis, DivisorClass, IntersectionSpace,
    QPoly, Signature,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, max_global_rejects: 100_000, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn flatten<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("S{i}")).collect()
}

/// Space on `S0..S{n-1}` with the given symmetric integer matrix.
pub fn space_from(m: &[Vec<i64>]) -> IntersectionSpace {
    let syms = names(m.len());
    let mut sp = IntersectionSpace::new(&syms, None).unwrap();
    for i in 0..m.len() {
        for j in i..m.len() {
            sp.set_int(&syms[i], &syms[j], m[i][j]).unwrap();
        }
    }
    sp
}

pub fn class_from(c: &[i64]) -> DivisorClass {
    let syms = names(c.len());
    let terms: Vec<(&str, i64)> = syms.iter().map(String::as_str).zip(c.iter().copied()).collect();
    DivisorClass::from_ints(&terms)
}

fn sym_matrix(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(lo..=hi, n * (n + 1) / 2).prop_map(move |v| {
        let mut m = vec![vec![0; n]; n];
        let mut it = v.into_iter();
        for i in 0..n {
            for j in i..n {
                let x = it.next().unwrap();
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        m
    })
}

fn sized_sym(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max).prop_flat_map(|n| sym_matrix(n, -6, 6))
}

/// Pairing is symmetric and linear in each argument.
pub fn bilinearity(cases: u32) -> Result<(), String> {
    let strat = sized_sym(6).prop_flat_map(|m| {
        let n = m.len();
        let v = || prop::collection::vec(-5i64..=5, n);
        (Just(m), v(), v(), v(), -4i64..=4)
    });
    flatten(runner(cases).run(&strat, |(m, a, b, c, l)| {
        let sp = space_from(&m);
        let (a, b, c) = (class_from(&a), class_from(&b), class_from(&c));
        let p = |x: &DivisorClass, y: &DivisorClass| sp.pair_const(x, y).unwrap();
        prop_assert_eq!(p(&a, &b), p(&b, &a));
        let lhs = p(&a.scale_int(l).plus(&b), &c);
        prop_assert_eq!(lhs, p(&a, &c) * q(l) + p(&b, &c));
        let rhs = p(&c, &a.minus(&b));
        prop_assert_eq!(rhs, p(&c, &a) - p(&c, &b));
        Ok(())
    }))
}

/// Leibniz sum over permutations; shares nothing with the library.
pub fn leibniz(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(p: &mut Vec<usize>, k: usize, m: &[Vec<BigInt>], total: &mut BigInt) {
    let n = p.len();
    if k == n {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let mut t = BigInt::one();
        for (i, &j) in p.iter().enumerate() {
            t *= &m[i][j];
        }
        if inversions % 2 == 1 {
            t = -t;
        }
        *total += t;
        return;
    }
    for i in k..n {
        p.swap(k, i);
        permute(p, k + 1, m, total);
        p.swap(k, i);
    }
}

/// The exact determinant of a matrix with entries `a + b x` agrees with the
/// permutation expansion at seven sample points, which pins a polynomial of
/// degree at most five.
pub fn det_oracle(cases: u32) -> Result<(), String> {
    let strat = (1usize..=5).prop_flat_map(|n| prop::collection::vec((-9i64..=9, -3i64..=3), n * n).prop_map(move |v| (n, v)));
    flatten(runner(cases).run(&strat, |(n, v)| {
        let m: Vec<Vec<QPoly>> = (0..n)
            .map(|i| (0..n).map(|j| QPoly::from_i64s(&[v[i * n + j].0, v[i * n + j].1])).collect())
            .collect();
        let d = det_poly(&m).unwrap();
        for t in -3i64..=3 {
            let at: Vec<Vec<BigInt>> = (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(v[i * n + j].0 + v[i * n + j].1 * t)).collect())
                .collect();
            prop_assert_eq!(d.eval(&q(t)), BigRational::from_integer(leibniz(&at)));
        }
        Ok(())
    }))
}

/// `Aᵀ J A` with `J = diag(1, -1, ..., -1)`.
pub fn hyperbolic(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let j = |k: usize| if k == 0 { 1 } else { -1 };
    (0..n).map(|r| (0..n).map(|c| (0..n).map(|k| a[k][r] * j(k) * a[k][c]).sum()).collect()).collect()
}

/// The index bound never reports a violation on a form of signature
/// `(1, n-1)`.
pub fn hodge_sound(cases: u32) -> Result<(), String> {
    let strat = (2usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..=3, n), n),
            prop::collection::vec(-4i64..=4, n),
            prop::collection::vec(-4i64..=4, n),
        )
    });
    flatten(runner(cases).run(&strat, |(a, p, e)| {
        let n = a.len();
        let ab: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        prop_assume!(!leibniz(&ab).is_zero());
        let sp = space_from(&hyperbolic(&a));
        let (p, e) = (class_from(&p), class_from(&e));
        prop_assume!(sp.pair_const(&p, &p).unwrap() > q(0));
        let gens: Vec<DivisorClass> = names(n).iter().map(|s| DivisorClass::symbol(s)).collect();
        let sig = signature(&gram_matrix(&sp, &gens).unwrap()).unwrap();
        prop_assert_eq!(sig, Signature::new(1, n - 1, 0));
        let c = hodge_bound(&sp, &p, &e).unwrap();
        prop_assert!(c.verdict != Verdict::Violation, "{}", c.render_text());
        Ok(())
    }))
}

/// Every reported root substitutes to zero, and planted roots are found.
pub fn roots_back_substitute(cases: u32) -> Result<(), String> {
    let nz = || prop_oneof![-9i64..=-1, 1i64..=9];
    let strat = (nz(), -12i64..=12, nz(), -12i64..=12, nz(), any::<bool>(), (-9i64..=9, -9i64..=9, -9i64..=9));
    flatten(runner(cases).run(&strat, |(a, p1, q1, p2, q2, quad, (c0, c1, c2))| {
        let lin = |p: i64, d: i64| QPoly::from_i64s(&[-p, d]);
        let planted = if quad { &(&lin(p1, q1) * &lin(p2, q2)).scale(&q(a)) } else { &lin(p1, q1).scale(&q(a)) };
        let roots = rational_roots(planted).unwrap();
        for r in &roots {
            prop_assert!(planted.eval(r).is_zero());
        }
        prop_assert!(roots.contains(&BigRational::new(p1.into(), q1.into())));
        if quad {
            prop_assert!(roots.contains(&BigRational::new(p2.into(), q2.into())));
        }
        let free = QPoly::from_i64s(&[c0, c1, c2]);
        if !free.is_zero() {
            for r in rational_roots(&free).unwrap() {
                prop_assert!(free.eval(&r).is_zero());
            }
        }
        Ok(())
    }))
}

/// Coefficients from `solve_in_basis` reproduce every pairing with the basis.
pub fn basis_residual(cases: u32) -> Result<(), String> {
    let strat = sized_sym(5).prop_flat_map(|m| {
        let n = m.len();
        (Just(m), prop::collection::vec(-5i64..=5, n), 1..=n)
    });
    flatten(runner(cases).run(&strat, |(m, t, k)| {
        let sp = space_from(&m);
        let basis: Vec<DivisorClass> = names(k).iter().map(|s| DivisorClass::symbol(s)).collect();
        let target = class_from(&t);
        let Ok(c) = solve_in_basis(&sp, &target, &basis) else { return Ok(()) };
        let mut combo = DivisorClass::zero();
        for (ci, b) in c.iter().zip(&basis) {
            combo = combo.plus(&b.scale(ci));
        }
        for b in &basis {
            prop_assert_eq!(sp.pair_const(&target, b).unwrap(), sp.pair_const(&combo, b).unwrap());
        }
        Ok(())
    }))
}
