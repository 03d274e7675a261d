//! Differential tests for the statistic counters, exhaustive checks of the
//! exact exceedance moment formulas, and a quadrature oracle for the
//! limiting covariance kernel.

use ewens_core::ewens::{enumerate_ewens, EwensParam};
use ewens_core::perm::{all_permutations, Permutation};
use ewens_core::stats::{
    adjacency_count, count_bivincular, count_dashed, count_local, exceedance_count,
    f_function, gamma_p, theoretical, BivincularPattern, Constraint, DashedPattern, Expr,
    LocalStatistic, Rel, Var,
};
use ewens_core::{rat, rat_int, Rat};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut word: Vec<usize> = (1..=n).collect();
    for k in (1..n).rev() {
        let j = rng.gen_range(0..=k);
        word.swap(k, j);
    }
    Permutation::from_one_line(word).unwrap()
}

/// Naive reimplementations used as differential oracles.
mod naive {
    use super::*;

    pub fn gamma(sigma: &Permutation, p: usize) -> usize {
        let n = sigma.size();
        let mut seen = vec![false; n + 1];
        let mut count = 0;
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = sigma.image(x);
            }
            if len == p {
                count += 1;
            }
        }
        count
    }

    pub fn exceedances(sigma: &Permutation) -> usize {
        let mut c = 0;
        for i in 1..=sigma.size() {
            if sigma.image(i) >= i {
                c += 1;
            }
        }
        c
    }

    pub fn adjacencies(sigma: &Permutation) -> usize {
        let mut c = 0;
        for i in 1..sigma.size() {
            let a = sigma.image(i) as i64;
            let b = sigma.image(i + 1) as i64;
            if (a - b).abs() == 1 {
                c += 1;
            }
        }
        c
    }

    /// Pattern counting straight from the definition: all increasing
    /// position tuples, filtered.
    pub fn dashed(sigma: &Permutation, pattern: &DashedPattern) -> u64 {
        let p = pattern.size();
        let n = sigma.size();
        if p > n {
            return 0;
        }
        let mut count = 0;
        let mut tuple: Vec<usize> = (1..=p).collect();
        loop {
            let adjacency_ok = pattern
                .adjacent_positions()
                .iter()
                .all(|&x| tuple[x] == tuple[x - 1] + 1);
            if adjacency_ok {
                let values: Vec<usize> = tuple.iter().map(|&q| sigma.image(q)).collect();
                let tau = pattern.pattern();
                let order_ok = (0..p).all(|a| {
                    (0..p).all(|b| (values[a] < values[b]) == (tau.image(a + 1) < tau.image(b + 1)))
                });
                if order_ok {
                    count += 1;
                }
            }
            // Next increasing tuple.
            let mut k = p;
            loop {
                if k == 0 {
                    return count;
                }
                k -= 1;
                if tuple[k] < n - (p - 1 - k) {
                    tuple[k] += 1;
                    for j in k + 1..p {
                        tuple[j] = tuple[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

#[test]
fn counters_match_naive_on_random_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=30);
        let sigma = random_perm(&mut rng, n);
        for p in 1..=4 {
            assert_eq!(gamma_p(&sigma, p), naive::gamma(&sigma, p));
        }
        assert_eq!(exceedance_count(&sigma), naive::exceedances(&sigma));
        assert_eq!(adjacency_count(&sigma), naive::adjacencies(&sigma));
    }
}

#[test]
fn dashed_counter_matches_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let patterns = [
        DashedPattern::from_word(vec![2, 1], &[]).unwrap(),
        DashedPattern::from_word(vec![2, 1], &[1]).unwrap(),
        DashedPattern::from_word(vec![1, 3, 2], &[1]).unwrap(),
        DashedPattern::from_word(vec![1, 2, 3], &[]).unwrap(),
        DashedPattern::from_word(vec![3, 1, 2], &[2]).unwrap(),
        DashedPattern::from_word(vec![2, 4, 1, 3], &[1, 3]).unwrap(),
    ];
    for _ in 0..60 {
        let n = rng.gen_range(1..=12);
        let sigma = random_perm(&mut rng, n);
        for pat in &patterns {
            assert_eq!(
                count_dashed(&sigma, pat),
                naive::dashed(&sigma, pat),
                "pattern {:?} sigma {sigma}",
                pat.pattern()
            );
        }
    }
}

/// Every p-subset of positions realizes exactly one relative order, so the
/// dashed counts over all patterns of size p sum to C(N, p).
#[test]
fn dashed_counts_partition_subsets() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let patterns: Vec<DashedPattern> = all_permutations(3)
        .unwrap()
        .map(|tau| DashedPattern::new(tau, Default::default()).unwrap())
        .collect();
    for _ in 0..30 {
        let n = rng.gen_range(3..=12);
        let sigma = random_perm(&mut rng, n);
        let total: u64 = patterns.iter().map(|p| count_dashed(&sigma, p)).sum();
        let choose = (n * (n - 1) * (n - 2) / 6) as u64;
        assert_eq!(total, choose);
    }
}

#[test]
fn f_function_is_nondecreasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..100 {
        let n = rng.gen_range(1..=25);
        let sigma = random_perm(&mut rng, n);
        let mut last = 0.0;
        for k in 0..=50 {
            let x = k as f64 / 50.0;
            let v = f_function(&sigma, x).unwrap();
            assert!(v >= last - 1e-12, "x={x}");
            last = v;
        }
    }
}

#[test]
fn bivincular_duality_with_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let cases = [
        (vec![2, 1], vec![1], vec![]),
        (vec![1, 2, 3], vec![1], vec![1]),
        (vec![1, 3, 2], vec![], vec![2]),
        (vec![3, 1, 2], vec![2], vec![1]),
    ];
    for _ in 0..50 {
        let n = rng.gen_range(2..=10);
        let sigma = random_perm(&mut rng, n);
        for (tau, x, y) in &cases {
            let tau_perm = Permutation::from_one_line(tau.clone()).unwrap();
            let pat = BivincularPattern::new(
                tau_perm.clone(),
                x.iter().copied().collect(),
                y.iter().copied().collect(),
            )
            .unwrap();
            let dual = BivincularPattern::new(
                tau_perm.inverse(),
                y.iter().copied().collect(),
                x.iter().copied().collect(),
            )
            .unwrap();
            assert_eq!(
                count_bivincular(&sigma, &pat),
                count_bivincular(&sigma.inverse(), &dual),
                "tau={tau:?} X={x:?} Y={y:?} sigma={sigma}"
            );
        }
    }
}

fn expr(var: Var, j: usize, d: i64) -> Expr {
    Expr { var, j, d }
}

#[test]
fn local_statistics_encode_classical_counters() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    // Adjacencies: sum of the two shifted-pair statistics.
    let adj = |eps: i64| {
        LocalStatistic::new(
            2,
            vec![
                Constraint {
                    lhs: expr(Var::Position, 2, 0),
                    rel: Rel::Eq,
                    rhs: expr(Var::Position, 1, 1),
                },
                Constraint {
                    lhs: expr(Var::Value, 2, 0),
                    rel: Rel::Eq,
                    rhs: expr(Var::Value, 1, eps),
                },
            ],
        )
        .unwrap()
    };
    // Descents as a local statistic.
    let descents = LocalStatistic::new(
        2,
        vec![
            Constraint {
                lhs: expr(Var::Position, 2, 0),
                rel: Rel::Eq,
                rhs: expr(Var::Position, 1, 1),
            },
            Constraint {
                lhs: expr(Var::Value, 1, 0),
                rel: Rel::Gt,
                rhs: expr(Var::Value, 2, 0),
            },
        ],
    )
    .unwrap();
    let descent_pattern = DashedPattern::from_word(vec![2, 1], &[1]).unwrap();
    for _ in 0..100 {
        let n = rng.gen_range(2..=15);
        let sigma = random_perm(&mut rng, n);
        let adj_total = count_local(&sigma, &adj(1)) + count_local(&sigma, &adj(-1));
        assert_eq!(adj_total, adjacency_count(&sigma) as u64);
        assert_eq!(
            count_local(&sigma, &descents),
            count_dashed(&sigma, &descent_pattern)
        );
    }
}

/// Exact exceedance-indicator moments against exhaustive enumeration for
/// every size up to 6 and the three reference parameter values.
#[test]
fn exceedance_moment_formulas_exact() {
    for (num, den) in [(1i64, 2i64), (1, 1), (2, 1)] {
        let theta = rat(num, den);
        let param = EwensParam::new(theta.clone()).unwrap();
        for n in 2..=6usize {
            // Enumerate once, accumulate first and second indicator moments.
            let mut e = vec![Rat::zero(); n + 1];
            let mut ee = vec![vec![Rat::zero(); n + 1]; n + 1];
            for (sigma, w) in enumerate_ewens(n, &param).unwrap() {
                let hits: Vec<usize> = (1..=n).filter(|&i| sigma.image(i) >= i).collect();
                for &i in &hits {
                    e[i] += &w;
                    for &j in &hits {
                        if i < j {
                            ee[i][j] += &w;
                        }
                    }
                }
            }
            for i in 1..=n {
                assert_eq!(
                    e[i],
                    theoretical::exceedance_mean(n, &theta, i),
                    "mean n={n} i={i} theta={theta}"
                );
                let var = &e[i] - &e[i] * &e[i];
                assert_eq!(
                    var,
                    theoretical::exceedance_var(n, &theta, i),
                    "var n={n} i={i} theta={theta}"
                );
                for j in i + 1..=n {
                    let cov = &ee[i][j] - &e[i] * &e[j];
                    assert_eq!(
                        cov,
                        theoretical::exceedance_cov(n, &theta, i, j),
                        "cov n={n} i={i} j={j} theta={theta}"
                    );
                }
            }
        }
    }
}

#[test]
fn exceedance_indicator_mean_spot_check() {
    // N=5, theta=1, i=3: (N-i+theta)/(N+theta-1) = 3/5.
    assert_eq!(theoretical::exceedance_mean(5, &rat_int(1), 3), rat(3, 5));
}

/// Adaptive Simpson quadrature, used as an independent numerical oracle
/// for the closed-form covariance kernel.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, left, tol / 2.0, depth - 1) + rec(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, simpson(f, a, b), tol, 40)
}

/// The kernel via quadrature: single integral of `t(1-t)` up to `min`,
/// minus the double integral of `min(t,u)(1-max(t,u))` over the box. The
/// double integral is split along the diagonal so each outer integrand is
/// smooth except at one known kink, which gets its own panel.
fn kernel_by_quadrature(x: f64, y: f64) -> f64 {
    let single = adaptive_simpson(&|t| t * (1.0 - t), 0.0, x.min(y), 1e-13);
    // Region t <= u: inner integral over t in [0, min(u,x)] of t gives
    // min(u,x)^2/2, times (1-u).
    let part1 = |u: f64| u.min(x).powi(2) / 2.0 * (1.0 - u);
    // Region u < t: symmetric.
    let part2 = |t: f64| t.min(y).powi(2) / 2.0 * (1.0 - t);
    let split = |f: &dyn Fn(f64) -> f64, hi: f64, kink: f64| -> f64 {
        if kink < hi {
            adaptive_simpson(f, 0.0, kink, 1e-13) + adaptive_simpson(f, kink, hi, 1e-13)
        } else {
            adaptive_simpson(f, 0.0, hi, 1e-13)
        }
    };
    let double = split(&part1, y, x) + split(&part2, x, y);
    single - double
}

#[test]
fn covariance_kernel_matches_quadrature() {
    for xi in 1..=5 {
        for yi in 1..=5 {
            let (x, y) = (xi as f64 / 5.0, yi as f64 / 5.0);
            let exact = theoretical::exceedance_covariance_kernel_f64(x, y);
            let quad = kernel_by_quadrature(x, y);
            assert!(
                (exact - quad).abs() < 1e-10,
                "x={x} y={y} exact={exact} quad={quad}"
            );
        }
    }
    // Frozen corner value: 1/6 - 1/12.
    assert_eq!(
        theoretical::exceedance_covariance_kernel(&rat_int(1), &rat_int(1)),
        rat(1, 12)
    );
}

/// The exact mean of the p-cycle count over a small group matches the
/// enumeration; the limit parameter is the reference point.
#[test]
fn cycle_count_mean_small_group() {
    let theta = EwensParam::from_ratio(1, 1).unwrap();
    let mut mean = Rat::zero();
    for (sigma, w) in enumerate_ewens(5, &theta).unwrap() {
        mean += w * rat_int(gamma_p(&sigma, 2) as i64);
    }
    assert_eq!(mean, rat(1, 2));
    assert_eq!(
        theoretical::poisson_cycles_lambda(&rat_int(1), 2),
        rat(1, 2)
    );
}
