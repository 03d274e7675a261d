//! Exhaustive-enumeration oracles for the joint moments and cumulants of
//! elementary events, and the cumulant decay degree check.

use ewens_core::elementary::{
    decay_exponent, joint_cumulant, joint_cumulant_symbolic, joint_moment,
    joint_moment_symbolic, verify_decay_bound, ElementarySpec,
};
use ewens_core::ewens::{enumerate_ewens, EwensParam};
use ewens_core::setpart::{all_partitions, SetPartition};
use ewens_core::{rat, rat_int, Rat};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn thetas() -> Vec<Rat> {
    vec![rat(1, 2), rat(1, 1), rat(2, 1)]
}

/// Brute-force expectation of the indicator product over the full group.
fn moment_by_enumeration(i: &[usize], s: &[usize], theta: &Rat, n: usize) -> Rat {
    let param = EwensParam::new(theta.clone()).unwrap();
    let mut acc = Rat::zero();
    for (sigma, w) in enumerate_ewens(n, &param).unwrap() {
        if i.iter().zip(s).all(|(&a, &b)| sigma.image(a) == b) {
            acc += w;
        }
    }
    acc
}

/// Oracle equality for all pair lists with entries in a small box. The
/// full sweep to r = 3 over six symbols runs in the acceptance suite;
/// this covers r <= 2 exhaustively at N = 4, 5 plus r = 3 spot checks.
#[test]
fn moment_matches_enumeration_r2() {
    for theta in thetas() {
        for n in [4usize, 5] {
            for a in 1..=n {
                for b in 1..=n {
                    let m = joint_moment(&[a], &[b], &theta, n).unwrap();
                    assert_eq!(m, moment_by_enumeration(&[a], &[b], &theta, n));
                    for c in 1..=n {
                        for d in 1..=n {
                            let m = joint_moment(&[a, c], &[b, d], &theta, n).unwrap();
                            assert_eq!(
                                m,
                                moment_by_enumeration(&[a, c], &[b, d], &theta, n),
                                "i=({a},{c}) s=({b},{d}) theta={theta} n={n}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn moment_matches_enumeration_r3_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for theta in thetas() {
        for _ in 0..60 {
            let n = rng.gen_range(3..=6);
            let i: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=n)).collect();
            let s: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=n)).collect();
            let m = joint_moment(&i, &s, &theta, n).unwrap();
            assert_eq!(
                m,
                moment_by_enumeration(&i, &s, &theta, n),
                "i={i:?} s={s:?} theta={theta} n={n}"
            );
        }
    }
}

#[test]
fn cumulant_split_pair_matches_enumeration() {
    // kappa(B_{1,3->2,4}) as a symbolic function, evaluated against the
    // enumeration cumulant E[XY] - E[X]E[Y] at each size.
    let theta = rat(1, 1);
    let spec = ElementarySpec::ungrouped(vec![1, 3], vec![2, 4]).unwrap();
    let symbolic = joint_cumulant_symbolic(&spec, &theta).unwrap();
    for n in 4..=8 {
        let joint = moment_by_enumeration(&[1, 3], &[2, 4], &theta, n);
        let m1 = moment_by_enumeration(&[1], &[2], &theta, n);
        let m2 = moment_by_enumeration(&[3], &[4], &theta, n);
        let expected = joint - m1 * m2;
        assert_eq!(symbolic.eval(&rat_int(n as i64)).unwrap(), expected);
        assert_eq!(joint_cumulant(&spec, &theta, n as usize).unwrap(), expected);
    }
}

#[test]
fn symbolic_and_numeric_cumulants_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let taus3: Vec<SetPartition> = all_partitions(3).unwrap().collect();
    for theta in thetas() {
        for _ in 0..40 {
            let i: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=5)).collect();
            let s: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=5)).collect();
            let tau = taus3[rng.gen_range(0..taus3.len())].clone();
            let spec = ElementarySpec::new(i, s, tau).unwrap();
            let symbolic = joint_cumulant_symbolic(&spec, &theta).unwrap();
            for n in [6usize, 9, 13] {
                assert_eq!(
                    symbolic.eval(&rat_int(n as i64)).unwrap(),
                    joint_cumulant(&spec, &theta, n).unwrap()
                );
            }
        }
    }
}

/// Relabeling the event indices (and transporting the grouping) leaves the
/// cumulant unchanged: the cumulant is symmetric in its arguments.
#[test]
fn cumulant_invariant_under_index_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let theta = rat(2, 1);
    for _ in 0..30 {
        let r = 4usize;
        let i: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        let s: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        let labels: Vec<usize> = (0..r).map(|_| rng.gen_range(0..2)).collect();
        let blocks = {
            let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for (k, &l) in labels.iter().enumerate() {
                blocks.entry(l).or_default().push(k + 1);
            }
            blocks.into_values().collect::<Vec<_>>()
        };
        let tau = SetPartition::from_blocks(r, &blocks).unwrap();
        let spec = ElementarySpec::new(i.clone(), s.clone(), tau).unwrap();

        // Rotate the indices: j -> j+1 mod r.
        let rho: Vec<usize> = (0..r).map(|j| (j + 1) % r).collect();
        let i2: Vec<usize> = rho.iter().map(|&j| i[j]).collect();
        let s2: Vec<usize> = rho.iter().map(|&j| s[j]).collect();
        let blocks2: Vec<Vec<usize>> = {
            // Element k of the new spec corresponds to rho[k] of the old.
            let mut inv = vec![0usize; r];
            for (k, &j) in rho.iter().enumerate() {
                inv[j] = k;
            }
            let mut blocks2: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for (k, &l) in labels.iter().enumerate() {
                blocks2.entry(l).or_default().push(inv[k] + 1);
            }
            blocks2
                .into_values()
                .map(|mut b| {
                    b.sort_unstable();
                    b
                })
                .collect()
        };
        let tau2 = SetPartition::from_blocks(r, &blocks2).unwrap();
        let spec2 = ElementarySpec::new(i2, s2, tau2).unwrap();
        assert_eq!(
            joint_cumulant_symbolic(&spec, &theta).unwrap(),
            joint_cumulant_symbolic(&spec2, &theta).unwrap()
        );
    }
}

/// Feeding the Möbius engine an exactly factorizing functional makes every
/// cumulant that mixes the two factors vanish identically: a sanity check
/// of the engine itself (the true events are only asymptotically
/// independent, so this exercises the algebra, not the model).
#[test]
fn engine_vanishes_on_factorizing_functionals() {
    use ewens_core::ratfun::RatFun;
    use ewens_core::setpart::cumulant_from_moments;
    let theta = rat(1, 1);
    // Two symbol-disjoint groups of event pairs.
    let group_a: (Vec<usize>, Vec<usize>) = (vec![1, 2], vec![2, 1]);
    let group_b: (Vec<usize>, Vec<usize>) = (vec![3, 4], vec![4, 3]);
    // Arguments 1..=ell_a read group A events, the rest group B; the
    // functional factorizes across the groups by construction.
    for (ell_a, ell_b) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2)] {
        let ell = ell_a + ell_b;
        let moment = |delta: &[usize]| -> RatFun {
            let pick = |events: &[usize], lists: &(Vec<usize>, Vec<usize>)| {
                if events.is_empty() {
                    return RatFun::one();
                }
                let i: Vec<usize> = events.iter().map(|&e| lists.0[e]).collect();
                let s: Vec<usize> = events.iter().map(|&e| lists.1[e]).collect();
                joint_moment_symbolic(&i, &s, &theta).unwrap()
            };
            let a_events: Vec<usize> = delta
                .iter()
                .filter(|&&j| j <= ell_a)
                .map(|&j| j - 1)
                .collect();
            let b_events: Vec<usize> = delta
                .iter()
                .filter(|&&j| j > ell_a)
                .map(|&j| j - 1 - ell_a)
                .collect();
            pick(&a_events, &group_a) * pick(&b_events, &group_b)
        };
        let k: RatFun = cumulant_from_moments(&moment, ell).unwrap();
        assert!(k.is_zero(), "split ({ell_a},{ell_b}): {k}");
    }
}

#[test]
fn decay_bound_exhaustive_r2() {
    // Every collision pattern of two pairs is realized over four symbols.
    for theta in thetas() {
        for tau in all_partitions(2).unwrap() {
            for i1 in 1..=4 {
                for s1 in 1..=4 {
                    for i2 in 1..=4 {
                        for s2 in 1..=4 {
                            let spec = ElementarySpec::new(
                                vec![i1, i2],
                                vec![s1, s2],
                                tau.clone(),
                            )
                            .unwrap();
                            let report = verify_decay_bound(&spec, &theta).unwrap();
                            assert!(
                                report.holds,
                                "i=({i1},{i2}) s=({s1},{s2}) tau={tau} theta={theta}: \
                                 degree {:?} > bound {}",
                                report.degree, report.bound
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn decay_bound_random_r4() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let taus: Vec<SetPartition> = all_partitions(4).unwrap().collect();
    let theta = rat(2, 1);
    for trial in 0..60 {
        let i: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=8)).collect();
        let s: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=8)).collect();
        let tau = taus[rng.gen_range(0..taus.len())].clone();
        let spec = ElementarySpec::new(i.clone(), s.clone(), tau.clone()).unwrap();
        let report = verify_decay_bound(&spec, &theta).unwrap();
        assert!(report.holds, "trial {trial} i={i:?} s={s:?} tau={tau}");
    }
}

#[test]
fn decay_exponent_examples() {
    let spec = ElementarySpec::ungrouped(vec![5, 2, 2, 7, 7], vec![8, 8, 2, 7, 7]).unwrap();
    assert_eq!(decay_exponent(&spec).unwrap(), -5);
    let theta = rat(1, 1);
    let report = verify_decay_bound(&spec, &theta).unwrap();
    assert!(report.holds);
}
