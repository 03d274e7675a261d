//! Permutation statistics and their closed-form limits: cycle counts,
//! weak exceedances and the running exceedance function, adjacencies,
//! dashed (vincular) and bivincular patterns, and the general local
//! statistics that subsume them all.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::perm::Permutation;
use crate::{rat_int, Rat};

/// Pattern arity guard: counting is brute force over position tuples.
pub const MAX_PATTERN_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum StatError {
    /// Argument of the exceedance function outside `[0, 1]`.
    XOutOfRange(f64),
    /// Pattern or local statistic of arity above the guard.
    ArityTooLarge(usize),
    /// `X` or `Y` adjacency set not contained in `{1, ..., p-1}`.
    BadAdjacencySet(usize),
    /// A constraint references an index outside `{1, ..., p}`.
    BadConstraintIndex(usize),
    /// Empty pattern.
    Empty,
}

impl fmt::Display for StatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatError::XOutOfRange(x) => write!(f, "x = {x} outside [0, 1]"),
            StatError::ArityTooLarge(p) => {
                write!(f, "arity {p} exceeds {MAX_PATTERN_SIZE}")
            }
            StatError::BadAdjacencySet(v) => write!(f, "adjacency index {v} out of range"),
            StatError::BadConstraintIndex(j) => write!(f, "constraint index {j} out of range"),
            StatError::Empty => write!(f, "empty pattern"),
        }
    }
}

/// Number of cycles of length `p`.
pub fn gamma_p(sigma: &Permutation, p: usize) -> usize {
    let (_, by_len) = sigma.cycle_stats();
    by_len.get(&p).copied().unwrap_or(0)
}

/// Number of weak exceedances: positions `i` with `sigma(i) >= i`.
pub fn exceedance_count(sigma: &Permutation) -> usize {
    (1..=sigma.size()).filter(|&i| sigma.image(i) >= i).count()
}

/// Weak exceedances among the first `m` positions.
pub fn exceedance_prefix(sigma: &Permutation, m: usize) -> usize {
    (1..=m).filter(|&i| sigma.image(i) >= i).count()
}

/// The running exceedance function: at `x = m/N` it is the number of weak
/// exceedances among the first `m` positions divided by `N`, extended
/// linearly between grid points. Nondecreasing in `x`.
pub fn f_function(sigma: &Permutation, x: f64) -> Result<f64, StatError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(StatError::XOutOfRange(x));
    }
    let n = sigma.size();
    let t = x * n as f64;
    let i = (t as usize).min(n);
    let lo = exceedance_prefix(sigma, i);
    if i == n {
        return Ok(lo as f64 / n as f64);
    }
    let hi = lo + usize::from(sigma.image(i + 1) >= i + 1);
    let frac = t - i as f64;
    Ok((lo as f64 + frac * (hi - lo) as f64) / n as f64)
}

/// Number of adjacencies: positions `i < N` with `sigma(i+1) = sigma(i) +- 1`.
pub fn adjacency_count(sigma: &Permutation) -> usize {
    let n = sigma.size();
    (1..n)
        .filter(|&i| sigma.image(i).abs_diff(sigma.image(i + 1)) == 1)
        .count()
}

/// A dashed (vincular) pattern: a pattern permutation together with the
/// set of positions that must be adjacent in an occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DashedPattern {
    tau: Permutation,
    x: BTreeSet<usize>,
}

impl DashedPattern {
    pub fn new(tau: Permutation, x: BTreeSet<usize>) -> Result<Self, StatError> {
        let p = tau.size();
        if p == 0 {
            return Err(StatError::Empty);
        }
        if p > MAX_PATTERN_SIZE {
            return Err(StatError::ArityTooLarge(p));
        }
        if let Some(&v) = x.iter().find(|&&v| v == 0 || v >= p) {
            return Err(StatError::BadAdjacencySet(v));
        }
        Ok(DashedPattern { tau, x })
    }

    pub fn from_word(tau: Vec<usize>, x: &[usize]) -> Result<Self, StatError> {
        let tau = Permutation::from_one_line(tau).map_err(|_| StatError::Empty)?;
        DashedPattern::new(tau, x.iter().copied().collect())
    }

    pub fn pattern(&self) -> &Permutation {
        &self.tau
    }

    pub fn adjacent_positions(&self) -> &BTreeSet<usize> {
        &self.x
    }

    pub fn size(&self) -> usize {
        self.tau.size()
    }

    /// `q`, the number of forced adjacencies.
    pub fn num_adjacencies(&self) -> usize {
        self.x.len()
    }
}

/// A bivincular pattern adds value-adjacency constraints: for `y` in `Y`,
/// the `y`-th and `(y+1)`-th smallest selected values must be consecutive
/// integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivincularPattern {
    base: DashedPattern,
    y: BTreeSet<usize>,
}

impl BivincularPattern {
    pub fn new(
        tau: Permutation,
        x: BTreeSet<usize>,
        y: BTreeSet<usize>,
    ) -> Result<Self, StatError> {
        let base = DashedPattern::new(tau, x)?;
        if let Some(&v) = y.iter().find(|&&v| v == 0 || v >= base.size()) {
            return Err(StatError::BadAdjacencySet(v));
        }
        Ok(BivincularPattern { base, y })
    }

    pub fn from_words(tau: Vec<usize>, x: &[usize], y: &[usize]) -> Result<Self, StatError> {
        let tau = Permutation::from_one_line(tau).map_err(|_| StatError::Empty)?;
        BivincularPattern::new(
            tau,
            x.iter().copied().collect(),
            y.iter().copied().collect(),
        )
    }

    pub fn dashed(&self) -> &DashedPattern {
        &self.base
    }

    pub fn adjacent_values(&self) -> &BTreeSet<usize> {
        &self.y
    }
}

/// Counts occurrences of a dashed pattern: position tuples
/// `i_1 < ... < i_p`, consecutive at the forced positions, whose values
/// appear in the same relative order as the pattern.
pub fn count_dashed(sigma: &Permutation, pattern: &DashedPattern) -> u64 {
    count_pattern(sigma, pattern, None)
}

/// Counts occurrences of a bivincular pattern; with no value adjacencies
/// this is exactly [`count_dashed`].
pub fn count_bivincular(sigma: &Permutation, pattern: &BivincularPattern) -> u64 {
    count_pattern(sigma, &pattern.base, Some(&pattern.y))
}

fn count_pattern(
    sigma: &Permutation,
    pattern: &DashedPattern,
    value_adjacent: Option<&BTreeSet<usize>>,
) -> u64 {
    let p = pattern.size();
    if p > sigma.size() {
        return 0;
    }
    let mut positions = alloc::vec![0usize; p];
    let mut count = 0u64;
    pattern_dfs(
        sigma,
        pattern.pattern(),
        &pattern.x,
        value_adjacent,
        &mut positions,
        0,
        &mut count,
    );
    count
}

/// Depth-first over position tuples; the value-order check runs
/// incrementally so contradictory prefixes prune early.
fn pattern_dfs(
    sigma: &Permutation,
    tau: &Permutation,
    x: &BTreeSet<usize>,
    value_adjacent: Option<&BTreeSet<usize>>,
    positions: &mut [usize],
    depth: usize,
    count: &mut u64,
) {
    let p = tau.size();
    let n = sigma.size();
    if depth == p {
        if let Some(y) = value_adjacent {
            let mut values: Vec<usize> = positions.iter().map(|&q| sigma.image(q)).collect();
            values.sort_unstable();
            for &v in y {
                if values[v] != values[v - 1] + 1 {
                    return;
                }
            }
        }
        *count += 1;
        return;
    }
    let (lo, hi) = if depth == 0 {
        (1, n)
    } else if x.contains(&depth) {
        (positions[depth - 1] + 1, positions[depth - 1] + 1)
    } else {
        (positions[depth - 1] + 1, n)
    };
    'cand: for q in lo..=hi.min(n) {
        let v = sigma.image(q);
        for d in 0..depth {
            let want = tau.image(d + 1) < tau.image(depth + 1);
            let got = sigma.image(positions[d]) < v;
            if want != got {
                continue 'cand;
            }
        }
        positions[depth] = q;
        pattern_dfs(sigma, tau, x, value_adjacent, positions, depth + 1, count);
    }
}

/// Which list a constraint expression reads from: positions or values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Position,
    Value,
}

/// An expression `i_j + d` or `s_j + d` with `j` 1-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expr {
    pub var: Var,
    pub j: usize,
    pub d: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: Expr,
    pub rel: Rel,
    pub rhs: Expr,
}

/// A local statistic of arity `p`: the number of lists `i_1..i_p` (with
/// `s_j = sigma(i_j)`) satisfying every constraint. Tuples are not
/// required to be increasing or distinct; the constraints carry all the
/// structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalStatistic {
    p: usize,
    constraints: Vec<Constraint>,
}

impl LocalStatistic {
    pub fn new(p: usize, constraints: Vec<Constraint>) -> Result<Self, StatError> {
        if p == 0 {
            return Err(StatError::Empty);
        }
        if p > MAX_PATTERN_SIZE {
            return Err(StatError::ArityTooLarge(p));
        }
        for c in &constraints {
            for e in [&c.lhs, &c.rhs] {
                if e.j == 0 || e.j > p {
                    return Err(StatError::BadConstraintIndex(e.j));
                }
            }
        }
        Ok(LocalStatistic { p, constraints })
    }

    pub fn arity(&self) -> usize {
        self.p
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
}

/// Counts assignments satisfying a local statistic, checking each
/// constraint as soon as all indices it references are bound.
pub fn count_local(sigma: &Permutation, stat: &LocalStatistic) -> u64 {
    let p = stat.arity();
    let mut by_depth: Vec<Vec<&Constraint>> = alloc::vec![Vec::new(); p + 1];
    for c in stat.constraints() {
        by_depth[c.lhs.j.max(c.rhs.j)].push(c);
    }
    let mut pos = alloc::vec![0usize; p];
    let mut count = 0u64;
    local_dfs(sigma, &by_depth, &mut pos, 0, &mut count);
    count
}

fn local_eval(e: &Expr, sigma: &Permutation, pos: &[usize]) -> i64 {
    let base = match e.var {
        Var::Position => pos[e.j - 1],
        Var::Value => sigma.image(pos[e.j - 1]),
    };
    base as i64 + e.d
}

fn local_dfs(
    sigma: &Permutation,
    by_depth: &[Vec<&Constraint>],
    pos: &mut [usize],
    depth: usize,
    count: &mut u64,
) {
    let p = pos.len();
    if depth == p {
        *count += 1;
        return;
    }
    'cand: for q in 1..=sigma.size() {
        pos[depth] = q;
        for c in &by_depth[depth + 1] {
            if !c.rel.holds(
                local_eval(&c.lhs, sigma, pos),
                local_eval(&c.rhs, sigma, pos),
            ) {
                continue 'cand;
            }
        }
        local_dfs(sigma, by_depth, pos, depth + 1, count);
    }
}

/// Closed-form limits and exact finite-size moments.
pub mod theoretical {
    use super::*;

    /// Limit parameter of the Poisson law of the number of `p`-cycles.
    pub fn poisson_cycles_lambda(theta: &Rat, p: usize) -> Rat {
        theta / rat_int(p as i64)
    }

    /// Limit Poisson parameter of the adjacency count.
    pub fn adjacency_lambda() -> Rat {
        rat_int(2)
    }

    /// Almost-sure limit of the exceedance function: `(1 - (1-x)^2)/2`.
    pub fn f_limit(x: f64) -> f64 {
        (1.0 - (1.0 - x) * (1.0 - x)) / 2.0
    }

    pub fn f_limit_exact(x: &Rat) -> Rat {
        let one = Rat::one();
        let u = &one - x;
        (&one - &u * &u) / rat_int(2)
    }

    /// Limiting covariance kernel of the rescaled exceedance fluctuations:
    /// with `a = min(x,y)` and `b = max(x,y)`,
    /// `K(x,y) = a^2/2 - a^3/6 - a^2 b/2 + a^2 b^2/4`.
    pub fn exceedance_covariance_kernel(x: &Rat, y: &Rat) -> Rat {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let a2 = a * a;
        let a3 = &a2 * a;
        &a2 / rat_int(2) - &a3 / rat_int(6) - &a2 * b / rat_int(2) + &a2 * b * b / rat_int(4)
    }

    pub fn exceedance_covariance_kernel_f64(x: f64, y: f64) -> f64 {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        a * a / 2.0 - a * a * a / 6.0 - a * a * b / 2.0 + a * a * b * b / 4.0
    }

    /// Exact mean of the weak-exceedance indicator at position `i`:
    /// `(N - i + theta)/(N + theta - 1)`.
    pub fn exceedance_mean(n: usize, theta: &Rat, i: usize) -> Rat {
        let nn = rat_int(n as i64);
        (&nn - rat_int(i as i64) + theta) / (&nn + theta - Rat::one())
    }

    /// Exact variance of the weak-exceedance indicator:
    /// `(i-1)(N-i+theta)/(N+theta-1)^2`.
    pub fn exceedance_var(n: usize, theta: &Rat, i: usize) -> Rat {
        let nn = rat_int(n as i64);
        let den = &nn + theta - Rat::one();
        rat_int(i as i64 - 1) * (&nn - rat_int(i as i64) + theta) / (&den * &den)
    }

    /// Exact covariance of the indicators at positions `i < j`:
    /// `-(N-j+theta)(i-1)/((N+theta-1)^2 (N+theta-2))`.
    pub fn exceedance_cov(n: usize, theta: &Rat, i: usize, j: usize) -> Rat {
        assert!(i < j, "covariance formula requires i < j");
        let nn = rat_int(n as i64);
        let den1 = &nn + theta - Rat::one();
        let den2 = &nn + theta - rat_int(2);
        -((&nn - rat_int(j as i64) + theta) * rat_int(i as i64 - 1)) / (&den1 * &den1 * den2)
    }

    /// Exact mean of the exceedance function at `x = m/N`.
    pub fn f_mean_exact(n: usize, theta: &Rat, m: usize) -> Rat {
        let mut acc = Rat::zero();
        for i in 1..=m {
            acc += exceedance_mean(n, theta, i);
        }
        acc / rat_int(n as i64)
    }

    /// Almost-sure limit of `O/N^(p-q)` for a dashed pattern of size `p`
    /// with `q` forced adjacencies: `1/(p! (p-q)!)`.
    pub fn dashed_mean_limit(p: usize, q: usize) -> Rat {
        Rat::one() / rat_int(factorial(p) * factorial(p - q))
    }

    pub(crate) fn factorial(k: usize) -> i64 {
        (1..=k as i64).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn perm(w: &[usize]) -> Permutation {
        Permutation::from_one_line(w.to_vec()).unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_p(&Permutation::identity(4), 1), 4);
        assert_eq!(gamma_p(&perm(&[2, 1, 4, 3]), 2), 2);
        assert_eq!(gamma_p(&perm(&[2, 1, 4, 3]), 1), 0);
    }

    #[test]
    fn exceedance_examples() {
        assert_eq!(exceedance_count(&Permutation::identity(5)), 5);
        assert_eq!(f_function(&Permutation::identity(5), 1.0).unwrap(), 1.0);
        let s = perm(&[2, 1]);
        assert_eq!(exceedance_count(&s), 1);
        assert_eq!(f_function(&s, 1.0).unwrap(), 0.5);
        assert!(f_function(&s, 1.5).is_err());
        assert!(f_function(&s, -0.1).is_err());
    }

    #[test]
    fn f_function_interpolates() {
        let s = perm(&[2, 1, 3]);
        // Prefix exceedance counts: S(1)=1, S(2)=1, S(3)=2.
        assert!((f_function(&s, 1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((f_function(&s, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let expect = 1.5 / 3.0;
        assert!((f_function(&s, 5.0 / 6.0).unwrap() - expect).abs() < 1e-12);
        assert_eq!(f_function(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn adjacency_examples() {
        assert_eq!(adjacency_count(&Permutation::identity(3)), 2);
        assert_eq!(adjacency_count(&perm(&[5, 4, 3, 2, 1])), 4);
        let total: usize = crate::perm::all_permutations(3)
            .unwrap()
            .map(|s| adjacency_count(&s))
            .sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn dashed_counts() {
        let inversions = DashedPattern::from_word(vec![2, 1], &[]).unwrap();
        assert_eq!(count_dashed(&perm(&[3, 2, 1]), &inversions), 3);
        let descents = DashedPattern::from_word(vec![2, 1], &[1]).unwrap();
        assert_eq!(count_dashed(&perm(&[3, 1, 2]), &descents), 1);
        let big = DashedPattern::from_word(vec![1, 2, 3, 4], &[]).unwrap();
        assert_eq!(count_dashed(&perm(&[2, 1]), &big), 0);
    }

    #[test]
    fn dashed_mean_over_s5() {
        // Total descents over S_5 is 5! * (N-1)/2 = 240.
        let descents = DashedPattern::from_word(vec![2, 1], &[1]).unwrap();
        let total: u64 = crate::perm::all_permutations(5)
            .unwrap()
            .map(|s| count_dashed(&s, &descents))
            .sum();
        assert_eq!(total, 240);
    }

    #[test]
    fn pattern_validation() {
        assert!(DashedPattern::from_word(vec![2, 1], &[2]).is_err());
        assert!(DashedPattern::from_word((1..=7).collect(), &[]).is_err());
        assert!(BivincularPattern::from_words(vec![1, 2], &[1], &[2]).is_err());
    }

    #[test]
    fn bivincular_identity_example() {
        let pat = BivincularPattern::from_words(vec![1, 2, 3], &[1], &[1]).unwrap();
        assert_eq!(count_bivincular(&Permutation::identity(3), &pat), 1);
    }

    #[test]
    fn bivincular_reduces_to_dashed() {
        let dashed = DashedPattern::from_word(vec![1, 3, 2], &[1]).unwrap();
        let biv = BivincularPattern::from_words(vec![1, 3, 2], &[1], &[]).unwrap();
        for s in crate::perm::all_permutations(5).unwrap() {
            assert_eq!(count_bivincular(&s, &biv), count_dashed(&s, &dashed));
        }
    }

    #[test]
    fn local_statistic_matches_exceedances() {
        let stat = LocalStatistic::new(
            1,
            vec![Constraint {
                lhs: Expr {
                    var: Var::Value,
                    j: 1,
                    d: 0,
                },
                rel: Rel::Ge,
                rhs: Expr {
                    var: Var::Position,
                    j: 1,
                    d: 0,
                },
            }],
        )
        .unwrap();
        for s in crate::perm::all_permutations(4).unwrap() {
            assert_eq!(count_local(&s, &stat), exceedance_count(&s) as u64);
        }
    }

    #[test]
    fn theoretical_values() {
        assert_eq!(theoretical::poisson_cycles_lambda(&rat(1, 1), 2), rat(1, 2));
        assert_eq!(theoretical::adjacency_lambda(), rat(2, 1));
        assert!((theoretical::f_limit(0.5) - 0.375).abs() < 1e-15);
        assert_eq!(theoretical::f_limit_exact(&rat(1, 2)), rat(3, 8));
        assert_eq!(
            theoretical::exceedance_covariance_kernel(&rat(1, 1), &rat(1, 1)),
            rat(1, 12)
        );
        assert_eq!(theoretical::dashed_mean_limit(2, 1), rat(1, 2));
        assert_eq!(theoretical::dashed_mean_limit(2, 0), rat(1, 4));
    }

    #[test]
    fn exceedance_indicator_mean_n5() {
        // At N=5, theta=1, position 3: (5-3+1)/5.
        assert_eq!(theoretical::exceedance_mean(5, &rat(1, 1), 3), rat(3, 5));
    }
}
