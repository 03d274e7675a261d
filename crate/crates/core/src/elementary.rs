//! Joint moments and cumulants of the elementary events `sigma(i) = s`
//! under the Ewens measure, numeric at a fixed size or symbolic in the
//! size, together with the decay-exponent check.
//!
//! The exact joint moment of a family of elementary events is
//! `theta^c / ((N+theta-1)(N+theta-2)...(N+theta-r))`, where `r` is the
//! number of distinct source/target pairs and `c` the number of closed
//! orbits of the induced partial permutation; families pairing one source
//! with two targets (or vice versa) have moment zero. Cumulants of
//! products grouped by a set partition follow by Möbius inversion, and
//! their degree in the symbolic size is checked against the exponent
//! `-#Conn(G_eq) - #(Conn(G_share) v tau) + 1` computed from the two
//! collision graphs.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::graph::{collision_graphs, GraphError};
use crate::perm::PartialPermutation;
use crate::ratfun::{Degree, Poly, RatFun, RatFunError};
use crate::setpart::{cumulant_from_moments, PartitionError, SetPartition};
use crate::{rat_int, Rat};

/// Cumulants with more than this many grouped arguments are rejected.
pub const MAX_GROUPS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum ElementaryError {
    /// An index or target is outside `1..=N`.
    EntryOutOfRange { value: usize, n: usize },
    /// `theta` must be positive.
    ThetaNotPositive,
    /// Lists of unequal length or empty.
    BadLists,
    /// Grouping partition does not live on `{1..r}`.
    BadGrouping,
    /// Too many grouped arguments.
    TooManyGroups(usize),
    Partition(PartitionError),
    RatFun(RatFunError),
    Graph(GraphError),
}

impl fmt::Display for ElementaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryError::EntryOutOfRange { value, n } => {
                write!(f, "entry {value} outside 1..={n}")
            }
            ElementaryError::ThetaNotPositive => write!(f, "theta must be positive"),
            ElementaryError::BadLists => write!(f, "index lists must be nonempty and paired"),
            ElementaryError::BadGrouping => write!(f, "grouping partition must live on {{1..r}}"),
            ElementaryError::TooManyGroups(l) => {
                write!(f, "cumulant over {l} groups exceeds {MAX_GROUPS}")
            }
            ElementaryError::Partition(e) => write!(f, "{e}"),
            ElementaryError::RatFun(e) => write!(f, "{e}"),
            ElementaryError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl From<PartitionError> for ElementaryError {
    fn from(e: PartitionError) -> Self {
        ElementaryError::Partition(e)
    }
}

impl From<RatFunError> for ElementaryError {
    fn from(e: RatFunError) -> Self {
        ElementaryError::RatFun(e)
    }
}

impl From<GraphError> for ElementaryError {
    fn from(e: GraphError) -> Self {
        ElementaryError::Graph(e)
    }
}

/// A family of elementary events `sigma(i_j) = s_j` for `j = 1..r`,
/// grouped into cumulant arguments by a set partition of `{1..r}`.
/// Repeated values are allowed and meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementarySpec {
    i: Vec<usize>,
    s: Vec<usize>,
    tau: SetPartition,
}

impl ElementarySpec {
    pub fn new(i: Vec<usize>, s: Vec<usize>, tau: SetPartition) -> Result<Self, ElementaryError> {
        if i.is_empty() || i.len() != s.len() {
            return Err(ElementaryError::BadLists);
        }
        if i.iter().chain(s.iter()).any(|&v| v == 0) {
            return Err(ElementaryError::EntryOutOfRange { value: 0, n: 0 });
        }
        if tau.ground_size() != i.len() {
            return Err(ElementaryError::BadGrouping);
        }
        Ok(ElementarySpec { i, s, tau })
    }

    /// All events in one group: the cumulant reduces to a plain moment.
    pub fn ungrouped(i: Vec<usize>, s: Vec<usize>) -> Result<Self, ElementaryError> {
        let r = i.len();
        if r == 0 {
            return Err(ElementaryError::BadLists);
        }
        ElementarySpec::new(i, s, SetPartition::singletons(r))
    }

    pub fn sources(&self) -> &[usize] {
        &self.i
    }

    pub fn targets(&self) -> &[usize] {
        &self.s
    }

    pub fn grouping(&self) -> &SetPartition {
        &self.tau
    }

    pub fn len(&self) -> usize {
        self.i.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_theta(theta: &Rat) -> Result<(), ElementaryError> {
    if theta.is_positive() {
        Ok(())
    } else {
        Err(ElementaryError::ThetaNotPositive)
    }
}

/// Deduplicated pair list, or `None` when two pairs contradict (one source
/// with two targets, or one target with two sources), which forces the
/// product of indicators to vanish.
fn dedup_pairs(i: &[usize], s: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(i.len());
    for (&a, &b) in i.iter().zip(s.iter()) {
        if !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    for (k, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[k + 1..] {
            if (a == c) != (b == d) {
                return None;
            }
        }
    }
    Some(pairs)
}

fn pair_cycles(pairs: &[(usize, usize)]) -> usize {
    let sources: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let targets: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    PartialPermutation::new(sources, targets)
        .expect("deduplicated pairs form a partial permutation")
        .cycle_count()
}

/// Exact expectation of the product of elementary events at size `n`.
pub fn joint_moment(
    i: &[usize],
    s: &[usize],
    theta: &Rat,
    n: usize,
) -> Result<Rat, ElementaryError> {
    check_theta(theta)?;
    if i.is_empty() || i.len() != s.len() {
        return Err(ElementaryError::BadLists);
    }
    for &v in i.iter().chain(s.iter()) {
        if v == 0 || v > n {
            return Err(ElementaryError::EntryOutOfRange { value: v, n });
        }
    }
    let Some(pairs) = dedup_pairs(i, s) else {
        return Ok(Rat::zero());
    };
    let cycles = pair_cycles(&pairs);
    let mut num = Rat::one();
    for _ in 0..cycles {
        num *= theta;
    }
    let mut den = Rat::one();
    for k in 1..=pairs.len() {
        den *= rat_int(n as i64) + theta - rat_int(k as i64);
    }
    Ok(num / den)
}

/// Expectation of the product of elementary events with the size left
/// symbolic; evaluating at any integer `n` at least the largest entry
/// agrees with [`joint_moment`].
pub fn joint_moment_symbolic(
    i: &[usize],
    s: &[usize],
    theta: &Rat,
) -> Result<RatFun, ElementaryError> {
    check_theta(theta)?;
    if i.is_empty() || i.len() != s.len() {
        return Err(ElementaryError::BadLists);
    }
    let Some(pairs) = dedup_pairs(i, s) else {
        return Ok(RatFun::zero());
    };
    let cycles = pair_cycles(&pairs);
    let mut num = Rat::one();
    for _ in 0..cycles {
        num *= theta;
    }
    let mut den = Poly::one();
    for k in 1..=pairs.len() {
        den = &den * &Poly::linear(theta - rat_int(k as i64), Rat::one());
    }
    Ok(RatFun::new(Poly::constant(num), den)?)
}

fn merged_lists(spec: &ElementarySpec, block_ids: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let blocks = spec.grouping().blocks();
    let mut i = Vec::new();
    let mut s = Vec::new();
    for &b in block_ids {
        for &j in &blocks[b - 1] {
            i.push(spec.sources()[j - 1]);
            s.push(spec.targets()[j - 1]);
        }
    }
    (i, s)
}

fn check_groups(spec: &ElementarySpec) -> Result<usize, ElementaryError> {
    let ell = spec.grouping().num_blocks();
    if ell > MAX_GROUPS {
        return Err(ElementaryError::TooManyGroups(ell));
    }
    Ok(ell)
}

/// Exact joint cumulant of the grouped products at size `n`.
pub fn joint_cumulant(
    spec: &ElementarySpec,
    theta: &Rat,
    n: usize,
) -> Result<Rat, ElementaryError> {
    check_theta(theta)?;
    for &v in spec.sources().iter().chain(spec.targets().iter()) {
        if v > n {
            return Err(ElementaryError::EntryOutOfRange { value: v, n });
        }
    }
    let ell = check_groups(spec)?;
    let moment = |delta: &[usize]| -> Rat {
        let (i, s) = merged_lists(spec, delta);
        joint_moment(&i, &s, theta, n).expect("entries validated")
    };
    Ok(cumulant_from_moments(&moment, ell)?)
}

/// Joint cumulant of the grouped products with the size symbolic.
pub fn joint_cumulant_symbolic(
    spec: &ElementarySpec,
    theta: &Rat,
) -> Result<RatFun, ElementaryError> {
    check_theta(theta)?;
    let ell = check_groups(spec)?;
    let moment = |delta: &[usize]| -> RatFun {
        let (i, s) = merged_lists(spec, delta);
        joint_moment_symbolic(&i, &s, theta).expect("entries validated")
    };
    Ok(cumulant_from_moments(&moment, ell)?)
}

/// The decay exponent `-#Conn(G_eq) - #(Conn(G_share) v tau) + 1` from the
/// two collision graphs of the spec.
pub fn decay_exponent(spec: &ElementarySpec) -> Result<i64, ElementaryError> {
    let (g_eq, g_share) = collision_graphs(spec.sources(), spec.targets())?;
    let eq_components = g_eq.num_components() as i64;
    let share_join = g_share
        .connected_components()
        .join(spec.grouping())?
        .num_blocks() as i64;
    Ok(-eq_components - share_join + 1)
}

/// Outcome of the degree check: the symbolic cumulant, its exact degree,
/// the decay exponent and whether `degree <= exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub cumulant: RatFun,
    pub degree: Degree,
    pub bound: i64,
    pub holds: bool,
}

/// Computes the symbolic cumulant and checks its degree against the decay
/// exponent. The check is expected to hold for every spec; a `false` means
/// an implementation bug.
pub fn verify_decay_bound(
    spec: &ElementarySpec,
    theta: &Rat,
) -> Result<DecayReport, ElementaryError> {
    let cumulant = joint_cumulant_symbolic(spec, theta)?;
    let degree = cumulant.degree();
    let bound = decay_exponent(spec)?;
    Ok(DecayReport {
        holds: degree <= Degree::Finite(bound),
        cumulant,
        degree,
        bound,
    })
}
