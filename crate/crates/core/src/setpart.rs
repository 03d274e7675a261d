//! The set-partition lattice and the moment/cumulant calculus built on it.
//!
//! Partitions of `{1, ..., n}` are ordered by refinement; the join is the
//! finest common coarsening and the meet the coarsest common refinement.
//! Only two Möbius evaluations are ever needed: partition-to-top, with
//! value `(-1)^(b-1) (b-1)!` for a partition in `b` blocks, and the boolean
//! lattice inversion behind the quasi-factorization quantities.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::dsu::Dsu;

/// Largest ground set for exhaustive partition enumeration (Bell(12) is
/// about 4.2 million).
pub const MAX_ENUM_GROUND: usize = 12;

/// Largest argument count for cumulant sums (Bell(10) = 115975 terms).
pub const MAX_CUMULANT_ARGS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    /// Ground-set size outside the supported range.
    GroundSetTooLarge(usize),
    /// Blocks do not form a partition of `{1, ..., n}`.
    NotAPartition,
    /// Two partitions live on different ground sets.
    GroundSetMismatch,
    /// Cumulant order outside the guard.
    TooManyArguments(usize),
    /// A moment required for quasi-factorization vanished; the offending
    /// subset is reported 1-indexed.
    ZeroMoment(Vec<usize>),
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::GroundSetTooLarge(n) => {
                write!(f, "ground set of size {n} outside 1..={MAX_ENUM_GROUND}")
            }
            PartitionError::NotAPartition => write!(f, "blocks do not partition the ground set"),
            PartitionError::GroundSetMismatch => write!(f, "partitions on different ground sets"),
            PartitionError::TooManyArguments(l) => {
                write!(f, "cumulant order {l} exceeds {MAX_CUMULANT_ARGS}")
            }
            PartitionError::ZeroMoment(s) => write!(f, "zero moment on subset {s:?}"),
        }
    }
}

/// A set partition of `{1, ..., n}` in canonical form.
///
/// Internally stored as a restricted-growth string: entry `k` is the block
/// index of element `k+1`, blocks numbered by first occurrence. This makes
/// equality, ordering and hashing canonical for free, and block lists come
/// out sorted by their minimum element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    rgs: Vec<usize>,
}

impl SetPartition {
    /// Builds a partition from its blocks, validating disjointness and
    /// coverage of `{1, ..., n}`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::NotAPartition);
        }
        let mut rgs = alloc::vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::NotAPartition);
            }
            for &x in block {
                if x == 0 || x > n || rgs[x - 1] != usize::MAX {
                    return Err(PartitionError::NotAPartition);
                }
                rgs[x - 1] = b;
            }
        }
        if rgs.iter().any(|&b| b == usize::MAX) {
            return Err(PartitionError::NotAPartition);
        }
        Ok(SetPartition::from_labels(&rgs))
    }

    /// Canonicalizes arbitrary block labels into a restricted-growth string.
    pub(crate) fn from_labels(labels: &[usize]) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut rgs = Vec::with_capacity(labels.len());
        for &l in labels {
            let id = match map.iter().find(|(k, _)| *k == l) {
                Some(&(_, v)) => v,
                None => {
                    let v = map.len();
                    map.push((l, v));
                    v
                }
            };
            rgs.push(id);
        }
        SetPartition { rgs }
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition {
            rgs: (0..n).collect(),
        }
    }

    pub fn top(n: usize) -> Self {
        SetPartition {
            rgs: alloc::vec![0; n],
        }
    }

    /// Ground-set size.
    pub fn ground_size(&self) -> usize {
        self.rgs.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// `rank = n - #blocks`.
    pub fn rank(&self) -> usize {
        self.ground_size() - self.num_blocks()
    }

    /// Block index (0-based, blocks ordered by minimum) of element `x`.
    pub fn block_of(&self, x: usize) -> usize {
        self.rgs[x - 1]
    }

    /// Blocks as sorted element lists, ordered by their minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.num_blocks()];
        for (k, &b) in self.rgs.iter().enumerate() {
            out[b].push(k + 1);
        }
        out
    }

    /// Refinement order: true when every block of `self` sits inside a
    /// block of `other`.
    pub fn refines(&self, other: &SetPartition) -> Result<bool, PartitionError> {
        if self.ground_size() != other.ground_size() {
            return Err(PartitionError::GroundSetMismatch);
        }
        let mut image = alloc::vec![usize::MAX; self.num_blocks()];
        for k in 0..self.rgs.len() {
            let (b, c) = (self.rgs[k], other.rgs[k]);
            if image[b] == usize::MAX {
                image[b] = c;
            } else if image[b] != c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Finest common coarsening.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition, PartitionError> {
        let n = self.ground_size();
        if n != other.ground_size() {
            return Err(PartitionError::GroundSetMismatch);
        }
        let mut dsu = Dsu::new(n);
        for part in [self, other] {
            let mut first = alloc::vec![usize::MAX; part.num_blocks()];
            for k in 0..n {
                let b = part.rgs[k];
                if first[b] == usize::MAX {
                    first[b] = k;
                } else {
                    dsu.union(first[b], k);
                }
            }
        }
        Ok(SetPartition::from_labels(&dsu.labels()))
    }

    /// Coarsest common refinement: blockwise intersections.
    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition, PartitionError> {
        let n = self.ground_size();
        if n != other.ground_size() {
            return Err(PartitionError::GroundSetMismatch);
        }
        let width = other.num_blocks();
        let labels: Vec<usize> = (0..n)
            .map(|k| self.rgs[k] * width + other.rgs[k])
            .collect();
        Ok(SetPartition::from_labels(&labels))
    }

    /// Möbius value from this partition to the one-block partition:
    /// `(-1)^(b-1) (b-1)!` for `b` blocks.
    pub fn mobius_to_top(&self) -> i64 {
        let b = self.num_blocks() as i64;
        let mut f = 1i64;
        for k in 1..b {
            f *= k;
        }
        if (b - 1) % 2 == 0 {
            f
        } else {
            -f
        }
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Streams every partition of `{1, ..., n}` exactly once (Bell(n) items)
/// in restricted-growth-string order.
pub fn all_partitions(n: usize) -> Result<PartitionIter, PartitionError> {
    if n == 0 || n > MAX_ENUM_GROUND {
        return Err(PartitionError::GroundSetTooLarge(n));
    }
    Ok(PartitionIter {
        rgs: alloc::vec![0; n],
        done: false,
    })
}

pub struct PartitionIter {
    rgs: Vec<usize>,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = SetPartition {
            rgs: self.rgs.clone(),
        };
        // Advance: rightmost position that can grow within the
        // restricted-growth constraint.
        let n = self.rgs.len();
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let max_prefix = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= max_prefix {
                self.rgs[i] += 1;
                for k in i + 1..n {
                    self.rgs[k] = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Coefficient domain for the exact cumulant calculus; implemented by the
/// big rationals and by rational functions.
pub trait CumulantRing:
    Clone
    + Zero
    + One
    + core::ops::Add<Output = Self>
    + core::ops::Sub<Output = Self>
    + core::ops::Mul<Output = Self>
{
    fn from_i64(v: i64) -> Self;
}

impl CumulantRing for crate::Rat {
    fn from_i64(v: i64) -> Self {
        crate::rat_int(v)
    }
}

/// Joint cumulant from a moment functional via Möbius inversion on the
/// partition lattice:
/// `kappa = sum over partitions pi of (-1)^(b-1)(b-1)! prod_{C in pi} M(C)`.
///
/// `moment` receives sorted 1-indexed subsets of `{1, ..., ell}` and must
/// return 1 on the empty set by convention (it is never called on it).
pub fn cumulant_from_moments<T, F>(moment: &F, ell: usize) -> Result<T, PartitionError>
where
    T: CumulantRing,
    F: Fn(&[usize]) -> T,
{
    if ell == 0 || ell > MAX_CUMULANT_ARGS {
        return Err(PartitionError::TooManyArguments(ell));
    }
    let mut acc = T::zero();
    for pi in all_partitions(ell)? {
        acc = acc + mobius_term(moment, &pi);
    }
    Ok(acc)
}

/// Cumulant sum restricted to partitions `pi >= pi0` that are not above
/// any of the excluded partitions.
pub fn truncated_cumulant<T, F>(
    moment: &F,
    pi0: &SetPartition,
    excluded: &[SetPartition],
) -> Result<T, PartitionError>
where
    T: CumulantRing,
    F: Fn(&[usize]) -> T,
{
    let ell = pi0.ground_size();
    if ell > MAX_CUMULANT_ARGS {
        return Err(PartitionError::TooManyArguments(ell));
    }
    for e in excluded {
        if e.ground_size() != ell {
            return Err(PartitionError::GroundSetMismatch);
        }
    }
    let mut acc = T::zero();
    'outer: for pi in all_partitions(ell)? {
        if !pi0.refines(&pi)? {
            continue;
        }
        for e in excluded {
            if e.refines(&pi)? {
                continue 'outer;
            }
        }
        acc = acc + mobius_term(moment, &pi);
    }
    Ok(acc)
}

fn mobius_term<T, F>(moment: &F, pi: &SetPartition) -> T
where
    T: CumulantRing,
    F: Fn(&[usize]) -> T,
{
    let mut prod = T::from_i64(pi.mobius_to_top());
    for block in pi.blocks() {
        prod = prod * moment(&block);
    }
    prod
}

/// The quasi-factorization quantity `U` on a subset `delta` of the
/// argument index set, defined by the product property
/// `prod_{d subset of delta} U(d) = M(delta)`. Möbius inversion on the
/// boolean lattice gives `U(delta) = prod M(d)^((-1)^(|delta|-|d|))`,
/// so every moment on a subset of `delta` must be invertible.
pub fn quasi_factor<T, F>(moment: &F, delta: &[usize]) -> Result<T, PartitionError>
where
    T: CumulantRing + core::ops::Div<Output = T>,
    F: Fn(&[usize]) -> T,
{
    let k = delta.len();
    if k > MAX_CUMULANT_ARGS {
        return Err(PartitionError::TooManyArguments(k));
    }
    if k == 0 {
        return Ok(T::one());
    }
    let mut num = T::one();
    let mut den = T::one();
    for mask in 0..(1u32 << k) {
        let subset: Vec<usize> = (0..k)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| delta[j])
            .collect();
        let value = if subset.is_empty() {
            T::one()
        } else {
            moment(&subset)
        };
        let even = (k - subset.len()) % 2 == 0;
        if !even && value.is_zero() {
            return Err(PartitionError::ZeroMoment(subset));
        }
        if even {
            num = num * value;
        } else {
            den = den * value;
        }
    }
    Ok(num / den)
}

/// Bell numbers for the enumerable range, used as enumeration oracles.
pub fn bell(n: usize) -> u64 {
    const TABLE: [u64; 13] = [
        1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597,
    ];
    TABLE[n]
}
