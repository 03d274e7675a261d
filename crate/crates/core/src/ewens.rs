//! The Ewens measure on permutations: exact weights, exhaustive
//! enumeration and a linear-time sequential sampler.
//!
//! The measure puts mass `theta^{#cycles(sigma)} / (theta (theta+1) ...
//! (theta+N-1))` on each permutation of size `N`; `theta = 1` is uniform.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::perm::{PermError, Permutation, Permutations};
use crate::{rat_int, Rat};

/// Largest size accepted by [`enumerate_ewens`]: 9! permutations.
pub const MAX_ENUM_SIZE: usize = 9;

/// Errors from Ewens-measure operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EwensError {
    /// `theta` must be a positive (finite) number.
    ThetaNotPositive,
    /// Enumeration requested for a size outside `1..=9`.
    EnumerationTooLarge(usize),
    /// Underlying permutation problem.
    Perm(PermError),
}

impl fmt::Display for EwensError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EwensError::ThetaNotPositive => write!(f, "theta must be positive"),
            EwensError::EnumerationTooLarge(n) => {
                write!(f, "cannot enumerate S_{n}; size must be in 1..={MAX_ENUM_SIZE}")
            }
            EwensError::Perm(e) => write!(f, "{e}"),
        }
    }
}

impl From<PermError> for EwensError {
    fn from(e: PermError) -> Self {
        EwensError::Perm(e)
    }
}

/// The cycle-weight parameter of the measure, kept as an exact positive
/// rational. Floating-point parameters are converted exactly (every finite
/// float is rational), so the same value feeds both the exact and the
/// Monte-Carlo paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EwensParam {
    theta: Rat,
}

impl EwensParam {
    pub fn new(theta: Rat) -> Result<Self, EwensError> {
        if theta.is_positive() {
            Ok(EwensParam { theta })
        } else {
            Err(EwensError::ThetaNotPositive)
        }
    }

    pub fn from_f64(theta: f64) -> Result<Self, EwensError> {
        let theta = Rat::from_float(theta).ok_or(EwensError::ThetaNotPositive)?;
        EwensParam::new(theta)
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, EwensError> {
        if den == 0 {
            return Err(EwensError::ThetaNotPositive);
        }
        EwensParam::new(crate::rat(num, den))
    }

    pub fn theta(&self) -> &Rat {
        &self.theta
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta.to_f64().unwrap_or(f64::NAN)
    }
}

/// Exact probability of `sigma` under the Ewens measure: the weights over
/// a full symmetric group sum to one.
pub fn ewens_weight(sigma: &Permutation, theta: &EwensParam) -> Rat {
    let (cycles, _) = sigma.cycle_stats();
    let th = theta.theta();
    let mut num = Rat::one();
    for _ in 0..cycles {
        num *= th;
    }
    let mut den = Rat::one();
    for k in 0..sigma.size() {
        den *= th + rat_int(k as i64);
    }
    num / den
}

/// Draws an Ewens permutation of size `n` by sequential insertion: element
/// `k` becomes a fixed point with probability `theta/(k+theta-1)` and is
/// otherwise inserted just before a uniformly chosen earlier element in its
/// cycle. Linear time and space.
pub fn ewens_sample<R: Rng + ?Sized>(
    n: usize,
    theta: &EwensParam,
    rng: &mut R,
) -> Result<Permutation, EwensError> {
    if n == 0 {
        return Err(EwensError::Perm(PermError::Empty));
    }
    let th = theta.theta_f64();
    if !(th > 0.0) || !th.is_finite() {
        return Err(EwensError::ThetaNotPositive);
    }
    let mut images: Vec<usize> = Vec::with_capacity(n);
    let mut inverse: Vec<usize> = Vec::with_capacity(n);
    images.push(1);
    inverse.push(1);
    for k in 2..=n {
        let p_fixed = th / (k as f64 - 1.0 + th);
        if rng.gen::<f64>() < p_fixed {
            images.push(k);
            inverse.push(k);
        } else {
            let j = rng.gen_range(1..k);
            let p = inverse[j - 1];
            images[p - 1] = k;
            images.push(j);
            inverse[j - 1] = k;
            inverse.push(p);
        }
    }
    Ok(Permutation::from_one_line(images)?)
}

/// Exhaustive stream of `(sigma, weight)` over a full symmetric group,
/// guarded to sizes whose factorial is desk-sized.
pub fn enumerate_ewens(
    n: usize,
    theta: &EwensParam,
) -> Result<EwensEnumeration, EwensError> {
    if n == 0 || n > MAX_ENUM_SIZE {
        return Err(EwensError::EnumerationTooLarge(n));
    }
    let th = theta.theta().clone();
    // Precompute theta^c / prod(theta + k) for each possible cycle count.
    let mut den = Rat::one();
    for k in 0..n {
        den *= &th + rat_int(k as i64);
    }
    let mut by_cycles = Vec::with_capacity(n + 1);
    by_cycles.push(Rat::zero()); // cycle count 0 never occurs
    let mut pw = Rat::one();
    for _ in 1..=n {
        pw *= &th;
        by_cycles.push(&pw / &den);
    }
    Ok(EwensEnumeration {
        perms: crate::perm::all_permutations(n)?,
        weight_by_cycles: by_cycles,
    })
}

/// Iterator yielding every permutation of the group exactly once together
/// with its exact Ewens weight.
pub struct EwensEnumeration {
    perms: Permutations,
    weight_by_cycles: Vec<Rat>,
}

impl Iterator for EwensEnumeration {
    type Item = (Permutation, Rat);

    fn next(&mut self) -> Option<Self::Item> {
        let sigma = self.perms.next()?;
        let (cycles, _) = sigma.cycle_stats();
        let w = self.weight_by_cycles[cycles].clone();
        Some((sigma, w))
    }
}
