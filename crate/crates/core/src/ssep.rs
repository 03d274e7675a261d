//! The bridge between Ewens permutations and the symmetric simple
//! exclusion process (SSEP) with open boundaries, specialised to left
//! entry rate 1 and no left exit / right entry.
//!
//! A permutation of size `N+1` maps to a particle configuration on `N`
//! sites through its exceedance word; under the convention
//! `beta * theta = 1` the push-forward of the Ewens measure is the steady
//! state of the chain. The cycle-to-word transform, right-to-left minima,
//! and the staircase-shape codec tie the combinatorial objects together,
//! and an independent Markov-chain simulator cross-validates the steady
//! state.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::ewens::{enumerate_ewens, ewens_sample, EwensError, EwensParam};
use crate::perm::{PermError, Permutation};
use crate::Rat;

#[derive(Debug, Clone, PartialEq)]
pub enum SsepError {
    /// Words contain only 0/1 entries.
    BadBit(usize),
    /// Row lengths must be weakly decreasing.
    NotAShape,
    /// Shapes must have at least one row.
    EmptyShape,
    /// The right-exit rate must lie in `(0, 1]`.
    BadRate(f64),
    /// Underlying permutation or measure problem.
    Ewens(EwensError),
}

impl fmt::Display for SsepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SsepError::BadBit(v) => write!(f, "word entry {v} is not 0 or 1"),
            SsepError::NotAShape => write!(f, "row lengths must be weakly decreasing"),
            SsepError::EmptyShape => write!(f, "shape must have at least one row"),
            SsepError::BadRate(b) => write!(f, "exit rate {b} outside (0, 1]"),
            SsepError::Ewens(e) => write!(f, "{e}"),
        }
    }
}

impl From<EwensError> for SsepError {
    fn from(e: EwensError) -> Self {
        SsepError::Ewens(e)
    }
}

impl From<PermError> for SsepError {
    fn from(e: PermError) -> Self {
        SsepError::Ewens(EwensError::Perm(e))
    }
}

/// A 0/1 word; particle configurations and border words alike.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord {
    bits: Vec<u8>,
}

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Result<Self, SsepError> {
        if let Some(&v) = bits.iter().find(|&&b| b > 1) {
            return Err(SsepError::BadBit(v as usize));
        }
        Ok(BinaryWord { bits })
    }

    pub fn zeros(n: usize) -> Self {
        BinaryWord {
            bits: alloc::vec![0; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        BinaryWord {
            bits: alloc::vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// The word read as a little-endian binary number; handy as a table
    /// index for exact laws on few sites.
    pub fn index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .map(|(k, &b)| (b as u64) << k)
            .sum()
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryWord {
    type Err = SsepError;

    fn from_str(s: &str) -> Result<Self, SsepError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(SsepError::BadBit(c as usize)),
            }
        }
        Ok(BinaryWord { bits })
    }
}

/// A staircase shape: weakly decreasing row lengths, trailing empty rows
/// allowed and meaningful. Its size is the row count plus the column
/// count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    rows: Vec<usize>,
}

impl Shape {
    pub fn new(rows: Vec<usize>) -> Result<Self, SsepError> {
        if rows.is_empty() {
            return Err(SsepError::EmptyShape);
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(SsepError::NotAShape);
        }
        Ok(Shape { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.rows.first().copied().unwrap_or(0)
    }

    /// Rows plus columns, not boxes.
    pub fn size(&self) -> usize {
        self.num_rows() + self.num_columns()
    }
}

/// The cycle-to-word transform: write each cycle ending with its minimum,
/// order cycles by increasing minima, erase the parentheses. Cycle minima
/// of the input become right-to-left minima of the output, and weak
/// exceedances become ascent positions.
pub fn fundamental_transform(sigma: &Permutation) -> Permutation {
    let n = sigma.size();
    let mut word = Vec::with_capacity(n);
    let mut seen = alloc::vec![false; n + 1];
    for m in 1..=n {
        if seen[m] {
            continue;
        }
        // m is the smallest unseen element, hence the minimum of its cycle.
        let mut x = sigma.image(m);
        while x != m {
            seen[x] = true;
            word.push(x);
            x = sigma.image(x);
        }
        seen[m] = true;
        word.push(m);
    }
    Permutation::from_one_line(word).expect("transform of a permutation is a permutation")
}

/// Inverse of the cycle-to-word transform: split the word after each
/// right-to-left minimum and read each segment as a cycle.
pub fn fundamental_transform_inverse(word: &Permutation) -> Permutation {
    let n = word.size();
    let mut images = alloc::vec![0usize; n];
    let mut suffix_min = usize::MAX;
    let mut ends = Vec::new();
    for pos in (1..=n).rev() {
        if word.image(pos) < suffix_min {
            suffix_min = word.image(pos);
            ends.push(pos);
        }
    }
    ends.reverse();
    let mut begin = 1;
    for &end in &ends {
        for pos in begin..end {
            images[word.image(pos) - 1] = word.image(pos + 1);
        }
        images[word.image(end) - 1] = word.image(begin);
        begin = end + 1;
    }
    Permutation::from_one_line(images).expect("segments reassemble into a permutation")
}

/// Number of right-to-left minima: positions whose value is smaller than
/// everything to their right.
pub fn right_to_left_minima(sigma: &Permutation) -> usize {
    let mut best = usize::MAX;
    let mut count = 0;
    for pos in (1..=sigma.size()).rev() {
        if sigma.image(pos) < best {
            best = sigma.image(pos);
            count += 1;
        }
    }
    count
}

/// The exceedance word of a permutation of size `N+1`: bit `k` is 1 when
/// `sigma(k+1) >= k+1`.
pub fn exceedance_word(sigma: &Permutation) -> BinaryWord {
    let n = sigma.size();
    let bits = (2..=n)
        .map(|k| u8::from(sigma.image(k) >= k))
        .collect();
    BinaryWord { bits }
}

/// The ascent word of a permutation of size `N+1`, indexed by values
/// `2..=N+1`: the bit for value `v` is 1 when the entry following `v` is
/// larger, with the entry in the last position counting as an ascent.
pub fn ascent_word(sigma: &Permutation) -> BinaryWord {
    let n = sigma.size();
    let inv = sigma.inverse();
    let bits = (2..=n)
        .map(|v| {
            let pos = inv.image(v);
            u8::from(pos == n || sigma.image(pos + 1) > v)
        })
        .collect();
    BinaryWord { bits }
}

/// Walks the border of a shape from the north-east corner to the
/// south-west corner; the first step is always south, and bit `k` of the
/// word records whether step `k+1` goes south.
pub fn shape_to_word(shape: &Shape) -> BinaryWord {
    let rows = shape.rows();
    let k = rows.len();
    let mut bits = Vec::with_capacity(shape.size() - 1);
    for r in 0..k {
        if r > 0 {
            bits.push(1);
        }
        let next = if r + 1 < k { rows[r + 1] } else { 0 };
        for _ in 0..rows[r] - next {
            bits.push(0);
        }
    }
    BinaryWord { bits }
}

/// Inverse of [`shape_to_word`]: a word of length `N` yields the shape of
/// size `N+1` whose border it encodes.
pub fn word_to_shape(word: &BinaryWord) -> Shape {
    // Row r's length is the number of west steps after the r-th south
    // step; the first step is an implicit south.
    let mut west = 0usize;
    let mut rows = Vec::with_capacity(word.weight() + 1);
    for &b in word.bits().iter().rev() {
        if b == 1 {
            rows.push(west);
        } else {
            west += 1;
        }
    }
    rows.push(west);
    rows.reverse();
    Shape { rows }
}

/// Exact steady-state sample on `sites` sites: draw an Ewens permutation
/// of size `sites + 1` and take its exceedance word. Linear time.
pub fn ssep_steady_sample<R: Rng + ?Sized>(
    sites: usize,
    theta: &EwensParam,
    rng: &mut R,
) -> Result<BinaryWord, SsepError> {
    let sigma = ewens_sample(sites + 1, theta, rng)?;
    Ok(exceedance_word(&sigma))
}

/// Exact push-forward word law on `sites` sites by exhaustive enumeration
/// of the symmetric group of size `sites + 1`.
pub fn ssep_steady_exact(
    sites: usize,
    theta: &EwensParam,
) -> Result<Vec<(BinaryWord, Rat)>, SsepError> {
    let mut law: BTreeMap<BinaryWord, Rat> = BTreeMap::new();
    for (sigma, w) in enumerate_ewens(sites + 1, theta)? {
        let word = exceedance_word(&sigma);
        law.entry(word)
            .and_modify(|acc| *acc += &w)
            .or_insert(w);
    }
    Ok(law.into_iter().collect())
}

/// Discrete-time open-boundary exclusion chain on `n` sites. Per step, a
/// particle jumps to an adjacent empty site with probability `1/(n+1)`,
/// a particle enters at the left boundary when empty with probability
/// `1/(n+1)`, a particle at the right boundary exits with probability
/// `beta/(n+1)`, and otherwise nothing happens.
#[derive(Debug, Clone)]
pub struct SsepChain {
    beta: f64,
    state: Vec<u8>,
}

impl SsepChain {
    pub fn new(sites: usize, beta: f64, initial: BinaryWord) -> Result<Self, SsepError> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(SsepError::BadRate(beta));
        }
        if initial.len() != sites {
            return Err(SsepError::BadBit(initial.len()));
        }
        Ok(SsepChain {
            beta,
            state: initial.bits,
        })
    }

    pub fn state(&self) -> BinaryWord {
        BinaryWord {
            bits: self.state.clone(),
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.state.len();
        let u = rng.gen::<f64>() * (n as f64 + 1.0);
        let mut acc = 0.0;
        // Nearest-neighbour jumps, scanned left to right.
        for i in 0..n.saturating_sub(1) {
            if self.state[i] != self.state[i + 1] {
                acc += 1.0;
                if u < acc {
                    self.state.swap(i, i + 1);
                    return;
                }
            }
        }
        // Left entry (rate 1).
        if self.state.first() == Some(&0) {
            acc += 1.0;
            if u < acc {
                self.state[0] = 1;
                return;
            }
        }
        // Right exit (rate beta).
        if self.state.last() == Some(&1) {
            acc += self.beta;
            if u < acc {
                self.state[n - 1] = 0;
            }
        }
        // Otherwise nothing happens.
    }
}

/// Runs the chain from the empty configuration for `steps` transitions and
/// returns the final state.
pub fn ssep_mcmc<R: Rng + ?Sized>(
    sites: usize,
    beta: f64,
    steps: u64,
    rng: &mut R,
) -> Result<BinaryWord, SsepError> {
    let mut chain = SsepChain::new(sites, beta, BinaryWord::zeros(sites))?;
    for _ in 0..steps {
        chain.step(rng);
    }
    Ok(chain.state())
}
