//! Permutations and partial permutations, with 1-indexed semantics: a
//! permutation of size `N` maps the set `{1, ..., N}` onto itself.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

/// Errors from permutation construction and validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermError {
    /// The one-line word is not a bijection of `{1, ..., N}`.
    NotBijection,
    /// Paired lists of different lengths.
    LengthMismatch,
    /// A source value occurs twice in a partial permutation.
    DuplicateSource(usize),
    /// A target value occurs twice in a partial permutation.
    DuplicateTarget(usize),
    /// Size 0 where a nonempty object is required.
    Empty,
}

impl fmt::Display for PermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermError::NotBijection => write!(f, "one-line word is not a bijection"),
            PermError::LengthMismatch => write!(f, "source and target lists differ in length"),
            PermError::DuplicateSource(v) => write!(f, "duplicate source {v}"),
            PermError::DuplicateTarget(v) => write!(f, "duplicate target {v}"),
            PermError::Empty => write!(f, "empty object not allowed"),
        }
    }
}

/// A permutation of `{1, ..., N}` in one-line notation: entry `k` of
/// `images` is `sigma(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its one-line word, checking bijectivity.
    pub fn from_one_line(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = alloc::vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(PermError::NotBijection);
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// `sigma(k)` for `1 <= k <= N`.
    pub fn image(&self, k: usize) -> usize {
        self.images[k - 1]
    }

    /// The one-line word.
    pub fn one_line(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0usize; self.size()];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v - 1] = k + 1;
        }
        Permutation { images: inv }
    }

    /// Cycle decomposition. Each cycle starts at its smallest element and
    /// cycles are listed by increasing minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut seen = alloc::vec![false; n + 1];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.image(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Total cycle count together with the map `length -> number of cycles
    /// of that length`.
    pub fn cycle_stats(&self) -> (usize, BTreeMap<usize, usize>) {
        let cycles = self.cycles();
        let mut by_len = BTreeMap::new();
        for c in &cycles {
            *by_len.entry(c.len()).or_insert(0) += 1;
        }
        (cycles.len(), by_len)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A partial permutation given by paired lists: `sources[j] -> targets[j]`.
/// Sources are pairwise distinct and so are targets; a source may coincide
/// with a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialPermutation {
    sources: Vec<usize>,
    targets: Vec<usize>,
}

impl PartialPermutation {
    pub fn new(sources: Vec<usize>, targets: Vec<usize>) -> Result<Self, PermError> {
        if sources.len() != targets.len() {
            return Err(PermError::LengthMismatch);
        }
        if let Some(v) = first_duplicate(&sources) {
            return Err(PermError::DuplicateSource(v));
        }
        if let Some(v) = first_duplicate(&targets) {
            return Err(PermError::DuplicateTarget(v));
        }
        Ok(PartialPermutation { sources, targets })
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Number of closed orbits of the partial map. Unlike a permutation, a
    /// partial permutation may have none.
    pub fn cycle_count(&self) -> usize {
        let map: BTreeMap<usize, usize> = self
            .sources
            .iter()
            .copied()
            .zip(self.targets.iter().copied())
            .collect();
        let mut visited = alloc::collections::BTreeSet::new();
        let mut cycles = 0;
        for &start in &self.sources {
            if visited.contains(&start) {
                continue;
            }
            // Out-degree and in-degree are both at most 1, so orbits are
            // plain paths or plain cycles; a walk either returns to its
            // start or dies outside the source set.
            let mut x = start;
            loop {
                visited.insert(x);
                let next = map[&x];
                if next == start {
                    cycles += 1;
                    break;
                }
                if !map.contains_key(&next) || visited.contains(&next) {
                    break;
                }
                x = next;
            }
        }
        cycles
    }
}

fn first_duplicate(values: &[usize]) -> Option<usize> {
    let mut seen = alloc::collections::BTreeSet::new();
    for &v in values {
        if !seen.insert(v) {
            return Some(v);
        }
    }
    None
}

/// All permutations of `{1, ..., n}` in lexicographic order of their
/// one-line words. Sizes above 9 are rejected to keep enumeration sane.
pub fn all_permutations(n: usize) -> Result<Permutations, PermError> {
    if n == 0 || n > 9 {
        return Err(PermError::Empty);
    }
    Ok(Permutations {
        next: Some((1..=n).collect()),
    })
}

/// Iterator over the one-line words of a symmetric group.
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut word = current.clone();
        self.next = next_lex(&mut word).then_some(word);
        Some(Permutation { images: current })
    }
}

/// In-place lexicographic successor; false when `word` was the last one.
fn next_lex(word: &mut [usize]) -> bool {
    let n = word.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && word[i - 1] >= word[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while word[j] <= word[i - 1] {
        j -= 1;
    }
    word.swap(i - 1, j);
    word[i..].reverse();
    true
}
