//! Fast counters for the handful of reference patterns the statistical
//! suites hammer on. The generic brute-force counter in the core crate is
//! the semantic reference; these kernels are differential-tested against
//! it and only exist because the convergence runs evaluate the statistic
//! hundreds of thousands of times at sizes in the hundreds.

use ewens_core::perm::Permutation;
use ewens_core::stats::{count_dashed, DashedPattern};

/// Sum tree over values `1..=n`.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize) {
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted values `<= i`.
    fn prefix(&self, mut i: usize) -> u64 {
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }

    fn range(&self, lo: usize, hi: usize) -> u64 {
        if lo > hi {
            return 0;
        }
        self.prefix(hi) - self.prefix(lo - 1)
    }
}

/// Number of inversions, `O(N log N)`.
pub fn inversions(sigma: &Permutation) -> u64 {
    let n = sigma.size();
    let mut bit = Fenwick::new(n);
    let mut count = 0;
    for (seen, k) in (1..=n).enumerate() {
        let v = sigma.image(k);
        count += seen as u64 - bit.prefix(v);
        bit.add(v);
    }
    count
}

/// Number of descents.
pub fn descents(sigma: &Permutation) -> u64 {
    let n = sigma.size();
    (1..n)
        .filter(|&i| sigma.image(i) > sigma.image(i + 1))
        .count() as u64
}

/// Occurrences of the increasing triple pattern: for each middle element,
/// smaller-before times greater-after.
pub fn increasing_triples(sigma: &Permutation) -> u64 {
    let n = sigma.size();
    let mut bit = Fenwick::new(n);
    let mut count = 0;
    for j in 1..=n {
        let v = sigma.image(j);
        let smaller_before = bit.prefix(v - 1);
        let greater_after = (n - v) as u64 - (j as u64 - 1 - smaller_before);
        count += smaller_before * greater_after;
        bit.add(v);
    }
    count
}

/// Occurrences of the pattern "adjacent ascent, then a later value strictly
/// between the pair", scanning right to left with a value tree.
pub fn vincular_132(sigma: &Permutation) -> u64 {
    let n = sigma.size();
    if n < 3 {
        return 0;
    }
    let mut bit = Fenwick::new(n);
    let mut count = 0;
    for i in (1..n).rev() {
        if i + 2 <= n {
            bit.add(sigma.image(i + 2));
        }
        let (a, b) = (sigma.image(i), sigma.image(i + 1));
        if a + 1 < b {
            count += bit.range(a + 1, b - 1);
        }
    }
    count
}

/// The best counter for a pattern: a specialized kernel when one exists,
/// the generic brute-force walker otherwise.
pub fn pattern_counter(
    pattern: &DashedPattern,
) -> Box<dyn Fn(&Permutation) -> u64 + Sync + Send> {
    let word = pattern.pattern().one_line().to_vec();
    let x: Vec<usize> = pattern.adjacent_positions().iter().copied().collect();
    match (word.as_slice(), x.as_slice()) {
        ([2, 1], []) => Box::new(inversions),
        ([2, 1], [1]) => Box::new(descents),
        ([1, 2, 3], []) => Box::new(increasing_triples),
        ([1, 3, 2], [1]) => Box::new(vincular_132),
        _ => {
            let pattern = pattern.clone();
            Box::new(move |sigma| count_dashed(sigma, &pattern))
        }
    }
}
