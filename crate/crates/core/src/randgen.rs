//! Uniform random expressions of a given size.
//!
//! Trees follow `E ::= x | 0 | 1 | E* | E.E | E+E` and are counted with the
//! symbol-count size (stars and binary operators count one each). A tree is
//! drawn by picking a uniform rank below the number of trees of the size and
//! walking down the count table.
//!
//! With [`Leaves::NoZero`] the leaf `0` is left out. A random tree with `0`
//! leaves mostly normalizes away, since `0` absorbs concatenations.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::RawExpr;

/// Leaf symbols besides the letters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Leaves {
    /// Letters, `0` and `1`.
    #[default]
    All,
    /// Letters and `1`.
    NoZero,
}

/// Number of trees of each size over `k` letters.
#[derive(Debug, Clone)]
pub struct CountTable {
    k: usize,
    leaves: Leaves,
    counts: Vec<BigUint>,
}

impl CountTable {
    /// Counts for every size up to `max_size`.
    pub fn new(max_size: usize, k: usize) -> Self {
        Self::with_leaves(max_size, k, Leaves::All)
    }

    pub fn with_leaves(max_size: usize, k: usize, leaves: Leaves) -> Self {
        let mut counts = vec![BigUint::zero(); max_size.max(1) + 1];
        counts[1] = BigUint::from(match leaves {
            Leaves::All => k + 2,
            Leaves::NoZero => k + 1,
        });
        for n in 2..=max_size {
            let mut binary = BigUint::zero();
            for i in 1..n.saturating_sub(1) {
                binary += &counts[i] * &counts[n - 1 - i];
            }
            counts[n] = &counts[n - 1] + binary * 2u32;
        }
        CountTable { k, leaves, counts }
    }

    pub fn count(&self, n: usize) -> &BigUint {
        &self.counts[n]
    }

    pub fn max_size(&self) -> usize {
        self.counts.len() - 1
    }

    /// The tree of size `n` with the given rank, `rank < count(n)`.
    pub fn unrank(&self, n: usize, rank: &BigUint) -> RawExpr {
        // Ranks are consumed top-down; each level splits off the quotient
        // and remainder for its two subtrees.
        let mut rank = rank.clone();
        if n == 1 {
            let r: usize = usize::try_from(&rank).expect("leaf rank");
            return self.leaf(r);
        }
        let stars = &self.counts[n - 1];
        if rank < *stars {
            return RawExpr::star(self.unrank(n - 1, &rank));
        }
        rank -= stars;
        for i in split_order(n) {
            let j = n - 1 - i;
            let block = &self.counts[i] * &self.counts[j];
            for union in [false, true] {
                if rank < block {
                    let right_count = &self.counts[j];
                    let l = self.unrank(i, &(&rank / right_count));
                    let r = self.unrank(j, &(&rank % right_count));
                    return if union {
                        RawExpr::union(l, r)
                    } else {
                        RawExpr::concat(l, r)
                    };
                }
                rank -= &block;
            }
        }
        unreachable!("rank out of range")
    }

    fn leaf(&self, r: usize) -> RawExpr {
        match r {
            r if r < self.k => RawExpr::Letter(letter_name(r)),
            r if r == self.k && self.leaves == Leaves::All => RawExpr::Zero,
            _ => RawExpr::One,
        }
    }
}

/// Sizes of left subtrees of a binary node of size `n`, balanced splits last
/// (`1, n-2, 2, n-3, ...`).
fn split_order(n: usize) -> Vec<usize> {
    let last = n - 2;
    let mut out = Vec::with_capacity(last);
    let (mut lo, mut hi) = (1, last);
    while lo <= hi {
        out.push(lo);
        if hi != lo {
            out.push(hi);
        }
        lo += 1;
        hi -= 1;
    }
    out
}

/// Letter names: `a` to `z`, then further alphabetic characters.
pub fn letter_name(i: usize) -> char {
    if i < 26 {
        (b'a' + i as u8) as char
    } else {
        char::from_u32(0x3b1 + (i as u32 - 26)).unwrap_or('?')
    }
}

/// Number of trees of size `n` over `k` letters.
pub fn count(n: usize, k: usize) -> BigUint {
    CountTable::new(n, k).count(n).clone()
}

/// Deterministic generator of uniform trees.
#[derive(Debug, Clone)]
pub struct Generator {
    table: CountTable,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(max_size: usize, k: usize, seed: u64) -> Self {
        Self::with_leaves(max_size, k, seed, Leaves::All)
    }

    pub fn with_leaves(max_size: usize, k: usize, seed: u64, leaves: Leaves) -> Self {
        Generator {
            table: CountTable::with_leaves(max_size, k, leaves),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A uniformly drawn tree of size `n`, `1 <= n <= max_size`.
    pub fn sample(&mut self, n: usize) -> RawExpr {
        assert!(n >= 1 && n <= self.table.max_size(), "size out of range");
        let total = self.table.count(n).clone();
        let rank = if total.is_one() {
            BigUint::zero()
        } else {
            self.rng.gen_biguint_below(&total)
        };
        self.table.unrank(n, &rank)
    }
}

/// `count` expressions of size `n` over `k` letters, one string each.
pub fn generate(n: usize, k: usize, count: usize, seed: u64) -> Vec<String> {
    generate_with(n, k, count, seed, Leaves::All)
}

/// [`generate`] over a chosen leaf set.
pub fn generate_with(n: usize, k: usize, count: usize, seed: u64, leaves: Leaves) -> Vec<String> {
    let mut g = Generator::with_leaves(n, k, seed, leaves);
    (0..count).map(|_| g.sample(n).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_raw;

    #[test]
    fn small_counts() {
        assert_eq!(count(1, 2), BigUint::from(4u32));
        assert_eq!(count(2, 2), BigUint::from(4u32));
        assert_eq!(count(3, 2), BigUint::from(36u32));
        assert_eq!(count(1, 1), BigUint::from(3u32));
        let t = CountTable::with_leaves(3, 2, Leaves::NoZero);
        assert_eq!(t.count(1), &BigUint::from(3u32));
        assert_eq!(t.count(3), &BigUint::from(3u32 + 2 * 9));
    }

    #[test]
    fn no_zero_leaves() {
        for e in generate_with(30, 2, 20, 1, Leaves::NoZero) {
            assert!(!e.contains('0'), "{e}");
        }
    }

    #[test]
    fn split_orders() {
        assert_eq!(split_order(3), vec![1]);
        assert_eq!(split_order(6), vec![1, 4, 2, 3]);
        assert_eq!(split_order(7), vec![1, 5, 2, 4, 3]);
    }

    #[test]
    fn unranking_is_a_bijection_on_small_sizes() {
        let t = CountTable::new(5, 2);
        for n in 1..=5 {
            let c: usize = usize::try_from(t.count(n)).unwrap();
            let mut seen = std::collections::HashSet::new();
            for r in 0..c {
                let e = t.unrank(n, &BigUint::from(r));
                assert_eq!(e.size(), n);
                assert!(seen.insert(e));
            }
        }
    }

    #[test]
    fn generated_text_reparses_to_same_size() {
        for e in generate(200, 2, 5, 3) {
            let raw = parse_raw(&e).unwrap();
            assert_eq!(raw.size(), 200, "{e}");
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(50, 2, 4, 9), generate(50, 2, 4, 9));
        assert_ne!(generate(50, 2, 4, 9), generate(50, 2, 4, 10));
    }
}
