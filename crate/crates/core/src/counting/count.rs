//! Exact preimage counts of image words.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factor::FactorSystem;

pub const DEFAULT_ORACLE_BOUND: usize = 12;

/// Lift counts of an image prefix, split by the final `X`-symbol.
///
/// `counts[j]` is the number of `X`-words realizing the prefix and ending at
/// the `j`-th symbol of the fiber over `letter`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiberVector {
    pub letter: usize,
    pub counts: Vec<BigUint>,
}

impl FiberVector {
    /// Vector of the one-letter prefix `b`.
    pub fn start(fs: &FactorSystem, b: usize) -> Self {
        FiberVector {
            letter: b,
            counts: vec![BigUint::one(); fs.fiber(b).len()],
        }
    }

    /// Extends the prefix by `b`; `None` when no lift survives.
    pub fn step(&self, fs: &FactorSystem, b: usize) -> Option<Self> {
        let block = fs.block(self.letter, b);
        if block.is_zero() {
            return None;
        }
        let counts = block.apply(&self.counts);
        if counts.iter().all(Zero::is_zero) {
            return None;
        }
        Some(FiberVector { letter: b, counts })
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Gcd of the entries; zero only for the zero vector.
    pub fn content(&self) -> BigUint {
        self.counts
            .iter()
            .fold(BigUint::zero(), |g, c| g.gcd(c))
    }

    /// `(content, self / content)`.
    pub fn normalized(&self) -> (BigUint, FiberVector) {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return (g, self.clone());
        }
        let counts = self.counts.iter().map(|c| c / &g).collect();
        (
            g,
            FiberVector {
                letter: self.letter,
                counts,
            },
        )
    }
}

/// Fiber vector of `word`, or `None` when the word is not in the image.
pub fn fiber_vector(fs: &FactorSystem, word: &[usize]) -> Option<FiberVector> {
    let (&first, rest) = word.split_first()?;
    if first >= fs.image_size() {
        return None;
    }
    let mut v = FiberVector::start(fs, first);
    for &b in rest {
        if b >= fs.image_size() {
            return None;
        }
        v = v.step(fs, b)?;
    }
    Some(v)
}

/// `|pi^-1[word]|`: the number of `X`-words mapped onto `word`.
pub fn preimage_count(fs: &FactorSystem, word: &[usize]) -> Result<BigUint> {
    if word.is_empty() {
        return Err(Error::Precondition("preimage count of the empty word".into()));
    }
    Ok(fiber_vector(fs, word)
        .map(|v| v.total())
        .unwrap_or_else(BigUint::zero))
}

/// Independent oracle for [`preimage_count`]: depth-first enumeration of lifts
/// using only the transition relation and the letter map.
pub fn brute_force_count(fs: &FactorSystem, word: &[usize], bound: usize) -> Result<BigUint> {
    if word.len() > bound {
        return Err(Error::OracleBound {
            len: word.len(),
            bound,
        });
    }
    if word.is_empty() {
        return Err(Error::Precondition("preimage count of the empty word".into()));
    }
    let sft = fs.source();
    let map = fs.letter_map();

    fn dfs(sft: &crate::sft::Sft, map: &[usize], word: &[usize], prev: usize) -> u64 {
        match word.split_first() {
            None => 1,
            Some((&b, rest)) => sft
                .successors(prev)
                .iter()
                .filter(|&&x| map[x] == b)
                .map(|&x| dfs(sft, map, rest, x))
                .sum(),
        }
    }

    let total: u64 = (0..sft.alphabet_size())
        .filter(|&x| map[x] == word[0])
        .map(|x| dfs(sft, map, &word[1..], x))
        .sum();
    Ok(BigUint::from(total))
}

/// `|B_k(Y)|` for `k = 1..=n`, via the subset construction on supports of
/// fiber vectors.
pub fn image_word_counts(fs: &FactorSystem, n: usize) -> Vec<BigUint> {
    let q = fs.image_size();
    let mut layer: HashMap<(usize, Vec<bool>), BigUint> = (0..q)
        .map(|b| ((b, vec![true; fs.fiber(b).len()]), BigUint::one()))
        .collect();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        out.push(layer.values().sum());
        if k == n {
            break;
        }
        let mut next: HashMap<(usize, Vec<bool>), BigUint> = HashMap::new();
        for ((b, support), count) in &layer {
            for c in 0..q {
                let block = fs.block(*b, c);
                let mut reached = vec![false; block.cols()];
                let mut any = false;
                for (r, &on) in support.iter().enumerate() {
                    if on {
                        for &j in block.successors(r) {
                            reached[j] = true;
                            any = true;
                        }
                    }
                }
                if any {
                    *next.entry((c, reached)).or_insert_with(BigUint::zero) += count;
                }
            }
        }
        layer = next;
    }
    out
}

/// Every image word of length `n`, in lexicographic order of letter indices.
pub fn image_words(fs: &FactorSystem, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut stack: Vec<(Vec<usize>, FiberVector)> = (0..fs.image_size())
        .rev()
        .map(|b| (vec![b], FiberVector::start(fs, b)))
        .collect();
    while let Some((w, v)) = stack.pop() {
        if w.len() == n {
            out.push(w);
            continue;
        }
        for c in (0..fs.image_size()).rev() {
            if let Some(next) = v.step(fs, c) {
                let mut w2 = w.clone();
                w2.push(c);
                stack.push((w2, next));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::FactorSystem;
    use crate::fixtures;
    use crate::sft::Sft;

    fn word(fs: &FactorSystem, s: &str) -> Vec<usize> {
        s.chars()
            .map(|c| fs.image_index(&c.to_string()).unwrap())
            .collect()
    }

    #[test]
    fn parity_counts_of_first_example() {
        let fs = fixtures::clump_not_additive();
        assert_eq!(preimage_count(&fs, &word(&fs, "12221")).unwrap(), BigUint::from(1u32));
        assert_eq!(preimage_count(&fs, &word(&fs, "122221")).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn identity_lifts_are_unique() {
        let fs = FactorSystem::identity(Sft::full(3).unwrap());
        for w in image_words(&fs, 4) {
            assert_eq!(preimage_count(&fs, &w).unwrap(), BigUint::one());
        }
    }

    #[test]
    fn oracle_edge_cases() {
        let fs = fixtures::clump_not_additive();
        assert_eq!(brute_force_count(&fs, &[0, 7], 12).unwrap(), BigUint::zero());
        assert_eq!(preimage_count(&fs, &[0, 7]).unwrap(), BigUint::zero());
        // 1 1 has no lift: symbol 1 has no self-loop.
        assert_eq!(brute_force_count(&fs, &word(&fs, "11"), 12).unwrap(), BigUint::zero());
        assert!(matches!(
            brute_force_count(&fs, &[1; 13], 12),
            Err(Error::OracleBound { len: 13, bound: 12 })
        ));
        assert!(preimage_count(&fs, &[]).is_err());
    }

    #[test]
    fn word_counts_match_enumeration() {
        for (_, fs) in fixtures::all() {
            let counts = image_word_counts(&fs, 8);
            for n in 1..=8 {
                assert_eq!(counts[n - 1], BigUint::from(image_words(&fs, n).len()));
            }
        }
    }

    #[test]
    fn normalization() {
        let v = FiberVector {
            letter: 0,
            counts: vec![BigUint::from(6u32), BigUint::zero(), BigUint::from(9u32)],
        };
        let (g, n) = v.normalized();
        assert_eq!(g, BigUint::from(3u32));
        assert_eq!(n.counts, vec![BigUint::from(2u32), BigUint::zero(), BigUint::from(3u32)]);
    }
}
