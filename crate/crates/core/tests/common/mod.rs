//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use carpetdim::{induced_factor, EventuallyPeriodicPoint, FactorSystem, Sft};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every sequence of length `n` over `0..q`, including those not in the image.
pub fn all_sequences(q: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..q).map(move |b| {
                    let mut w2 = w.clone();
                    w2.push(b);
                    w2
                })
            })
            .collect();
    }
    out
}

/// A random factor system with at most `max_states` source symbols.
pub fn random_system(rng: &mut ChaCha8Rng, max_states: usize) -> FactorSystem {
    loop {
        let k = rng.gen_range(1..=max_states);
        let adj: Vec<Vec<bool>> = (0..k)
            .map(|_| (0..k).map(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let names = (0..k).map(|i| format!("x{i}")).collect();
        let Ok(sft) = Sft::new(names, adj) else { continue };
        let q = rng.gen_range(1..=k.min(3));
        let map: Vec<usize> = (0..k).map(|_| rng.gen_range(0..q)).collect();
        if (0..q).any(|b| !map.contains(&b)) {
            continue;
        }
        let image = (0..q).map(|b| format!("y{b}")).collect();
        return induced_factor(sft, image, map).expect("surjective letter map");
    }
}

/// Lifts of `y_1 ... y_n` that extend to a lift of the whole point, found by
/// enumerating lifts and pushing the reachable set forward
/// `|preperiod| + |period| * |X| + 1` further letters.
pub fn brute_force_dn(fs: &FactorSystem, y: &EventuallyPeriodicPoint, n: usize) -> u64 {
    let sft = fs.source();
    let horizon = n + y.preperiod().len() + y.period().len() * sft.alphabet_size() + 1;
    let word = y.prefix(horizon);
    let map = fs.letter_map();

    let extends = |last: usize| -> bool {
        let mut set = vec![false; sft.alphabet_size()];
        set[last] = true;
        for &b in &word[n..] {
            let mut next = vec![false; sft.alphabet_size()];
            for (s, _) in set.iter().enumerate().filter(|(_, &on)| on) {
                for &t in sft.successors(s) {
                    if map[t] == b {
                        next[t] = true;
                    }
                }
            }
            set = next;
        }
        set.iter().any(|&b| b)
    };

    let mut count = 0;
    let mut stack: Vec<(usize, usize)> = (0..sft.alphabet_size())
        .filter(|&x| map[x] == word[0])
        .map(|x| (x, 1))
        .collect();
    while let Some((x, len)) = stack.pop() {
        if len == n {
            if extends(x) {
                count += 1;
            }
            continue;
        }
        for &t in sft.successors(x) {
            if map[t] == word[len] {
                stack.push((t, len + 1));
            }
        }
    }
    count
}

/// Valid eventually periodic points with short preperiod and period.
pub fn short_points(fs: &FactorSystem, max_pre: usize, max_per: usize) -> Vec<EventuallyPeriodicPoint> {
    let q = fs.image_size();
    let mut out = Vec::new();
    for p in 0..=max_pre {
        for r in 1..=max_per {
            for pre in all_sequences(q, p) {
                for per in all_sequences(q, r) {
                    if let Ok(y) = EventuallyPeriodicPoint::new(fs, pre.clone(), per) {
                        out.push(y);
                    }
                }
            }
        }
    }
    out
}

/// Parses a word of single-character image letter names such as `"12221"`.
pub fn word(fs: &FactorSystem, s: &str) -> Vec<usize> {
    s.chars()
        .map(|c| fs.image_index(&c.to_string()).expect("letter"))
        .collect()
}
