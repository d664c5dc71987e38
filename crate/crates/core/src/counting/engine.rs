//! Partition sums `S_n = sum over B_n(Y) of |pi^-1[w]|^theta`.
//!
//! `T(v, d)` denotes the sum over all length-`d` continuations of the prefix
//! with fiber vector `v` of `(total lift count)^theta`. It is homogeneous of
//! degree `theta` in `v`, which is what collapsed mode exploits.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::count::{image_word_counts, FiberVector};
use super::logreal::LogReal;
use crate::error::{Error, Result};
use crate::factor::FactorSystem;

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    /// Walk every prefix of every image word.
    Exact,
    /// Memoize subtrees on gcd-normalized fiber vectors.
    Collapsed,
}

/// Value of a subtree: `T(v, d)`, the number of words below it, and the
/// exact integer sum when `theta = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subtree {
    pub value: LogReal,
    pub words: BigUint,
    pub exact: Option<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSum {
    pub n: usize,
    pub theta: f64,
    pub mode: SumMode,
    pub value: LogReal,
    #[serde(serialize_with = "crate::report::ser_biguint")]
    pub word_count: BigUint,
    pub visited_nodes: u64,
    pub collapsed_nodes: u64,
    #[serde(skip)]
    pub exact: Option<BigUint>,
}

impl PartitionSum {
    /// `log S_n`.
    pub fn log_value(&self) -> f64 {
        self.value.log()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Precondition(format!(
            "exponent theta must lie in (0, 1], got {theta}"
        )));
    }
    Ok(())
}

type Key = (usize, usize, Vec<BigUint>);

/// Evaluates `T(v, d)` with optional memoization.
pub struct SubtreeEngine<'a> {
    fs: &'a FactorSystem,
    theta: f64,
    integer: bool,
    mode: SumMode,
    budget: u64,
    visited: u64,
    collapsed: u64,
    memo: HashMap<Key, Subtree>,
}

impl<'a> SubtreeEngine<'a> {
    pub fn new(fs: &'a FactorSystem, theta: f64, mode: SumMode, budget: u64) -> Result<Self> {
        check_theta(theta)?;
        Ok(SubtreeEngine {
            fs,
            theta,
            integer: theta == 1.0,
            mode,
            budget,
            visited: 0,
            collapsed: 0,
            memo: HashMap::new(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn visited_nodes(&self) -> u64 {
        self.visited
    }

    pub fn collapsed_nodes(&self) -> u64 {
        self.collapsed
    }

    fn charge(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::NodeBudget {
                budget: self.budget,
                detail: format!("{:?} prefix-tree walk", self.mode).to_lowercase(),
            });
        }
        Ok(())
    }

    fn leaf(&self, v: &FiberVector) -> Subtree {
        let total = v.total();
        Subtree {
            value: LogReal::from_count(&total).powf(self.theta),
            words: BigUint::one(),
            exact: self.integer.then_some(total),
        }
    }

    /// `T(v, depth)`.
    pub fn subtree(&mut self, v: &FiberVector, depth: usize) -> Result<Subtree> {
        if depth == 0 {
            self.charge()?;
            return Ok(self.leaf(v));
        }
        match self.mode {
            SumMode::Exact => self.expand(v, depth),
            SumMode::Collapsed => {
                let (g, unit) = v.normalized();
                let key = (unit.letter, depth, unit.counts);
                let base = match self.memo.get(&key) {
                    Some(s) => {
                        self.collapsed += 1;
                        s.clone()
                    }
                    None => {
                        let unit = FiberVector {
                            letter: key.0,
                            counts: key.2.clone(),
                        };
                        let s = self.expand(&unit, depth)?;
                        self.memo.insert(key, s.clone());
                        s
                    }
                };
                Ok(self.scale(base, &g))
            }
        }
    }

    fn scale(&self, s: Subtree, g: &BigUint) -> Subtree {
        if g.is_one() {
            return s;
        }
        Subtree {
            value: s.value * LogReal::from_count(g).powf(self.theta),
            words: s.words,
            exact: s.exact.map(|e| e * g),
        }
    }

    fn expand(&mut self, v: &FiberVector, depth: usize) -> Result<Subtree> {
        self.charge()?;
        let mut values = Vec::with_capacity(self.fs.image_size());
        let mut words = BigUint::zero();
        let mut exact = self.integer.then(BigUint::zero);
        for c in 0..self.fs.image_size() {
            if let Some(next) = v.step(self.fs, c) {
                let s = self.subtree(&next, depth - 1)?;
                values.push(s.value);
                words += s.words;
                if let (Some(acc), Some(e)) = (exact.as_mut(), s.exact) {
                    *acc += e;
                }
            }
        }
        Ok(Subtree {
            value: LogReal::sum(&values),
            words,
            exact,
        })
    }

    /// `S_n`, reusing the memo of earlier calls.
    pub fn partition_sum(&mut self, n: usize) -> Result<PartitionSum> {
        if n == 0 {
            return Err(Error::Precondition("partition sum needs n >= 1".into()));
        }
        let (v0, c0) = (self.visited, self.collapsed);
        let mut parts = Vec::new();
        for b in 0..self.fs.image_size() {
            parts.push(self.subtree(&FiberVector::start(self.fs, b), n - 1)?);
        }
        let mut ps = combine(n, self.theta, self.mode, parts);
        ps.visited_nodes = self.visited - v0;
        ps.collapsed_nodes = self.collapsed - c0;
        Ok(ps)
    }
}

fn combine(n: usize, theta: f64, mode: SumMode, parts: Vec<Subtree>) -> PartitionSum {
    let values: Vec<LogReal> = parts.iter().map(|s| s.value).collect();
    let word_count = parts.iter().map(|s| &s.words).sum();
    let exact = if parts.iter().all(|s| s.exact.is_some()) {
        Some(parts.iter().filter_map(|s| s.exact.as_ref()).sum())
    } else {
        None
    };
    PartitionSum {
        n,
        theta,
        mode,
        value: LogReal::sum(&values),
        word_count,
        visited_nodes: 0,
        collapsed_nodes: 0,
        exact,
    }
}

/// Number of prefix-tree nodes an exact walk to depth `n` visits.
pub fn exact_node_count(fs: &FactorSystem, n: usize) -> BigUint {
    image_word_counts(fs, n).into_iter().sum()
}

/// `S_n` in the requested mode.
///
/// Exact mode checks the node budget up front and then walks the first-letter
/// subtrees in parallel, reducing them in letter order.
pub fn partition_sum(
    fs: &FactorSystem,
    n: usize,
    theta: f64,
    mode: SumMode,
    budget: u64,
) -> Result<PartitionSum> {
    check_theta(theta)?;
    if n == 0 {
        return Err(Error::Precondition("partition sum needs n >= 1".into()));
    }
    match mode {
        SumMode::Collapsed => SubtreeEngine::new(fs, theta, mode, budget)?.partition_sum(n),
        SumMode::Exact => {
            let needed = exact_node_count(fs, n);
            if needed > BigUint::from(budget) {
                return Err(Error::NodeBudget {
                    budget,
                    detail: format!("exact walk to depth {n} needs {needed} nodes"),
                });
            }
            let results: Vec<Result<(Subtree, u64)>> = (0..fs.image_size())
                .into_par_iter()
                .map(|b| {
                    let mut e = SubtreeEngine::new(fs, theta, mode, budget)?;
                    let s = e.subtree(&FiberVector::start(fs, b), n - 1)?;
                    Ok((s, e.visited))
                })
                .collect();
            let mut parts = Vec::with_capacity(results.len());
            let mut visited = 0;
            for r in results {
                let (s, v) = r?;
                parts.push(s);
                visited += v;
            }
            let mut ps = combine(n, theta, mode, parts);
            ps.visited_nodes = visited;
            Ok(ps)
        }
    }
}

/// `S_1, ..., S_{n_max}` in collapsed mode with a shared memo.
pub fn partition_series(
    fs: &FactorSystem,
    theta: f64,
    n_max: usize,
    budget: u64,
) -> Result<Vec<PartitionSum>> {
    let mut engine = SubtreeEngine::new(fs, theta, SumMode::Collapsed, budget)?;
    (1..=n_max).map(|n| engine.partition_sum(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::{carpet_to_factor, CarpetSpec};
    use crate::fixtures;

    #[test]
    fn product_carpet_factorizes() {
        let spec = CarpetSpec::from_column_counts(3, 2, &[2, 1]).unwrap();
        let (fs, _) = carpet_to_factor(&spec).unwrap();
        let theta = spec.theta();
        let per_letter = (2f64.powf(theta) + 1.0).ln();
        for n in 1..=10 {
            for mode in [SumMode::Exact, SumMode::Collapsed] {
                let s = partition_sum(&fs, n, theta, mode, DEFAULT_NODE_BUDGET).unwrap();
                assert!((s.log_value() / n as f64 - per_letter).abs() < 1e-13);
                assert_eq!(s.word_count, BigUint::from(1u32) << n);
            }
        }
    }

    #[test]
    fn theta_one_counts_all_source_words() {
        for (_, fs) in fixtures::all() {
            for n in 1..=10 {
                let want = fs.source().word_count(n);
                for mode in [SumMode::Exact, SumMode::Collapsed] {
                    let s = partition_sum(&fs, n, 1.0, mode, DEFAULT_NODE_BUDGET).unwrap();
                    assert_eq!(s.exact.as_ref(), Some(&want));
                }
            }
        }
    }

    #[test]
    fn single_symbol_carpet() {
        let spec = CarpetSpec::full(3, 2, vec![(0, 0)]).unwrap();
        let (fs, _) = carpet_to_factor(&spec).unwrap();
        let s = partition_sum(&fs, 7, spec.theta(), SumMode::Collapsed, 100).unwrap();
        assert_eq!(s.log_value(), 0.0);
    }

    #[test]
    fn collapsed_matches_exact_and_saves_work() {
        let fs = fixtures::clump_additive();
        let e = partition_sum(&fs, 14, 0.5, SumMode::Exact, DEFAULT_NODE_BUDGET).unwrap();
        let c = partition_sum(&fs, 14, 0.5, SumMode::Collapsed, DEFAULT_NODE_BUDGET).unwrap();
        let rel = (e.log_value() - c.log_value()).abs() / e.log_value().abs();
        assert!(rel < 1e-12, "{rel}");
        assert_eq!(e.word_count, c.word_count);
        assert!(c.visited_nodes < e.visited_nodes);
        assert_eq!(BigUint::from(e.visited_nodes), exact_node_count(&fs, 14));
    }

    #[test]
    fn budget_is_enforced() {
        let fs = fixtures::no_clump_additive();
        let err = partition_sum(&fs, 12, 0.5, SumMode::Exact, 1000).unwrap_err();
        assert!(matches!(err, Error::NodeBudget { budget: 1000, .. }));
        let err = partition_sum(&fs, 30, 0.5, SumMode::Collapsed, 10).unwrap_err();
        assert!(matches!(err, Error::NodeBudget { budget: 10, .. }));
    }

    #[test]
    fn rejects_bad_arguments() {
        let fs = fixtures::no_clump_additive();
        assert!(partition_sum(&fs, 0, 0.5, SumMode::Exact, 10).is_err());
        assert!(partition_sum(&fs, 3, 0.0, SumMode::Exact, 10).is_err());
        assert!(partition_sum(&fs, 3, 1.5, SumMode::Exact, 10).is_err());
    }

    #[test]
    fn series_matches_single_calls() {
        let fs = fixtures::clump_not_additive();
        let series = partition_series(&fs, 0.5, 12, DEFAULT_NODE_BUDGET).unwrap();
        for s in &series {
            let single = partition_sum(&fs, s.n, 0.5, SumMode::Collapsed, DEFAULT_NODE_BUDGET).unwrap();
            assert_eq!(s.value, single.value);
        }
    }
}
