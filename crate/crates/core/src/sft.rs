//! Vertex shifts of finite type.
//!
//! A word of length `n` is a sequence of `n` symbols with `n - 1` transition
//! constraints, so the cylinder `[x1 ... xn]` corresponds to a path with `n`
//! vertices in the transition digraph.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A one-sided vertex shift given by a 0/1 transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    names: Vec<String>,
    adj: Vec<Vec<bool>>,
    succ: Vec<Vec<usize>>,
}

/// Irreducibility, period and mixing index of a transition matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub irreducible: bool,
    pub mixing: bool,
    /// Smallest `M` with every entry of `A^M` positive.
    pub mixing_index: Option<usize>,
    /// Gcd of cycle lengths; only meaningful when irreducible.
    pub period: usize,
}

impl Sft {
    /// Builds a shift from symbol names and a square boolean matrix.
    ///
    /// Symbols without an outgoing or incoming transition are rejected.
    pub fn new(names: Vec<String>, adj: Vec<Vec<bool>>) -> Result<Self> {
        let k = names.len();
        if k == 0 {
            return Err(Error::InvalidSystem("alphabet is empty".into()));
        }
        if adj.len() != k || adj.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidSystem(format!(
                "transition matrix must be {k}x{k}"
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidSystem(format!("duplicate symbol {name:?}")));
            }
        }
        for i in 0..k {
            if !adj[i].iter().any(|&b| b) {
                return Err(Error::InvalidSystem(format!(
                    "symbol {:?} has no outgoing transition",
                    names[i]
                )));
            }
            if !(0..k).any(|j| adj[j][i]) {
                return Err(Error::InvalidSystem(format!(
                    "symbol {:?} has no incoming transition",
                    names[i]
                )));
            }
        }
        let succ = adj
            .iter()
            .map(|row| (0..k).filter(|&j| row[j]).collect())
            .collect();
        Ok(Sft { names, adj, succ })
    }

    /// Builds a shift from named edges.
    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let k = names.len();
        let mut adj = vec![vec![false; k]; k];
        for &(i, j) in edges {
            if i >= k || j >= k {
                return Err(Error::InvalidSystem(format!("edge ({i}, {j}) out of range")));
            }
            adj[i][j] = true;
        }
        Sft::new(names, adj)
    }

    /// Full shift on `k` symbols named `0..k`.
    pub fn full(k: usize) -> Result<Self> {
        let names = (0..k).map(|i| i.to_string()).collect();
        Sft::new(names, vec![vec![true; k]; k])
    }

    pub fn alphabet_size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
    }

    pub fn is_full(&self) -> bool {
        self.adj.iter().all(|row| row.iter().all(|&b| b))
    }

    /// Whether `word` is an allowed block.
    pub fn admits(&self, word: &[usize]) -> bool {
        word.iter().all(|&s| s < self.alphabet_size())
            && word.windows(2).all(|w| self.adj[w[0]][w[1]])
    }

    /// `|B_n(X)|`, the number of allowed words of length `n`.
    pub fn word_count(&self, n: usize) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        let k = self.alphabet_size();
        let mut v = vec![BigUint::one(); k];
        for _ in 1..n {
            let mut next = vec![BigUint::zero(); k];
            for (i, c) in v.iter().enumerate() {
                for &j in &self.succ[i] {
                    next[j] += c;
                }
            }
            v = next;
        }
        v.into_iter().sum()
    }

    /// Strongly connected components, each sorted, in order of their least element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        strongly_connected(&self.succ)
    }
}

fn reach(succ: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Strongly connected components of a digraph given by successor lists.
pub(crate) fn strongly_connected(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let k = succ.len();
    let mut comp = vec![usize::MAX; k];
    let mut out = Vec::new();
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        let fwd = reach(succ, s);
        let mut pred = vec![Vec::new(); k];
        for (u, vs) in succ.iter().enumerate() {
            for &v in vs {
                pred[v].push(u);
            }
        }
        let bwd = reach(&pred, s);
        let members: Vec<usize> = (0..k).filter(|&v| fwd[v] && bwd[v]).collect();
        for &v in &members {
            comp[v] = out.len();
        }
        out.push(members);
    }
    out
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).any(|t| a[i][t] && b[t][j]))
                .collect()
        })
        .collect()
}

/// Reports irreducibility, period, mixing and the mixing index of `sft`.
pub fn validate_sft(sft: &Sft) -> StructureReport {
    let k = sft.alphabet_size();
    let fwd = reach(&sft.succ, 0);
    let mut pred = vec![Vec::new(); k];
    for (i, j) in sft.edges() {
        pred[j].push(i);
    }
    let bwd = reach(&pred, 0);
    let irreducible = fwd.iter().all(|&b| b) && bwd.iter().all(|&b| b);
    if !irreducible {
        return StructureReport {
            irreducible,
            mixing: false,
            mixing_index: None,
            period: 1,
        };
    }

    // BFS levels from symbol 0; the period is the gcd of level defects along edges.
    let mut level = vec![usize::MAX; k];
    level[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &v in &sft.succ[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period = 0usize;
    for (u, v) in sft.edges() {
        let d = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
        period = period.gcd(&d);
    }
    let period = period.max(1);
    let mixing = period == 1;

    let mixing_index = if mixing {
        let bound = (k - 1) * (k - 1) + 1;
        let mut power = sft.adj.clone();
        let mut found = None;
        for m in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                found = Some(m);
                break;
            }
            power = bool_mul(&power, &sft.adj);
        }
        found
    } else {
        None
    };

    StructureReport {
        irreducible,
        mixing,
        mixing_index,
        period,
    }
}
