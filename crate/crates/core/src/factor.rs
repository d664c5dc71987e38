//! One-block factor maps and the fiber structure they induce.
//!
//! The image shift `Y = pi(X)` is never given its own presentation. Every
//! `Y`-side quantity is derived from `X` through the fiber blocks: for image
//! letters `b`, `b'` the block is the submatrix of `A` with rows in `pi^-1(b)`
//! and columns in `pi^-1(b')`.

use std::ops::AddAssign;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sft::Sft;

/// Submatrix of the transition matrix between two fibers, in fiber-local indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberBlock {
    rows: usize,
    cols: usize,
    succ: Vec<Vec<usize>>,
}

impl FiberBlock {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.succ.iter().all(|s| s.is_empty())
    }

    pub fn successors(&self, row: usize) -> &[usize] {
        &self.succ[row]
    }

    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.succ[row].contains(&col)
    }

    /// Row vector times block.
    pub fn apply<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Clone + Zero + for<'a> AddAssign<&'a T>,
    {
        let mut out = vec![T::zero(); self.cols];
        for (r, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &j in &self.succ[r] {
                out[j] += c;
            }
        }
        out
    }

    /// Block times column vector.
    pub fn apply_right<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Clone + Zero + for<'a> AddAssign<&'a T>,
    {
        self.succ
            .iter()
            .map(|s| {
                let mut acc = T::zero();
                for &j in s {
                    acc += &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| {
                let mut row = vec![0.0; self.cols];
                for &j in &self.succ[r] {
                    row[j] = 1.0;
                }
                row
            })
            .collect()
    }
}

/// A shift of finite type together with a one-block factor map onto its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSystem {
    source: Sft,
    image_names: Vec<String>,
    letter_map: Vec<usize>,
    fibers: Vec<Vec<usize>>,
    local: Vec<usize>,
    blocks: Vec<Vec<FiberBlock>>,
}

/// Builds the factor system for `letter_map`, which sends each `X`-symbol to
/// an index into `image_names`.
///
/// Every declared image letter must have a nonempty fiber.
pub fn induced_factor(
    source: Sft,
    image_names: Vec<String>,
    letter_map: Vec<usize>,
) -> Result<FactorSystem> {
    let k = source.alphabet_size();
    if letter_map.len() != k {
        return Err(Error::InvalidSystem(format!(
            "letter map covers {} symbols, expected {k}",
            letter_map.len()
        )));
    }
    let q = image_names.len();
    for (i, name) in image_names.iter().enumerate() {
        if image_names[..i].contains(name) {
            return Err(Error::InvalidSystem(format!("duplicate image letter {name:?}")));
        }
    }
    let mut fibers = vec![Vec::new(); q];
    let mut local = vec![0; k];
    for (x, &b) in letter_map.iter().enumerate() {
        if b >= q {
            return Err(Error::InvalidSystem(format!(
                "symbol {:?} maps outside the image alphabet",
                source.name(x)
            )));
        }
        local[x] = fibers[b].len();
        fibers[b].push(x);
    }
    if let Some(b) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::InvalidSystem(format!(
            "image letter {:?} has an empty fiber",
            image_names[b]
        )));
    }
    let blocks = (0..q)
        .map(|b| {
            (0..q)
                .map(|c| FiberBlock {
                    rows: fibers[b].len(),
                    cols: fibers[c].len(),
                    succ: fibers[b]
                        .iter()
                        .map(|&x| {
                            source
                                .successors(x)
                                .iter()
                                .filter(|&&z| letter_map[z] == c)
                                .map(|&z| local[z])
                                .collect()
                        })
                        .collect(),
                })
                .collect()
        })
        .collect();
    Ok(FactorSystem {
        source,
        image_names,
        letter_map,
        fibers,
        local,
        blocks,
    })
}

impl FactorSystem {
    /// The identity factor map on `sft`.
    pub fn identity(sft: Sft) -> Self {
        let names = sft.names().to_vec();
        let map = (0..sft.alphabet_size()).collect();
        induced_factor(sft, names, map).expect("identity map has singleton fibers")
    }

    pub fn source(&self) -> &Sft {
        &self.source
    }

    pub fn image_size(&self) -> usize {
        self.image_names.len()
    }

    pub fn image_names(&self) -> &[String] {
        &self.image_names
    }

    pub fn image_name(&self, b: usize) -> &str {
        &self.image_names[b]
    }

    pub fn image_index(&self, name: &str) -> Option<usize> {
        self.image_names.iter().position(|n| n == name)
    }

    pub fn letter_map(&self) -> &[usize] {
        &self.letter_map
    }

    pub fn image_of(&self, x: usize) -> usize {
        self.letter_map[x]
    }

    /// `X`-symbols of `pi^-1(b)`, ascending.
    pub fn fiber(&self, b: usize) -> &[usize] {
        &self.fibers[b]
    }

    /// Position of `x` inside its fiber.
    pub fn local_index(&self, x: usize) -> usize {
        self.local[x]
    }

    pub fn block(&self, from: usize, to: usize) -> &FiberBlock {
        &self.blocks[from][to]
    }

    /// Parses a comma-separated list of image letter names.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(',')
            .map(|s| {
                let s = s.trim();
                self.image_index(s)
                    .ok_or_else(|| Error::InvalidSystem(format!("unknown image letter {s:?}")))
            })
            .collect()
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter()
            .map(|&b| self.image_names[b].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Image letters whose fiber has exactly one symbol, ascending.
pub fn singleton_clumps(fs: &FactorSystem) -> Vec<usize> {
    (0..fs.image_size())
        .filter(|&b| fs.fiber(b).len() == 1)
        .collect()
}

/// A point `preperiod . period . period . ...` of the image shift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventuallyPeriodicPoint {
    preperiod: Vec<usize>,
    period: Vec<usize>,
}

impl EventuallyPeriodicPoint {
    /// Validates that the point has an infinite preimage in `X`, which is
    /// equivalent to membership in `Y = pi(X)`.
    pub fn new(fs: &FactorSystem, preperiod: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidSystem("period word must be nonempty".into()));
        }
        if let Some(&b) = preperiod.iter().chain(&period).find(|&&b| b >= fs.image_size()) {
            return Err(Error::InvalidSystem(format!("image letter index {b} out of range")));
        }
        let point = EventuallyPeriodicPoint { preperiod, period };
        let viable = TailAutomaton::new(fs, &point).viable;
        if !viable[0].iter().any(|&v| v) {
            return Err(Error::Precondition(
                "eventually periodic word has no infinite lift; it is not a point of the image".into(),
            ));
        }
        Ok(point)
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.preperiod
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    /// Letter at 0-based position `i`.
    pub fn letter(&self, i: usize) -> usize {
        self.letter_state(i).1
    }

    /// First `n` letters.
    pub fn prefix(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.letter(i)).collect()
    }

    /// The point shifted left by `n`.
    pub fn shifted(&self, n: usize) -> Self {
        let p = self.preperiod.len();
        if n <= p {
            EventuallyPeriodicPoint {
                preperiod: self.preperiod[n..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let r = (n - p) % self.period.len();
            let mut period = self.period[r..].to_vec();
            period.extend_from_slice(&self.period[..r]);
            EventuallyPeriodicPoint {
                preperiod: Vec::new(),
                period,
            }
        }
    }

    /// Number of states of the unrolled tail automaton.
    pub(crate) fn states(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    /// (automaton state, letter) at 0-based position `i`.
    pub(crate) fn letter_state(&self, i: usize) -> (usize, usize) {
        let p = self.preperiod.len();
        if i < p {
            (i, self.preperiod[i])
        } else {
            let r = (i - p) % self.period.len();
            (p + r, self.period[r])
        }
    }

    pub(crate) fn next_state(&self, s: usize) -> usize {
        if s + 1 < self.states() {
            s + 1
        } else {
            self.preperiod.len()
        }
    }

    pub(crate) fn state_letter(&self, s: usize) -> usize {
        let p = self.preperiod.len();
        if s < p {
            self.preperiod[s]
        } else {
            self.period[s - p]
        }
    }
}

/// Product of the fiber structure with the cyclic automaton of a point's tail.
pub(crate) struct TailAutomaton {
    /// `viable[s][j]`: fiber-local symbol `j` at state `s` starts an infinite lift.
    pub viable: Vec<Vec<bool>>,
}

impl TailAutomaton {
    /// Greatest fixed point of "has a successor in the next fiber that is viable".
    pub fn new(fs: &FactorSystem, point: &EventuallyPeriodicPoint) -> Self {
        let states = point.states();
        let mut viable: Vec<Vec<bool>> = (0..states)
            .map(|s| vec![true; fs.fiber(point.state_letter(s)).len()])
            .collect();
        loop {
            let mut changed = false;
            for s in 0..states {
                let t = point.next_state(s);
                let block = fs.block(point.state_letter(s), point.state_letter(t));
                for j in 0..viable[s].len() {
                    if viable[s][j] && !block.successors(j).iter().any(|&c| viable[t][c]) {
                        viable[s][j] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        TailAutomaton { viable }
    }
}
