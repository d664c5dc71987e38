//! Concatenation ratios `|pi^-1[uv]| / (|pi^-1[u]| |pi^-1[v]|)` and the
//! uniqueness verdict built on them.
//!
//! With `f` the forward fiber vector of `u` and `g` the backward one of `v`,
//! the ratio is `f B g / (sum f)(sum g)`, `B` the block joining the last
//! letter of `u` to the first of `v`. It only depends on the directions of
//! `f` and `g`, so words are grouped into classes of proportional vectors.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factor::{singleton_clumps, FactorSystem};
use crate::sft::validate_sft;

pub const DEFAULT_REFUTATION_THRESHOLD: f64 = 0.01;
/// Consecutive strictly decreasing per-length minima needed for refutation.
pub const DECREASING_RUN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditivityVerdict {
    ConsistentWithAlmostAdditive,
    RefutedUpTo(usize),
}

impl fmt::Display for AdditivityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdditivityVerdict::ConsistentWithAlmostAdditive => {
                write!(f, "consistent-with-almost-additive")
            }
            AdditivityVerdict::RefutedUpTo(l) => write!(f, "refuted-up-to-{l}"),
        }
    }
}

impl Serialize for AdditivityVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityScanReport {
    pub max_len: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `min_trend[k - 1]`: smallest ratio over pairs with `max(|u|, |v|) = k`.
    pub min_trend: Vec<f64>,
    pub verdict: AdditivityVerdict,
    /// The pair attaining `min_ratio`.
    pub witness: Option<Witness>,
    pub threshold: f64,
    pub forward_classes: usize,
    pub backward_classes: usize,
}

struct Class {
    letter: usize,
    len: usize,
    vector: Vec<f64>,
    total: f64,
    word: Vec<usize>,
}

fn normalize(v: Vec<BigUint>) -> Vec<BigUint> {
    let g = v.iter().fold(BigUint::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        v
    } else {
        v.into_iter().map(|c| c / &g).collect()
    }
}

fn to_class(letter: usize, len: usize, v: &[BigUint], word: Vec<usize>) -> Class {
    let vector: Vec<f64> = v.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
    Class {
        letter,
        len,
        total: vector.iter().sum(),
        vector,
        word,
    }
}

/// Classes of words of lengths `1..=max_len` by `(end letter, direction)`.
///
/// Forward classes extend words to the right; backward classes extend them to
/// the left and carry counts of lifts starting at each fiber symbol.
fn classes(fs: &FactorSystem, max_len: usize, forward: bool, budget: u64) -> Result<Vec<Class>> {
    let q = fs.image_size();
    let mut out = Vec::new();
    let mut layer: Vec<(usize, Vec<BigUint>, Vec<usize>)> = (0..q)
        .map(|b| (b, vec![BigUint::from(1u32); fs.fiber(b).len()], vec![b]))
        .collect();
    for len in 1..=max_len {
        for (b, v, w) in &layer {
            out.push(to_class(*b, len, v, w.clone()));
        }
        if out.len() as u64 > budget {
            return Err(Error::NodeBudget {
                budget,
                detail: "too many concatenation classes".into(),
            });
        }
        if len == max_len {
            break;
        }
        let mut seen: HashMap<(usize, Vec<BigUint>), ()> = HashMap::new();
        let mut next = Vec::new();
        for (b, v, w) in &layer {
            for c in 0..q {
                let v2 = if forward {
                    fs.block(*b, c).apply(v)
                } else {
                    fs.block(c, *b).apply_right(v)
                };
                if v2.iter().all(Zero::is_zero) {
                    continue;
                }
                let v2 = normalize(v2);
                if seen.insert((c, v2.clone()), ()).is_none() {
                    let mut w2 = w.clone();
                    if forward {
                        w2.push(c);
                    } else {
                        w2.insert(0, c);
                    }
                    next.push((c, v2, w2));
                }
            }
        }
        layer = next;
    }
    Ok(out)
}

#[derive(Clone)]
struct Partial {
    min: f64,
    max: f64,
    argmin: Option<(usize, usize)>,
    trend: Vec<f64>,
}

/// Scans all allowed concatenations `uv` with `|u|, |v| <= max_len`.
pub fn additivity_scan(fs: &FactorSystem, max_len: usize, budget: u64) -> Result<AdditivityScanReport> {
    additivity_scan_with_threshold(fs, max_len, DEFAULT_REFUTATION_THRESHOLD, budget)
}

pub fn additivity_scan_with_threshold(
    fs: &FactorSystem,
    max_len: usize,
    threshold: f64,
    budget: u64,
) -> Result<AdditivityScanReport> {
    if max_len == 0 {
        return Err(Error::Precondition("additivity scan needs L >= 1".into()));
    }
    let fwd = classes(fs, max_len, true, budget)?;
    let bwd = classes(fs, max_len, false, budget)?;
    if (fwd.len() as u128) * (bwd.len() as u128) > budget as u128 * 64 {
        return Err(Error::NodeBudget {
            budget,
            detail: format!("{} x {} concatenation class pairs", fwd.len(), bwd.len()),
        });
    }
    let partials: Vec<Partial> = fwd
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut p = Partial {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
                argmin: None,
                trend: vec![f64::INFINITY; max_len],
            };
            for (j, g) in bwd.iter().enumerate() {
                let block = fs.block(f.letter, g.letter);
                let mut num = 0.0;
                for (r, &x) in f.vector.iter().enumerate() {
                    if x == 0.0 {
                        continue;
                    }
                    for &c in block.successors(r) {
                        num += x * g.vector[c];
                    }
                }
                if num == 0.0 {
                    continue;
                }
                let ratio = num / (f.total * g.total);
                if ratio < p.min {
                    p.min = ratio;
                    p.argmin = Some((i, j));
                }
                p.max = p.max.max(ratio);
                let k = f.len.max(g.len) - 1;
                p.trend[k] = p.trend[k].min(ratio);
            }
            p
        })
        .collect();
    let mut total = Partial {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: None,
        trend: vec![f64::INFINITY; max_len],
    };
    for p in partials {
        if p.min < total.min {
            total.min = p.min;
            total.argmin = p.argmin;
        }
        total.max = total.max.max(p.max);
        for (t, x) in total.trend.iter_mut().zip(&p.trend) {
            *t = t.min(*x);
        }
    }
    let witness = total.argmin.map(|(i, j)| Witness {
        u: fwd[i].word.clone(),
        v: bwd[j].word.clone(),
        ratio: total.min,
    });
    let decreasing = max_len >= DECREASING_RUN
        && total.trend[max_len - DECREASING_RUN..]
            .windows(2)
            .all(|w| w[1] < w[0]);
    let verdict = if decreasing && total.min < threshold && witness.is_some() {
        AdditivityVerdict::RefutedUpTo(max_len)
    } else {
        AdditivityVerdict::ConsistentWithAlmostAdditive
    };
    Ok(AdditivityScanReport {
        max_len,
        min_ratio: total.min,
        max_ratio: total.max,
        min_trend: total.trend,
        verdict,
        witness,
        threshold,
        forward_classes: fwd.len(),
        backward_classes: bwd.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniquenessVerdict {
    /// A singleton clump gives a unique ergodic measure of full dimension.
    UniqueFullDimensionMeasure,
    /// Unique, Gibbs and mixing provided the potential is almost additive,
    /// which the scan supports but does not prove.
    ConditionalOnAlmostAdditivity,
    /// The equilibrium state on the image is unique; uniqueness of its lift
    /// is not established.
    EquilibriumStateOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub singleton_clump: bool,
    pub clumps: Vec<String>,
    pub almost_additive_evidence: AdditivityVerdict,
    pub verdict: UniquenessVerdict,
    pub conclusion: String,
}

/// Combines the singleton-clump test with the additivity evidence.
pub fn uniqueness_report(fs: &FactorSystem, scan: &AdditivityScanReport) -> Result<UniquenessReport> {
    if !validate_sft(fs.source()).mixing {
        return Err(Error::NonMixing);
    }
    let clumps: Vec<String> = singleton_clumps(fs)
        .into_iter()
        .map(|b| fs.image_name(b).to_string())
        .collect();
    let singleton_clump = !clumps.is_empty();
    let (verdict, conclusion) = if singleton_clump {
        (
            UniquenessVerdict::UniqueFullDimensionMeasure,
            "unique invariant ergodic measure of full dimension (singleton clump)",
        )
    } else if scan.verdict == AdditivityVerdict::ConsistentWithAlmostAdditive {
        (
            UniquenessVerdict::ConditionalOnAlmostAdditivity,
            "unique measure of full dimension, Gibbs and mixing, conditional on almost additivity (numerical evidence only, not a proof)",
        )
    } else {
        (
            UniquenessVerdict::EquilibriumStateOnly,
            "the equilibrium state of the potential on the image is unique; uniqueness of the measure of full dimension is not established",
        )
    };
    Ok(UniquenessReport {
        singleton_clump,
        clumps,
        almost_additive_evidence: scan.verdict,
        verdict,
        conclusion: conclusion.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{image_words, preimage_count, DEFAULT_NODE_BUDGET};
    use crate::fixtures;
    use crate::sft::Sft;

    const B: u64 = DEFAULT_NODE_BUDGET;

    fn f(x: BigUint) -> f64 {
        x.to_f64().unwrap()
    }

    #[test]
    fn class_scan_matches_direct_enumeration() {
        for (name, fs) in fixtures::all() {
            let l = 5;
            let scan = additivity_scan(&fs, l, B).unwrap();
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut trend = vec![f64::INFINITY; l];
            for a in 1..=l {
                for b in 1..=l {
                    for u in image_words(&fs, a) {
                        for v in image_words(&fs, b) {
                            let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
                            let c = preimage_count(&fs, &uv).unwrap();
                            if c.is_zero() {
                                continue;
                            }
                            let r = f(c) / (f(preimage_count(&fs, &u).unwrap()) * f(preimage_count(&fs, &v).unwrap()));
                            min = min.min(r);
                            max = max.max(r);
                            trend[a.max(b) - 1] = trend[a.max(b) - 1].min(r);
                        }
                    }
                }
            }
            assert!((scan.min_ratio - min).abs() < 1e-15, "{name}");
            assert!((scan.max_ratio - max).abs() < 1e-15, "{name}");
            for (x, y) in scan.min_trend.iter().zip(&trend) {
                assert!((x - y).abs() < 1e-15, "{name}");
            }
            assert!(scan.max_ratio <= 1.0);
            let w = scan.witness.unwrap();
            let uv: Vec<usize> = w.u.iter().chain(&w.v).copied().collect();
            let r = f(preimage_count(&fs, &uv).unwrap())
                / (f(preimage_count(&fs, &w.u).unwrap()) * f(preimage_count(&fs, &w.v).unwrap()));
            assert!((r - w.ratio).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_ratios_are_one() {
        let fs = FactorSystem::identity(Sft::full(3).unwrap());
        let scan = additivity_scan(&fs, 6, B).unwrap();
        assert_eq!((scan.min_ratio, scan.max_ratio), (1.0, 1.0));
        assert_eq!(scan.verdict, AdditivityVerdict::ConsistentWithAlmostAdditive);
        let u = uniqueness_report(&fs, &scan).unwrap();
        assert_eq!(u.verdict, UniquenessVerdict::UniqueFullDimensionMeasure);
    }

    #[test]
    fn verdict_labels() {
        assert_eq!(AdditivityVerdict::RefutedUpTo(12).to_string(), "refuted-up-to-12");
        assert_eq!(
            serde_json::to_string(&AdditivityVerdict::ConsistentWithAlmostAdditive).unwrap(),
            "\"consistent-with-almost-additive\""
        );
    }
}
