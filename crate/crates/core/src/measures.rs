//! Finite-depth cylinder masses of the measures `nu_l` and their Cesàro
//! averages, and the Gibbs envelope for `nu_l`.
//!
//! `nu_l([w]) = T(v_w, l - |w|) / S_l`, where `T` is the subtree sum of the
//! counting engine and `v_w` the fiber vector of `w`.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::counting::{FiberVector, LogReal, SubtreeEngine, SumMode};
use crate::error::{Error, Result};
use crate::factor::FactorSystem;
use crate::pressure::{pressure_series, PressureEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DistributionKind {
    NuMarginal { l: usize },
    Cesaro { l: usize, n_terms: usize },
}

/// Probabilities of the depth-`depth` cylinders, words in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderDistribution {
    pub depth: usize,
    pub kind: DistributionKind,
    pub masses: Vec<(Vec<usize>, f64)>,
}

impl CylinderDistribution {
    pub fn total(&self) -> f64 {
        self.masses.iter().map(|(_, p)| p).sum()
    }

    pub fn mass(&self, word: &[usize]) -> f64 {
        self.masses
            .binary_search_by(|(w, _)| w.as_slice().cmp(word))
            .map(|i| self.masses[i].1)
            .unwrap_or(0.0)
    }
}

/// Every image word of length `n` with its fiber vector, lexicographically.
fn words_with_vectors(fs: &FactorSystem, n: usize) -> Vec<(Vec<usize>, FiberVector)> {
    let mut layer: Vec<(Vec<usize>, FiberVector)> = (0..fs.image_size())
        .map(|b| (vec![b], FiberVector::start(fs, b)))
        .collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for (w, v) in &layer {
            for c in 0..fs.image_size() {
                if let Some(v2) = v.step(fs, c) {
                    let mut w2 = w.clone();
                    w2.push(c);
                    next.push((w2, v2));
                }
            }
        }
        layer = next;
    }
    layer
}

type Marginal = (LogReal, Vec<(Vec<usize>, FiberVector, LogReal)>);
type ShiftedMasses = (Vec<Vec<usize>>, Vec<Vec<f64>>);
type ExactMarginal = (Vec<(Vec<usize>, BigUint)>, BigUint);

/// `log nu_l([w])` for every `w` of length `n`.
fn log_marginal(
    engine: &mut SubtreeEngine,
    fs: &FactorSystem,
    l: usize,
    n: usize,
) -> Result<Marginal> {
    let s_l = engine.partition_sum(l)?.value;
    let mut out = Vec::new();
    for (w, v) in words_with_vectors(fs, n) {
        let t = engine.subtree(&v, l - n)?.value;
        out.push((w, v, t / s_l));
    }
    Ok((s_l, out))
}

/// Marginal of `nu_l` on cylinders of length `n <= l`.
pub fn nu_marginal(
    fs: &FactorSystem,
    theta: f64,
    l: usize,
    n: usize,
    budget: u64,
) -> Result<CylinderDistribution> {
    if n == 0 || n > l {
        return Err(Error::Precondition(format!(
            "marginal depth must satisfy 1 <= n <= l, got n = {n}, l = {l}"
        )));
    }
    let mut engine = SubtreeEngine::new(fs, theta, SumMode::Collapsed, budget)?;
    let (_, rows) = log_marginal(&mut engine, fs, l, n)?;
    Ok(CylinderDistribution {
        depth: n,
        kind: DistributionKind::NuMarginal { l },
        masses: rows.into_iter().map(|(w, _, p)| (w, p.to_f64())).collect(),
    })
}

/// Observed Gibbs ratios of `nu_l` against the envelope `[C1, C2]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsEnvelope {
    pub l: usize,
    pub n_max: usize,
    /// `e^(-M P_hi) / K~^2`.
    pub c1: f64,
    /// `K K~ e^(-M P_lo)`.
    pub c2: f64,
    /// Extremes of `nu_l([w]) e^(|w| P) / |pi^-1[w]|^theta` at `P = P_hi`.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest ratio at `P = P_lo`, the conservative side for `C2`.
    pub max_ratio_at_lower: f64,
    /// Smallest ratio at `P = P_lo`.
    pub min_ratio_at_lower: f64,
    pub cylinders: usize,
    /// No cylinder certainly violates the envelope.
    pub contained: bool,
    pub pressure: PressureEstimate,
}

/// Checks `C1 <= nu_l([w]) e^(|w| P) |pi^-1[w]|^-theta <= C2` for all `w`
/// with `1 <= |w| <= n_max`.
///
/// The ratio is increasing in `P`, so it is evaluated at both ends of the
/// pressure interval: a violation is reported only if the ratio at `P_hi`
/// falls below `C1` or the ratio at `P_lo` exceeds `C2`.
pub fn gibbs_scan(
    fs: &FactorSystem,
    theta: f64,
    l: usize,
    n_max: usize,
    budget: u64,
) -> Result<GibbsEnvelope> {
    let series = pressure_series(fs, theta, l, budget)?;
    let c = series.constants.ok_or(Error::NonMixing)?;
    let m = c.mixing_index;
    if n_max == 0 || l <= n_max + m {
        return Err(Error::Precondition(format!(
            "Gibbs scan needs l > n_max + M, got l = {l}, n_max = {n_max}, M = {m}"
        )));
    }
    let pressure = series.interval(l)?;
    let (p_lo, p_hi) = (pressure.lower, pressure.upper);
    let kt = c.log_k_tilde;
    let log_c1 = -(m as f64) * p_hi - 2.0 * (kt.log() + kt.err());
    let log_c2 = c.log_k.log() + c.log_k.err() + kt.log() + kt.err() - (m as f64) * p_lo;

    let mut engine = SubtreeEngine::new(fs, theta, SumMode::Collapsed, budget)?;
    let (mut min_hi, mut max_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_lo, mut max_lo) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut contained = true;
    let mut cylinders = 0;
    for n in 1..=n_max {
        let (_, rows) = log_marginal(&mut engine, fs, l, n)?;
        for (_, v, nu) in rows {
            cylinders += 1;
            let weight = LogReal::from_count(&v.total()).powf(theta);
            let base = nu / weight;
            let r_hi = base.log() + n as f64 * p_hi;
            let r_lo = base.log() + n as f64 * p_lo;
            min_hi = min_hi.min(r_hi);
            max_hi = max_hi.max(r_hi);
            min_lo = min_lo.min(r_lo);
            max_lo = max_lo.max(r_lo);
            if r_hi + base.err() < log_c1 || r_lo - base.err() > log_c2 {
                contained = false;
            }
        }
    }
    Ok(GibbsEnvelope {
        l,
        n_max,
        c1: log_c1.exp(),
        c2: log_c2.exp(),
        min_ratio: min_hi.exp(),
        max_ratio: max_hi.exp(),
        max_ratio_at_lower: max_lo.exp(),
        min_ratio_at_lower: min_lo.exp(),
        cylinders,
        contained,
        pressure,
    })
}

/// Normalized fiber vectors of all words of length `i`, each weighted by the
/// sum of `c^theta` over the words sharing it, `c` the vector's content.
fn forward_layers(
    fs: &FactorSystem,
    theta: f64,
    depth: usize,
) -> Vec<Vec<(FiberVector, LogReal)>> {
    let mut layers: Vec<Vec<(FiberVector, LogReal)>> = Vec::with_capacity(depth + 1);
    layers.push(Vec::new());
    if depth == 0 {
        return layers;
    }
    layers.push(
        (0..fs.image_size())
            .map(|b| (FiberVector::start(fs, b), LogReal::ONE))
            .collect(),
    );
    for _ in 1..depth {
        let prev = layers.last().expect("nonempty");
        let mut index: HashMap<FiberVector, usize> = HashMap::new();
        let mut terms: Vec<(FiberVector, Vec<LogReal>)> = Vec::new();
        for (v, wt) in prev {
            for c in 0..fs.image_size() {
                if let Some(next) = v.step(fs, c) {
                    let (g, unit) = next.normalized();
                    let w = *wt * LogReal::from_count(&g).powf(theta);
                    let slot = *index.entry(unit.clone()).or_insert_with(|| {
                        terms.push((unit, Vec::new()));
                        terms.len() - 1
                    });
                    terms[slot].1.push(w);
                }
            }
        }
        layers.push(
            terms
                .into_iter()
                .map(|(v, ws)| (v, LogReal::sum(&ws)))
                .collect(),
        );
    }
    layers
}

/// Masses of `sigma^i nu_l` on the cylinders of length `p`, for `i = 0..=max_shift`.
fn shifted_masses(
    fs: &FactorSystem,
    theta: f64,
    l: usize,
    p: usize,
    max_shift: usize,
    budget: u64,
) -> Result<ShiftedMasses> {
    let mut engine = SubtreeEngine::new(fs, theta, SumMode::Collapsed, budget)?;
    let s_l = engine.partition_sum(l)?.value;
    let words: Vec<Vec<usize>> = words_with_vectors(fs, p).into_iter().map(|(w, _)| w).collect();
    let layers = forward_layers(fs, theta, max_shift);
    let mut out = Vec::with_capacity(max_shift + 1);
    for (i, layer) in layers.iter().enumerate() {
        let mut row = Vec::with_capacity(words.len());
        for w in &words {
            let mut terms = Vec::new();
            if i == 0 {
                let v = crate::counting::fiber_vector(fs, w).expect("word occurs");
                terms.push(engine.subtree(&v, l - p)?.value);
            } else {
                for (u, wt) in layer {
                    let mut v = Some(u.clone());
                    for &b in w {
                        v = v.and_then(|x| x.step(fs, b));
                    }
                    if let Some(v) = v {
                        terms.push(*wt * engine.subtree(&v, l - i - p)?.value);
                    }
                }
            }
            row.push((LogReal::sum(&terms) / s_l).to_f64());
        }
        out.push(row);
    }
    Ok((words, out))
}

/// Invariance defect `max_w |mu(sigma^-1 [w]) - mu([w])|` over words of length
/// `probe_depth`, for `mu = (1/N) sum_{i<N} sigma^i nu_l`, `N = n_terms`.
pub fn cesaro_defect(
    fs: &FactorSystem,
    theta: f64,
    l: usize,
    n_terms: usize,
    probe_depth: usize,
    budget: u64,
) -> Result<f64> {
    if n_terms == 0 || probe_depth == 0 || l < n_terms + probe_depth {
        return Err(Error::Precondition(format!(
            "Cesàro defect needs n_terms, probe_depth >= 1 and l >= n_terms + probe_depth, \
             got l = {l}, n_terms = {n_terms}, probe_depth = {probe_depth}"
        )));
    }
    let (_, rows) = shifted_masses(fs, theta, l, probe_depth, n_terms, budget)?;
    // mu(sigma^-1 [w]) - mu([w]) telescopes to (sigma^N nu [w] - nu [w]) / N.
    let n = n_terms as f64;
    Ok(rows[0]
        .iter()
        .zip(&rows[n_terms])
        .map(|(a, b)| (b - a).abs() / n)
        .fold(0.0, f64::max))
}

/// Cylinder masses of the Cesàro average `(1/N) sum_{i<N} sigma^i nu_l`.
pub fn cesaro_distribution(
    fs: &FactorSystem,
    theta: f64,
    l: usize,
    n_terms: usize,
    depth: usize,
    budget: u64,
) -> Result<CylinderDistribution> {
    if n_terms == 0 || depth == 0 || l < n_terms + depth {
        return Err(Error::Precondition(format!(
            "Cesàro average needs l >= n_terms + depth, got l = {l}, n_terms = {n_terms}, depth = {depth}"
        )));
    }
    let (words, rows) = shifted_masses(fs, theta, l, depth, n_terms - 1, budget)?;
    let n = n_terms as f64;
    let masses = words
        .into_iter()
        .enumerate()
        .map(|(k, w)| (w, rows.iter().map(|r| r[k]).sum::<f64>() / n))
        .collect();
    Ok(CylinderDistribution {
        depth,
        kind: DistributionKind::Cesaro { l, n_terms },
        masses,
    })
}

/// Exact `nu_l` masses at `theta = 1`, as (numerator, common denominator).
pub fn nu_marginal_exact(
    fs: &FactorSystem,
    l: usize,
    n: usize,
    budget: u64,
) -> Result<ExactMarginal> {
    if n == 0 || n > l {
        return Err(Error::Precondition("marginal depth must satisfy 1 <= n <= l".into()));
    }
    let mut engine = SubtreeEngine::new(fs, 1.0, SumMode::Collapsed, budget)?;
    let s_l = engine.partition_sum(l)?.exact.expect("integer path at theta = 1");
    let mut out = Vec::new();
    for (w, v) in words_with_vectors(fs, n) {
        let t = engine.subtree(&v, l - n)?.exact.expect("integer path at theta = 1");
        out.push((w, t));
    }
    Ok((out, s_l))
}
