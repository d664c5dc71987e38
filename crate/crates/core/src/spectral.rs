//! Perron roots and growth rates of lift counts along periodic image points.

use num_bigint::BigUint;
use serde::Serialize;

use crate::counting::{dn_series, fiber_vector, LogReal};
use crate::error::{Error, Result};
use crate::factor::{EventuallyPeriodicPoint, FactorSystem};
use crate::sft::{strongly_connected, validate_sft};

pub const DEFAULT_ITERATION_CAP: usize = 100_000;
pub const RAYLEIGH_TOLERANCE: f64 = 1e-13;

/// Spectral radius with its Collatz-Wielandt bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerronEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Spectral radius of a nonnegative square matrix.
pub fn perron_eigenvalue(matrix: &[Vec<f64>]) -> Result<PerronEstimate> {
    perron_eigenvalue_with_cap(matrix, DEFAULT_ITERATION_CAP)
}

/// Power iteration on `B + I` for each strongly connected block `B` of the
/// matrix, started from the all-ones vector; the identity shift makes every
/// irreducible block primitive.
pub fn perron_eigenvalue_with_cap(matrix: &[Vec<f64>], cap: usize) -> Result<PerronEstimate> {
    let k = matrix.len();
    if k == 0 || matrix.iter().any(|r| r.len() != k) {
        return Err(Error::Precondition("matrix must be square and nonempty".into()));
    }
    if matrix.iter().flatten().any(|&a| a.is_nan() || a < 0.0 || a.is_infinite()) {
        return Err(Error::Precondition("matrix entries must be finite and nonnegative".into()));
    }
    if matrix.iter().flatten().all(|&a| a == 0.0) {
        return Err(Error::Precondition("matrix is zero".into()));
    }
    let succ: Vec<Vec<usize>> = matrix
        .iter()
        .map(|r| (0..k).filter(|&j| r[j] > 0.0).collect())
        .collect();
    let mut best = PerronEstimate {
        value: 0.0,
        lower: 0.0,
        upper: 0.0,
        iterations: 0,
        converged: true,
    };
    for comp in strongly_connected(&succ) {
        let cyclic = comp.len() > 1 || matrix[comp[0]][comp[0]] > 0.0;
        if !cyclic {
            continue;
        }
        let sub: Vec<Vec<f64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| matrix[i][j]).collect())
            .collect();
        let e = irreducible_radius(&sub, cap);
        if e.value > best.value {
            best = PerronEstimate {
                iterations: best.iterations.max(e.iterations),
                converged: best.converged && e.converged,
                ..e
            };
        } else {
            best.iterations = best.iterations.max(e.iterations);
            best.converged &= e.converged;
            best.upper = best.upper.max(e.upper);
        }
    }
    Ok(best)
}

fn irreducible_radius(a: &[Vec<f64>], cap: usize) -> PerronEstimate {
    let k = a.len();
    let mut x = vec![1.0; k];
    let mut prev = f64::NAN;
    let (mut lo, mut hi, mut est) = (0.0, f64::INFINITY, 0.0);
    for it in 1..=cap {
        let y: Vec<f64> = (0..k)
            .map(|i| x[i] + (0..k).map(|j| a[i][j] * x[j]).sum::<f64>())
            .collect();
        lo = f64::INFINITY;
        hi = 0.0;
        for i in 0..k {
            let r = y[i] / x[i];
            lo = f64::min(lo, r);
            hi = f64::max(hi, r);
        }
        let xy: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
        let xx: f64 = x.iter().map(|p| p * p).sum();
        est = xy / xx;
        let scale = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / scale).collect();
        if (est - prev).abs() < RAYLEIGH_TOLERANCE || hi - lo < RAYLEIGH_TOLERANCE {
            return PerronEstimate {
                value: est - 1.0,
                lower: lo - 1.0,
                upper: hi - 1.0,
                iterations: it,
                converged: true,
            };
        }
        prev = est;
    }
    PerronEstimate {
        value: est - 1.0,
        lower: lo - 1.0,
        upper: hi - 1.0,
        iterations: cap,
        converged: false,
    }
}

/// Growth rates of lift counts along an eventually periodic image point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompensationEstimate {
    pub point: EventuallyPeriodicPoint,
    /// `log rho(P) / |period|`, `P` the product of fiber blocks around the period.
    pub spectral: f64,
    pub spectral_bracket: (f64, f64),
    /// `log |D_n(y)| / n` at `n = series_n`.
    pub series: f64,
    pub series_n: usize,
    /// `log |alphabet of X|`, an upper bound for both values.
    pub bound: f64,
}

/// Product of fiber blocks once around the period, restricted to the symbols
/// reachable from lifts of the preperiod.
enum PeriodProduct {
    Exact(Vec<Vec<u128>>),
    Scaled(Vec<Vec<f64>>, f64),
}

fn period_product(fs: &FactorSystem, period: &[usize]) -> PeriodProduct {
    let d = fs.fiber(period[0]).len();
    let mut exact: Option<Vec<Vec<u128>>> = Some(
        (0..d)
            .map(|i| (0..d).map(|j| u128::from(i == j)).collect())
            .collect(),
    );
    let mut float: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut log_scale = 0.0;
    for (t, &b) in period.iter().enumerate() {
        let c = period[(t + 1) % period.len()];
        let block = fs.block(b, c);
        let cols = block.cols();
        exact = exact.and_then(|m| {
            m.iter()
                .map(|row| {
                    let mut out = vec![0u128; cols];
                    for (r, &v) in row.iter().enumerate() {
                        if v == 0 {
                            continue;
                        }
                        for &j in block.successors(r) {
                            out[j] = out[j].checked_add(v)?;
                        }
                    }
                    Some(out)
                })
                .collect()
        });
        float = float
            .iter()
            .map(|row| {
                let mut out = vec![0.0; cols];
                for (r, &v) in row.iter().enumerate() {
                    for &j in block.successors(r) {
                        out[j] += v;
                    }
                }
                out
            })
            .collect();
        let max = float.iter().flatten().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            log_scale += max.ln();
            for row in &mut float {
                for v in row {
                    *v /= max;
                }
            }
        }
    }
    match exact {
        Some(m) => PeriodProduct::Exact(m),
        None => PeriodProduct::Scaled(float, log_scale),
    }
}

pub const DEFAULT_SERIES_DEPTH: usize = 64;

/// Spectral and series estimates of `limsup (1/n) log |pi^-1[y_1 ... y_n]|`
/// at an eventually periodic point.
pub fn compensation_at_periodic(
    fs: &FactorSystem,
    y: &EventuallyPeriodicPoint,
    series_n: usize,
) -> Result<CompensationEstimate> {
    if !validate_sft(fs.source()).irreducible {
        return Err(Error::Precondition("X must be irreducible".into()));
    }
    if series_n == 0 {
        return Err(Error::Precondition("series depth must be >= 1".into()));
    }
    let period = y.period();
    let (matrix, log_scale) = match period_product(fs, period) {
        PeriodProduct::Exact(m) => (
            m.iter()
                .map(|r| r.iter().map(|&v| v as f64).collect::<Vec<f64>>())
                .collect::<Vec<_>>(),
            0.0,
        ),
        PeriodProduct::Scaled(m, s) => (m, s),
    };
    if matrix.iter().flatten().all(|&v| v == 0.0) {
        return Err(Error::Precondition(
            "fiber-block product around the period is zero; the tail has no lift".into(),
        ));
    }

    // Restrict to symbols of the first period fiber reachable from lifts of
    // preperiod . period[0].
    let mut head = y.preperiod().to_vec();
    head.push(period[0]);
    let start = fiber_vector(fs, &head).ok_or_else(|| {
        Error::Precondition("the preperiod followed by the period has no lift".into())
    })?;
    let d = matrix.len();
    let mut reach: Vec<bool> = start.counts.iter().map(|c| c.bits() > 0).collect();
    let mut stack: Vec<usize> = (0..d).filter(|&i| reach[i]).collect();
    while let Some(i) = stack.pop() {
        for j in 0..d {
            if matrix[i][j] > 0.0 && !reach[j] {
                reach[j] = true;
                stack.push(j);
            }
        }
    }
    let idx: Vec<usize> = (0..d).filter(|&i| reach[i]).collect();
    let sub: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| matrix[i][j]).collect())
        .collect();
    let p = perron_eigenvalue(&sub)?;
    let k = period.len() as f64;
    let spectral = (p.value.ln() + log_scale) / k;
    let bracket = (
        (p.lower.max(0.0).ln() + log_scale) / k,
        (p.upper.ln() + log_scale) / k,
    );

    let dn = dn_series(fs, y, series_n)?;
    let last: &BigUint = dn.last().expect("series_n >= 1");
    let series = LogReal::from_count(last).log() / series_n as f64;
    let bound = (fs.source().alphabet_size() as f64).ln();
    Ok(CompensationEstimate {
        point: y.clone(),
        spectral,
        spectral_bracket: bracket,
        series,
        series_n,
        bound,
    })
}

/// Dense 0/1 matrix of a block as `f64`, mostly for tests.
pub fn block_matrix(fs: &FactorSystem, from: usize, to: usize) -> Vec<Vec<f64>> {
    fs.block(from, to).to_dense()
}
