//! Two-sided bounds on the pressure of `theta log |pi^-1[.]|` and on the
//! Hausdorff dimension of the carpet.
//!
//! With `M` the mixing index of `X`, `K = S_M` and `K'` the largest ratio
//! `S_l S_n / S_{l+n}` over `l + n <= 2M`, the constant `K~ = max(K, K')`
//! satisfies `S_{l+n} >= S_l S_n / K~` for all `l, n`. Together with
//! subadditivity of `log S_n` this gives
//! `(log S_n - log K~) / n <= P <= log S_n / n`.

use serde::Serialize;

use crate::carpet::{carpet_to_factor, CarpetSpec};
use crate::counting::{partition_series, LogReal, PartitionSum};
use crate::error::{Error, Result};
use crate::factor::FactorSystem;
use crate::sft::{validate_sft, StructureReport};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperadditiveConstants {
    pub mixing_index: usize,
    pub log_k: LogReal,
    pub log_k_prime: LogReal,
    pub log_k_tilde: LogReal,
}

impl SuperadditiveConstants {
    pub fn k(&self) -> f64 {
        self.log_k.to_f64()
    }

    pub fn k_prime(&self) -> f64 {
        self.log_k_prime.to_f64()
    }

    pub fn k_tilde(&self) -> f64 {
        self.log_k_tilde.to_f64()
    }
}

/// `log S_k` for `k = 1..`, as `series[k - 1]`.
fn log_s(series: &[PartitionSum], k: usize) -> LogReal {
    series[k - 1].value
}

fn constants_from_series(m: usize, series: &[PartitionSum]) -> SuperadditiveConstants {
    assert!(series.len() >= 2 * m);
    let log_k = log_s(series, m);
    let mut best: Option<LogReal> = None;
    for total in 2..=2 * m {
        for l in 1..total {
            let n = total - l;
            let r = log_s(series, l) * log_s(series, n) / log_s(series, total);
            if best.is_none_or(|b| r.log() > b.log()) {
                best = Some(r);
            }
        }
    }
    let log_k_prime = best.expect("at least one pair");
    let log_k_tilde = if log_k.log() >= log_k_prime.log() {
        log_k
    } else {
        log_k_prime
    };
    SuperadditiveConstants {
        mixing_index: m,
        log_k,
        log_k_prime,
        log_k_tilde,
    }
}

/// `S_1, S_2, ...` together with the structure of `X` and, when `X` is
/// mixing, the superadditivity constants.
#[derive(Debug, Clone)]
pub struct PressureSeries {
    pub theta: f64,
    pub structure: StructureReport,
    pub sums: Vec<PartitionSum>,
    pub constants: Option<SuperadditiveConstants>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub n: usize,
    pub theta: f64,
    pub log_sn: LogReal,
    pub lower: f64,
    pub upper: f64,
    pub constants: SuperadditiveConstants,
}

/// Computes `S_1 .. S_N`, `N = max(n_max, 2M)` when `X` is mixing.
pub fn pressure_series(
    fs: &FactorSystem,
    theta: f64,
    n_max: usize,
    budget: u64,
) -> Result<PressureSeries> {
    if n_max == 0 {
        return Err(Error::Precondition("depth must be >= 1".into()));
    }
    let structure = validate_sft(fs.source());
    match structure.mixing_index {
        Some(m) if structure.mixing => {
            let sums = partition_series(fs, theta, n_max.max(2 * m), budget)?;
            let constants = Some(constants_from_series(m, &sums));
            Ok(PressureSeries {
                theta,
                structure,
                sums,
                constants,
            })
        }
        _ => Ok(PressureSeries {
            theta,
            structure,
            sums: partition_series(fs, theta, n_max, budget)?,
            constants: None,
        }),
    }
}

impl PressureSeries {
    pub fn max_depth(&self) -> usize {
        self.sums.len()
    }

    pub fn log_sn(&self, n: usize) -> LogReal {
        log_s(&self.sums, n)
    }

    /// `log S_n / n`, rounded up.
    pub fn upper(&self, n: usize) -> f64 {
        let s = self.log_sn(n);
        let u = (s.log() + s.err()) / n as f64;
        u + EPS * u.abs()
    }

    /// `(log S_n - log K~) / n`, rounded down.
    pub fn lower(&self, n: usize) -> Result<f64> {
        let c = self.constants.ok_or(Error::NonMixing)?;
        let s = self.log_sn(n);
        let k = c.log_k_tilde;
        let v = (s.log() - s.err() - k.log() - k.err()) / n as f64;
        Ok(v - EPS * v.abs())
    }

    pub fn interval(&self, n: usize) -> Result<PressureEstimate> {
        let constants = self.constants.ok_or(Error::NonMixing)?;
        if n == 0 || n > self.max_depth() {
            return Err(Error::Precondition(format!(
                "depth {n} outside the computed range 1..={}",
                self.max_depth()
            )));
        }
        Ok(PressureEstimate {
            n,
            theta: self.theta,
            log_sn: self.log_sn(n),
            lower: self.lower(n)?,
            upper: self.upper(n),
            constants,
        })
    }
}

/// The superadditivity constants of `(X, pi)` at exponent `theta`.
pub fn superadditive_constants(
    fs: &FactorSystem,
    theta: f64,
    budget: u64,
) -> Result<SuperadditiveConstants> {
    pressure_series(fs, theta, 1, budget)?
        .constants
        .ok_or(Error::NonMixing)
}

/// `[lower, upper]` for the pressure from `S_n`.
pub fn pressure_interval(
    fs: &FactorSystem,
    theta: f64,
    n: usize,
    budget: u64,
) -> Result<PressureEstimate> {
    let series = pressure_series(fs, theta, n, budget)?;
    series.interval(n)
}

/// One failed instance of an inequality among the `S_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub inequality: &'static str,
    pub l: usize,
    pub n: usize,
    /// Amount by which the inequality fails, in the log domain.
    pub excess: f64,
}

/// Results of checking the superadditivity and subadditivity inequalities
/// for every pair within the computed range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub max_depth: usize,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

/// Absolute slack beyond the tracked rounding errors when comparing logs.
pub const COMPARISON_SLACK: f64 = 1e-12;

/// Checks, for all `l, n` with `l + n <= max_depth`:
///
/// * `log S_{l+n} <= log S_l + log S_n`;
/// * `S_{l+n} >= S_l S_n / K~`;
/// * `S_{l+n} >= S_n S_{l-M}` for `l > M`;
/// * `S_l <= K S_{l-M}` for `l > M`.
pub fn check_inequalities(series: &PressureSeries) -> InequalityCheck {
    let n_max = series.max_depth();
    let mut out = InequalityCheck {
        max_depth: n_max,
        checked: 0,
        violations: Vec::new(),
    };
    // Holds `lhs <= rhs` up to errors.
    let mut test = |name, l, n, lhs: LogReal, rhs: LogReal| {
        out.checked += 1;
        let excess = lhs.log() - rhs.log();
        if excess > lhs.err() + rhs.err() + COMPARISON_SLACK {
            out.violations.push(Violation {
                inequality: name,
                l,
                n,
                excess,
            });
        }
    };
    let s = |k| series.log_sn(k);
    for total in 2..=n_max {
        for l in 1..total {
            let n = total - l;
            test("subadditivity", l, n, s(total), s(l) * s(n));
            if let Some(c) = series.constants {
                test(
                    "superadditivity with K~",
                    l,
                    n,
                    s(l) * s(n) / c.log_k_tilde,
                    s(total),
                );
                let m = c.mixing_index;
                if l > m {
                    let tail = if l - m == 0 { LogReal::ONE } else { s(l - m) };
                    test("S_(l+n) >= S_n S_(l-M)", l, n, s(n) * tail, s(total));
                }
            }
        }
    }
    if let Some(c) = series.constants {
        let m = c.mixing_index;
        for l in m + 1..=n_max {
            test("S_l <= K S_(l-M)", l, 0, s(l), c.log_k * s(l - m));
        }
    }
    out
}

/// `log_m sum_j t_j^(log_l m)` for a carpet with every transition allowed.
pub fn mcmullen_closed_form(spec: &CarpetSpec) -> Result<f64> {
    if !spec.is_full() {
        return Err(Error::NotFullShift);
    }
    let theta = spec.theta();
    let sum: f64 = spec
        .column_counts()
        .iter()
        .filter(|&&t| t > 0)
        .map(|&t| (t as f64).powf(theta))
        .sum();
    Ok(sum.ln() / (spec.m() as f64).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub alpha: f64,
    pub theta: f64,
    pub n: usize,
    pub log_sn: LogReal,
    pub pressure_lower: Option<f64>,
    pub pressure_upper: f64,
    /// Absent when `X` is not mixing.
    pub lower: Option<f64>,
    pub upper: f64,
    pub closed_form: Option<f64>,
    pub constants: Option<SuperadditiveConstants>,
    pub structure: StructureReport,
    pub warnings: Vec<String>,
}

/// Dimension interval of a carpet from its partition sums up to depth `n`.
pub fn hausdorff_dimension(spec: &CarpetSpec, n: usize, budget: u64) -> Result<DimensionEstimate> {
    let (fs, alpha) = carpet_to_factor(spec)?;
    let series = pressure_series(&fs, spec.theta(), n, budget)?;
    dimension_from_series(spec, alpha, &series, n)
}

/// Converts a pressure series into a dimension estimate at depth `n`.
pub fn dimension_from_series(
    spec: &CarpetSpec,
    alpha: f64,
    series: &PressureSeries,
    n: usize,
) -> Result<DimensionEstimate> {
    let log_m = (spec.m() as f64).ln();
    let mut warnings = Vec::new();
    let pressure_upper = series.upper(n);
    let pressure_lower = match series.lower(n) {
        Ok(v) => Some(v),
        Err(Error::NonMixing) => {
            warnings.push(
                "X is not topologically mixing: only the subadditive upper bound is reported"
                    .to_string(),
            );
            None
        }
        Err(e) => return Err(e),
    };
    let check = check_inequalities(series);
    for v in &check.violations {
        warnings.push(format!(
            "inequality `{}` fails at l = {}, n = {} by {:.3e}",
            v.inequality, v.l, v.n, v.excess
        ));
    }
    let closed_form = mcmullen_closed_form(spec).ok();
    Ok(DimensionEstimate {
        alpha,
        theta: series.theta,
        n,
        log_sn: series.log_sn(n),
        pressure_lower,
        pressure_upper,
        lower: pressure_lower.map(|p| (p / log_m).clamp(0.0, 2.0)),
        upper: (pressure_upper / log_m).clamp(0.0, 2.0),
        closed_form,
        constants: series.constants,
        structure: series.structure.clone(),
        warnings,
    })
}
