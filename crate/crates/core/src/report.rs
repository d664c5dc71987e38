//! JSON and CSV reports.
//!
//! Reports are `serde_json` values; object keys come out sorted and floats in
//! shortest round-trip form, so identical inputs give byte-identical output.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serializer;
use serde_json::{json, Map, Value};

use crate::additivity::{AdditivityScanReport, UniquenessReport};
use crate::factor::FactorSystem;
use crate::measures::GibbsEnvelope;
use crate::pressure::{DimensionEstimate, PressureSeries, SuperadditiveConstants};
use crate::spectral::CompensationEstimate;

/// Serializes a count as a decimal string, so that no reader rounds it.
pub fn ser_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn constants_json(c: Option<SuperadditiveConstants>) -> Value {
    match c {
        Some(c) => json!({
            "M": c.mixing_index,
            "K": num(c.k()),
            "K_prime": num(c.k_prime()),
            "K_tilde": num(c.k_tilde()),
        }),
        None => Value::Null,
    }
}

/// `{alpha, theta, n, log_Sn, pressure, constants, warnings}` from a series
/// at depth `n`; `alpha = 1/theta - 1`.
pub fn pressure_report(series: &PressureSeries, n: usize, warnings: &[String]) -> Value {
    let mut warnings = warnings.to_vec();
    let lower = series.lower(n).ok();
    if lower.is_none() {
        warnings.push(
            "X is not topologically mixing: only the subadditive upper bound is reported".into(),
        );
    }
    json!({
        "alpha": num(1.0 / series.theta - 1.0),
        "theta": num(series.theta),
        "n": n,
        "log_Sn": num(series.log_sn(n).log()),
        "log_Sn_error": num(series.log_sn(n).err()),
        "words": series.sums[n - 1].word_count.to_string(),
        "pressure": { "lower": opt(lower), "upper": num(series.upper(n)) },
        "constants": constants_json(series.constants),
        "structure": serde_json::to_value(&series.structure).expect("serializable"),
        "warnings": warnings,
    })
}

/// The full dimension report of a carpet.
pub fn dimension_report(d: &DimensionEstimate) -> Value {
    let mut dimension = Map::new();
    dimension.insert("lower".into(), opt(d.lower));
    dimension.insert("upper".into(), num(d.upper));
    if let Some(c) = d.closed_form {
        dimension.insert("closed_form".into(), num(c));
    }
    json!({
        "alpha": num(d.alpha),
        "theta": num(d.theta),
        "n": d.n,
        "log_Sn": num(d.log_sn.log()),
        "log_Sn_error": num(d.log_sn.err()),
        "pressure": { "lower": opt(d.pressure_lower), "upper": num(d.pressure_upper) },
        "dimension": Value::Object(dimension),
        "constants": constants_json(d.constants),
        "structure": serde_json::to_value(&d.structure).expect("serializable"),
        "warnings": d.warnings,
    })
}

pub fn gibbs_json(g: &GibbsEnvelope) -> Value {
    json!({
        "C1": num(g.c1),
        "C2": num(g.c2),
        "min_ratio": num(g.min_ratio),
        "max_ratio": num(g.max_ratio),
        "min_ratio_at_lower": num(g.min_ratio_at_lower),
        "max_ratio_at_lower": num(g.max_ratio_at_lower),
        "l": g.l,
        "n_max": g.n_max,
        "cylinders": g.cylinders,
        "contained": g.contained,
        "pressure": { "lower": num(g.pressure.lower), "upper": num(g.pressure.upper) },
    })
}

pub fn additivity_json(fs: &FactorSystem, a: &AdditivityScanReport) -> Value {
    let mut obj = json!({
        "L": a.max_len,
        "min_ratio": num(a.min_ratio),
        "max_ratio": num(a.max_ratio),
        "min_trend": a.min_trend.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "verdict": a.verdict.to_string(),
        "threshold": num(a.threshold),
    });
    if let Some(w) = &a.witness {
        obj["witness"] = json!({
            "u": fs.format_word(&w.u),
            "v": fs.format_word(&w.v),
            "ratio": num(w.ratio),
        });
    }
    obj
}

pub fn uniqueness_json(u: &UniquenessReport) -> Value {
    json!({
        "singleton_clump": u.singleton_clump,
        "clumps": u.clumps,
        "verdict": serde_json::to_value(u.verdict).expect("serializable"),
        "conclusion": u.conclusion,
    })
}

/// `{gibbs, additivity, uniqueness}`; absent parts are `null`.
pub fn diagnostic_report(
    fs: &FactorSystem,
    gibbs: Option<&GibbsEnvelope>,
    additivity: &AdditivityScanReport,
    uniqueness: Option<&UniquenessReport>,
    warnings: &[String],
) -> Value {
    json!({
        "gibbs": gibbs.map_or(Value::Null, gibbs_json),
        "additivity": additivity_json(fs, additivity),
        "uniqueness": uniqueness.map_or(Value::Null, uniqueness_json),
        "warnings": warnings,
    })
}

pub fn compensation_json(fs: &FactorSystem, c: &CompensationEstimate) -> Value {
    json!({
        "preperiod": fs.format_word(c.point.preperiod()),
        "period": fs.format_word(c.point.period()),
        "spectral": num(c.spectral),
        "spectral_bracket": [num(c.spectral_bracket.0), num(c.spectral_bracket.1)],
        "series": num(c.series),
        "series_n": c.series_n,
        "bound": num(c.bound),
        "note": "the two presentations agree almost everywhere, not necessarily at this point",
    })
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with columns `n,log_Sn,words,upper_bound,lower_bound`; the lower bound
/// is empty when `X` is not mixing.
pub fn series_csv(series: &PressureSeries, n_max: usize) -> String {
    let mut out = String::from("n,log_Sn,words,upper_bound,lower_bound\n");
    for n in 1..=n_max.min(series.max_depth()) {
        let lower = series.lower(n).map(sci).unwrap_or_default();
        writeln!(
            out,
            "{n},{},{},{},{lower}",
            sci(series.log_sn(n).log()),
            series.sums[n - 1].word_count,
            sci(series.upper(n)),
        )
        .expect("writing to a string");
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;
    use crate::counting::DEFAULT_NODE_BUDGET;
    use crate::pressure::{hausdorff_dimension, pressure_series};
    use crate::{carpet_to_factor, fixtures};

    #[test]
    fn dimension_report_fields() {
        let spec = CarpetSpec::from_column_counts(3, 2, &[2, 1]).unwrap();
        let d = hausdorff_dimension(&spec, 12, DEFAULT_NODE_BUDGET).unwrap();
        let v = dimension_report(&d);
        for key in ["alpha", "theta", "n", "log_Sn", "pressure", "dimension", "constants", "warnings"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["dimension"]["closed_form"].is_number());
        for key in ["M", "K", "K_prime", "K_tilde"] {
            assert!(v["constants"][key].is_number());
        }
        assert_eq!(to_text(&v), to_text(&dimension_report(&d)));
    }

    #[test]
    fn csv_layout() {
        let (fs, _) = carpet_to_factor(&CarpetSpec::from_column_counts(3, 2, &[2, 1]).unwrap()).unwrap();
        let s = pressure_series(&fs, 0.5, 4, DEFAULT_NODE_BUDGET).unwrap();
        let csv = series_csv(&s, 4);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        let cols: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cols.len(), 5);
        assert_eq!(cols[0], "2");
        assert_eq!(cols[2], "4");
        assert_eq!(cols[1].split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn non_mixing_pressure_has_null_lower() {
        let fs = fixtures::clump_not_additive();
        let s = pressure_series(&fs, 0.5, 6, DEFAULT_NODE_BUDGET).unwrap();
        let v = pressure_report(&s, 6, &[]);
        assert!(v["pressure"]["lower"].is_number());
        let cyc = crate::FactorSystem::identity(
            crate::Sft::new(vec!["a".into(), "b".into()], vec![vec![false, true], vec![true, false]]).unwrap(),
        );
        let s = pressure_series(&cyc, 0.5, 6, DEFAULT_NODE_BUDGET).unwrap();
        let v = pressure_report(&s, 6, &[]);
        assert!(v["pressure"]["lower"].is_null());
        assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
    }
}
