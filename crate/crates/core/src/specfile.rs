//! The system specification file format (JSON, `schema: 1`).
//!
//! Two shapes share one schema version:
//!
//! ```json
//! { "schema": 1, "name": "golden", "notes": [],
//!   "x_symbols": ["a", "b"],
//!   "x_transitions": [["a", "a"], ["a", "b"], ["b", "a"]],
//!   "pi": { "a": "0", "b": "1" } }
//! ```
//!
//! ```json
//! { "schema": 1, "l": 3, "m": 2,
//!   "digits": [[0, 0], [1, 1], [2, 0]],
//!   "transitions": "full" }
//! ```
//!
//! For carpets `transitions` is either `"full"` or a list of allowed ordered
//! pairs of digits, e.g. `[[[0, 0], [1, 1]], ...]`. Image letters of an
//! abstract system are ordered by the optional `y_symbols` list, or else by
//! first appearance along `x_symbols`.
//! Unknown fields are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::carpet::{carpet_to_factor, CarpetSpec};
use crate::error::{Error, Result};
use crate::factor::{induced_factor, FactorSystem};
use crate::sft::Sft;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemKind {
    Factor(FactorSystem),
    Carpet(CarpetSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub name: Option<String>,
    pub notes: Vec<String>,
    pub system: SystemKind,
}

impl SpecFile {
    /// The factor system, deriving it from the carpet when necessary.
    pub fn factor_system(&self) -> Result<FactorSystem> {
        match &self.system {
            SystemKind::Factor(fs) => Ok(fs.clone()),
            SystemKind::Carpet(spec) => Ok(carpet_to_factor(spec)?.0),
        }
    }

    pub fn carpet(&self) -> Option<&CarpetSpec> {
        match &self.system {
            SystemKind::Carpet(spec) => Some(spec),
            SystemKind::Factor(_) => None,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorFile {
    schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    x_symbols: Vec<String>,
    x_transitions: Vec<(String, String)>,
    pi: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y_symbols: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum TransitionsField {
    Keyword(String),
    Pairs(Vec<((u32, u32), (u32, u32))>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarpetFile {
    schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    l: u32,
    m: u32,
    digits: Vec<(u32, u32)>,
    transitions: TransitionsField,
}

fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::SpecFile(format!(
            "unsupported schema {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

fn spec_err(e: serde_json::Error) -> Error {
    Error::SpecFile(e.to_string())
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(spec_err)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::SpecFile("top level must be an object".into()))?;
    if obj.contains_key("x_symbols") {
        let file: FactorFile = serde_json::from_value(value).map_err(spec_err)?;
        check_schema(file.schema)?;
        Ok(SpecFile {
            name: file.name.clone(),
            notes: file.notes.clone(),
            system: SystemKind::Factor(factor_from_file(&file)?),
        })
    } else if obj.contains_key("l") || obj.contains_key("digits") {
        let file: CarpetFile = serde_json::from_value(value).map_err(spec_err)?;
        check_schema(file.schema)?;
        Ok(SpecFile {
            name: file.name.clone(),
            notes: file.notes.clone(),
            system: SystemKind::Carpet(carpet_from_file(&file)?),
        })
    } else {
        Err(Error::SpecFile(
            "expected either `x_symbols`/`x_transitions`/`pi` or `l`/`m`/`digits`/`transitions`".into(),
        ))
    }
}

pub fn load_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::SpecFile(format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

fn factor_from_file(file: &FactorFile) -> Result<FactorSystem> {
    let names = file.x_symbols.clone();
    let index = |s: &str| {
        names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| Error::SpecFile(format!("unknown symbol {s:?}")))
    };
    let edges = file
        .x_transitions
        .iter()
        .map(|(a, b)| Ok((index(a)?, index(b)?)))
        .collect::<Result<Vec<_>>>()?;
    for key in file.pi.keys() {
        index(key)?;
    }
    let mut image_names: Vec<String> = file.y_symbols.clone().unwrap_or_default();
    let declared = file.y_symbols.is_some();
    let mut letter_map = Vec::with_capacity(names.len());
    for x in &names {
        let y = file
            .pi
            .get(x)
            .ok_or_else(|| Error::SpecFile(format!("pi is undefined on {x:?}")))?;
        let b = match image_names.iter().position(|n| n == y) {
            Some(b) => b,
            None if declared => {
                return Err(Error::SpecFile(format!("image letter {y:?} is not in y_symbols")))
            }
            None => {
                image_names.push(y.clone());
                image_names.len() - 1
            }
        };
        letter_map.push(b);
    }
    let sft = Sft::from_edges(names, &edges)?;
    induced_factor(sft, image_names, letter_map)
}

fn carpet_from_file(file: &CarpetFile) -> Result<CarpetSpec> {
    let r = file.digits.len();
    let transitions = match &file.transitions {
        TransitionsField::Keyword(k) if k == "full" => vec![vec![true; r]; r],
        TransitionsField::Keyword(k) => {
            return Err(Error::SpecFile(format!(
                "unknown transitions keyword {k:?}, expected \"full\" or a list of pairs"
            )))
        }
        TransitionsField::Pairs(pairs) => {
            let index = |d: (u32, u32)| {
                file.digits.iter().position(|&x| x == d).ok_or_else(|| {
                    Error::SpecFile(format!("transition uses undeclared digit ({},{})", d.0, d.1))
                })
            };
            let mut t = vec![vec![false; r]; r];
            for &(a, b) in pairs {
                t[index(a)?][index(b)?] = true;
            }
            t
        }
    };
    CarpetSpec::new(file.l, file.m, file.digits.clone(), transitions)
}

/// Serializes a factor system in the abstract shape.
pub fn factor_to_json(fs: &FactorSystem, name: Option<&str>, notes: &[String]) -> String {
    let sft = fs.source();
    let file = FactorFile {
        schema: SCHEMA_VERSION,
        name: name.map(str::to_string),
        notes: notes.to_vec(),
        x_symbols: sft.names().to_vec(),
        x_transitions: sft
            .edges()
            .map(|(i, j)| (sft.name(i).to_string(), sft.name(j).to_string()))
            .collect(),
        pi: (0..sft.alphabet_size())
            .map(|x| (sft.name(x).to_string(), fs.image_name(fs.image_of(x)).to_string()))
            .collect(),
        y_symbols: Some(fs.image_names().to_vec()),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("spec serializes");
    out.push('\n');
    out
}

/// Serializes a carpet in the carpet shape.
pub fn carpet_to_json(spec: &CarpetSpec, name: Option<&str>, notes: &[String]) -> String {
    let digits = spec.digits().to_vec();
    let transitions = if spec.is_full() {
        TransitionsField::Keyword("full".into())
    } else {
        let mut pairs = Vec::new();
        for (i, row) in spec.transitions().iter().enumerate() {
            for (j, &ok) in row.iter().enumerate() {
                if ok {
                    pairs.push((digits[i], digits[j]));
                }
            }
        }
        TransitionsField::Pairs(pairs)
    };
    let file = CarpetFile {
        schema: SCHEMA_VERSION,
        name: name.map(str::to_string),
        notes: notes.to_vec(),
        l: spec.l(),
        m: spec.m(),
        digits,
        transitions,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("spec serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_abstract_system() {
        let text = r#"{ "schema": 1, "x_symbols": ["a", "b"],
            "x_transitions": [["a", "a"], ["a", "b"], ["b", "a"]],
            "pi": { "a": "0", "b": "1" } }"#;
        let spec = parse_spec(text).unwrap();
        let fs = spec.factor_system().unwrap();
        assert_eq!(fs.image_names(), &["0".to_string(), "1".to_string()]);
        assert!(fs.source().allowed(0, 1) && !fs.source().allowed(1, 1));
    }

    #[test]
    fn parses_carpet_with_pairs() {
        let text = r#"{ "schema": 1, "l": 3, "m": 2, "digits": [[0,0],[1,1]],
            "transitions": [[[0,0],[1,1]], [[1,1],[0,0]], [[1,1],[1,1]]] }"#;
        let spec = parse_spec(text).unwrap();
        let carpet = spec.carpet().unwrap();
        assert_eq!(carpet.transitions(), &[vec![false, true], vec![true, true]]);
    }

    #[test]
    fn rejects_unknown_fields_and_schema() {
        let extra = r#"{ "schema": 1, "l": 3, "m": 2, "digits": [[0,0]], "transitions": "full", "colour": 1 }"#;
        assert!(matches!(parse_spec(extra), Err(Error::SpecFile(_))));
        let schema = r#"{ "schema": 2, "l": 3, "m": 2, "digits": [[0,0]], "transitions": "full" }"#;
        assert!(matches!(parse_spec(schema), Err(Error::SpecFile(_))));
        let keyword = r#"{ "schema": 1, "l": 3, "m": 2, "digits": [[0,0]], "transitions": "most" }"#;
        assert!(parse_spec(keyword).is_err());
        let missing_pi = r#"{ "schema": 1, "x_symbols": ["a"], "x_transitions": [["a","a"]], "pi": {} }"#;
        assert!(parse_spec(missing_pi).is_err());
        assert!(parse_spec("[1, 2]").is_err());
        assert!(parse_spec("{ not json").is_err());
    }

    #[test]
    fn carpet_round_trips_through_abstract_form() {
        let spec = CarpetSpec::new(
            4,
            3,
            vec![(0, 2), (3, 1), (2, 0), (1, 0)],
            vec![
                vec![true, true, false, true],
                vec![true, false, true, false],
                vec![false, true, true, true],
                vec![true, true, true, false],
            ],
        )
        .unwrap();
        let (fs, _) = carpet_to_factor(&spec).unwrap();
        let text = factor_to_json(&fs, Some("roundtrip"), &[]);
        let back = parse_spec(&text).unwrap().factor_system().unwrap();
        assert_eq!(back, fs);
        let again = factor_to_json(&back, Some("roundtrip"), &[]);
        assert_eq!(again, text);

        let carpet_text = carpet_to_json(&spec, None, &[]);
        assert_eq!(parse_spec(&carpet_text).unwrap().carpet().unwrap(), &spec);
    }
}
