//! The four worked example systems, embedded as spec files.
//!
//! | file | singleton clump | preimage potential almost additive |
//! |------|-----------------|------------------------------------|
//! | `clump_not_additive.json` | yes (letter 1) | no |
//! | `clump_additive.json` | yes (letter 1) | yes |
//! | `no_clump_additive.json` | no | yes |
//! | `not_gibbs_continuous.json` | yes (letter 1) | no |

use crate::factor::FactorSystem;
use crate::specfile::parse_spec;

pub const CLUMP_NOT_ADDITIVE: &str = include_str!("../fixtures/clump_not_additive.json");
pub const CLUMP_ADDITIVE: &str = include_str!("../fixtures/clump_additive.json");
pub const NO_CLUMP_ADDITIVE: &str = include_str!("../fixtures/no_clump_additive.json");
pub const NOT_GIBBS_CONTINUOUS: &str = include_str!("../fixtures/not_gibbs_continuous.json");

/// `(file name, contents)` for every embedded fixture.
pub fn files() -> [(&'static str, &'static str); 4] {
    [
        ("clump_not_additive.json", CLUMP_NOT_ADDITIVE),
        ("clump_additive.json", CLUMP_ADDITIVE),
        ("no_clump_additive.json", NO_CLUMP_ADDITIVE),
        ("not_gibbs_continuous.json", NOT_GIBBS_CONTINUOUS),
    ]
}

fn load(text: &str) -> FactorSystem {
    parse_spec(text)
        .and_then(|s| s.factor_system())
        .expect("embedded fixture is valid")
}

pub fn clump_not_additive() -> FactorSystem {
    load(CLUMP_NOT_ADDITIVE)
}

pub fn clump_additive() -> FactorSystem {
    load(CLUMP_ADDITIVE)
}

pub fn no_clump_additive() -> FactorSystem {
    load(NO_CLUMP_ADDITIVE)
}

pub fn not_gibbs_continuous() -> FactorSystem {
    load(NOT_GIBBS_CONTINUOUS)
}

/// `(name, system)` for every fixture.
pub fn all() -> Vec<(&'static str, FactorSystem)> {
    vec![
        ("clump_not_additive", clump_not_additive()),
        ("clump_additive", clump_additive()),
        ("no_clump_additive", no_clump_additive()),
        ("not_gibbs_continuous", not_gibbs_continuous()),
    ]
}
