//! Dimension bounds for sets invariant under diagonal torus endomorphisms,
//! computed from a shift of finite type and a one-block factor map.

pub mod additivity;
pub mod carpet;
pub mod counting;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod measures;
pub mod pressure;
pub mod render;
pub mod report;
pub mod sft;
pub mod specfile;
pub mod spectral;

pub use carpet::{carpet_to_factor, CarpetSpec};
pub use error::{Error, ErrorKind, Result};
pub use factor::{induced_factor, singleton_clumps, EventuallyPeriodicPoint, FactorSystem, FiberBlock};
pub use sft::{validate_sft, Sft, StructureReport};
pub use specfile::{load_spec, parse_spec, SpecFile, SystemKind};
