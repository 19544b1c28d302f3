//! Problem data model, coefficient evaluation with torus periodicity, and
//! numerically checkable validation of the standing assumptions.

mod config;
mod field;
pub mod presets;
mod spec;
mod validate;

pub use config::{
    DomainConfig, GrowthConfig, MonomialConfig, PhaseConfig, ScalarFieldConfig, SpaceFnConfig,
    SpecConfig, TrigTermConfig,
};
pub use field::{
    CoeffField, FieldRegistry, Monomial, Phase, ScalarField, SpaceFn, TrigPoly, TrigTerm,
};
pub use spec::{wrap_coord, wrap_torus, GrowthBound, LevelSetDomain, ProblemSpec};
pub use validate::{validate_spec, CheckResult, ValidationReport};

#[cfg(test)]
pub(crate) use presets as test_specs;
