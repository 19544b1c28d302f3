//! JSON schema for problem specs.
//!
//! Layout (see `fixtures/` for complete examples):
//!
//! ```json
//! {
//!   "d": 1, "m": 1, "n": 2,
//!   "tau": [1.0],
//!   "drift_b":  [[ {"constant":0, "terms":[{"amp":1, "harmonics":[1], "phase":"sin"}]},
//!                  {"constant":0, "terms":[{"amp":-1, "harmonics":[1], "phase":"sin"}]} ]],
//!   "drift_c":  [[ {"constant":1}, {"constant":1} ]],
//!   "sigma":    [[ {"constant":1}, {"constant":1.4142135623730951} ]],
//!   "killing_e":[[ {"constant":-1}, {"constant":-1} ]],
//!   "q_matrix": [[-1,1],[1,-1]],
//!   "domain": { "d_func": {"poly":[{"coef":1,"powers":[2]},{"coef":-1,"powers":[0]}]},
//!               "delta": 1.0, "bbox": [[-1.5],[1.5]] },
//!   "source_f": {"const": 1.0},
//!   "boundary_g": {"poly": [{"coef":1,"powers":[2]}]}
//! }
//! ```
//!
//! Periodic fields are arrays `[component][regime]` of trig tables
//! (`drift_b`/`drift_c`: d components; `sigma`: d*m components row-major;
//! `killing_e`: 1 component). A table is either Fourier data
//! (`constant` + `terms`) or `{"custom": "name"}` resolved against a
//! [`FieldRegistry`]. Space functions are `{"const": v}`, `{"poly": [...]}`
//! or `{"custom": "name"}`.

use serde::{Deserialize, Serialize};

use crate::model::field::{
    CoeffField, FieldRegistry, Monomial, Phase, ScalarField, SpaceFn, TrigPoly, TrigTerm,
};
use crate::model::spec::{GrowthBound, LevelSetDomain, ProblemSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecConfig {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub tau: Vec<f64>,
    pub drift_b: Vec<Vec<ScalarFieldConfig>>,
    pub drift_c: Vec<Vec<ScalarFieldConfig>>,
    pub sigma: Vec<Vec<ScalarFieldConfig>>,
    pub killing_e: Vec<Vec<ScalarFieldConfig>>,
    pub q_matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
    pub source_f: SpaceFnConfig,
    pub boundary_g: SpaceFnConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarFieldConfig {
    Custom {
        custom: String,
    },
    Trig {
        #[serde(default)]
        constant: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        terms: Vec<TrigTermConfig>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigTermConfig {
    pub amp: f64,
    pub harmonics: Vec<i32>,
    pub phase: PhaseConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseConfig {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceFnConfig {
    Const { r#const: f64 },
    Poly { poly: Vec<MonomialConfig> },
    Custom { custom: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialConfig {
    pub coef: f64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainConfig {
    pub d_func: SpaceFnConfig,
    pub delta: f64,
    /// `[lo, hi]` corner pair.
    pub bbox: [Vec<f64>; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub k_const: f64,
    pub kappa: f64,
}

impl SpecConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad spec JSON: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Resolve the config against a registry into an evaluable spec.
    pub fn build(&self, registry: &FieldRegistry) -> Result<ProblemSpec> {
        let field = |tables: &Vec<Vec<ScalarFieldConfig>>,
                     name: &str,
                     rows: usize,
                     cols: usize|
         -> Result<CoeffField> {
            if tables.len() != rows * cols {
                return Err(Error::Config(format!(
                    "{name}: expected {} component tables, got {}",
                    rows * cols,
                    tables.len()
                )));
            }
            let mut comps = Vec::with_capacity(tables.len());
            for regimes in tables {
                if regimes.len() != self.n {
                    return Err(Error::Config(format!(
                        "{name}: expected {} regime tables per component, got {}",
                        self.n,
                        regimes.len()
                    )));
                }
                comps.push(build_scalar(regimes, &self.tau, registry)?);
            }
            CoeffField::new(rows, cols, comps)
        };

        let drift_b = field(&self.drift_b, "drift_b", self.d, 1)?;
        let drift_c = field(&self.drift_c, "drift_c", self.d, 1)?;
        let sigma = field(&self.sigma, "sigma", self.d, self.m)?;
        let killing_e = field(&self.killing_e, "killing_e", 1, 1)?;

        if self.q_matrix.len() != self.n || self.q_matrix.iter().any(|r| r.len() != self.n) {
            return Err(Error::Config(format!("q_matrix must be {0}x{0}", self.n)));
        }
        let q_flat: Vec<f64> = self.q_matrix.iter().flatten().copied().collect();

        let domain = match &self.domain {
            None => None,
            Some(dc) => Some(LevelSetDomain {
                d_func: build_space(&dc.d_func, registry)?,
                delta: dc.delta,
                bbox_lo: dc.bbox[0].clone(),
                bbox_hi: dc.bbox[1].clone(),
            }),
        };

        ProblemSpec::new(
            self.d,
            self.m,
            self.n,
            self.tau.clone(),
            drift_b,
            drift_c,
            sigma,
            killing_e,
            q_flat,
            domain,
            build_space(&self.source_f, registry)?,
            build_space(&self.boundary_g, registry)?,
            self.growth.as_ref().map(|g| GrowthBound { k_const: g.k_const, kappa: g.kappa }),
        )
    }
}

fn build_scalar(
    regimes: &[ScalarFieldConfig],
    tau: &[f64],
    registry: &FieldRegistry,
) -> Result<ScalarField> {
    // A component is either one custom hook covering all regimes, or one
    // trig table per regime. Mixing the two in a single component is not
    // supported by the file format.
    if let [ScalarFieldConfig::Custom { custom }] = regimes {
        return registry.periodic(custom);
    }
    if regimes.iter().any(|r| matches!(r, ScalarFieldConfig::Custom { .. })) {
        if let ScalarFieldConfig::Custom { custom } = &regimes[0] {
            if regimes.iter().all(
                |r| matches!(r, ScalarFieldConfig::Custom { custom: c } if c == custom),
            ) {
                return registry.periodic(custom);
            }
        }
        return Err(Error::Config(
            "custom field hooks must be the sole entry (or repeated identically) for a component"
                .into(),
        ));
    }
    let mut polys = Vec::with_capacity(regimes.len());
    for r in regimes {
        match r {
            ScalarFieldConfig::Trig { constant, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| TrigTerm {
                        amplitude: t.amp,
                        harmonics: t.harmonics.clone(),
                        phase: match t.phase {
                            PhaseConfig::Cos => Phase::Cos,
                            PhaseConfig::Sin => Phase::Sin,
                        },
                    })
                    .collect();
                polys.push(TrigPoly::new(*constant, terms, tau)?);
            }
            ScalarFieldConfig::Custom { .. } => unreachable!(),
        }
    }
    Ok(ScalarField::Trig(polys))
}

fn build_space(cfg: &SpaceFnConfig, registry: &FieldRegistry) -> Result<SpaceFn> {
    Ok(match cfg {
        SpaceFnConfig::Const { r#const } => SpaceFn::Const(*r#const),
        SpaceFnConfig::Poly { poly } => SpaceFn::Poly(
            poly.iter().map(|m| Monomial { coef: m.coef, powers: m.powers.clone() }).collect(),
        ),
        SpaceFnConfig::Custom { custom } => registry.space(custom)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MINIMAL: &str = r#"{
        "d": 1, "m": 1, "n": 2,
        "tau": [1.0],
        "drift_b": [[{"constant":0,"terms":[{"amp":1,"harmonics":[1],"phase":"sin"}]},
                     {"constant":0,"terms":[{"amp":-1,"harmonics":[1],"phase":"sin"}]}]],
        "drift_c": [[{"constant":1},{"constant":1}]],
        "sigma": [[{"constant":1},{"constant":1.4142135623730951}]],
        "killing_e": [[{"constant":-1},{"constant":-1}]],
        "q_matrix": [[-1,1],[1,-1]],
        "source_f": {"const": 1.0},
        "boundary_g": {"poly": [{"coef":1,"powers":[2]}]}
    }"#;

    #[test]
    fn parses_and_builds_two_regime_spec() {
        let cfg = SpecConfig::from_json(MINIMAL).unwrap();
        let spec = cfg.build(&FieldRegistry::new()).unwrap();
        assert_eq!(spec.n, 2);
        let mut out = [0.0];
        spec.eval_b(&[0.25], 0, &mut out);
        assert_relative_eq!(out[0], 1.0, epsilon = 1e-12);
        spec.eval_b(&[0.25], 1, &mut out);
        assert_relative_eq!(out[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(spec.boundary_g.eval(&[3.0]), 9.0, max_relative = 1e-12);
    }

    #[test]
    fn custom_field_resolves_through_registry() {
        let mut cfg = SpecConfig::from_json(MINIMAL).unwrap();
        cfg.drift_c = vec![vec![ScalarFieldConfig::Custom { custom: "ramp".into() }]];
        let mut reg = FieldRegistry::new();
        reg.register_periodic("ramp", |x, _| (std::f64::consts::TAU * x[0]).cos());
        let spec = cfg.build(&reg).unwrap();
        let mut out = [0.0];
        spec.eval_c(&[0.0], 1, &mut out);
        assert_relative_eq!(out[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn missing_custom_hook_is_a_config_error() {
        let mut cfg = SpecConfig::from_json(MINIMAL).unwrap();
        cfg.source_f = SpaceFnConfig::Custom { custom: "nope".into() };
        assert!(cfg.build(&FieldRegistry::new()).is_err());
    }

    #[test]
    fn single_regime_forces_zero_generator() {
        let mut cfg = SpecConfig::from_json(MINIMAL).unwrap();
        cfg.n = 1;
        cfg.q_matrix = vec![vec![5.0]];
        for f in [&mut cfg.drift_b, &mut cfg.drift_c, &mut cfg.sigma, &mut cfg.killing_e] {
            for comp in f.iter_mut() {
                comp.truncate(1);
            }
        }
        let spec = cfg.build(&FieldRegistry::new()).unwrap();
        assert_eq!(spec.q_matrix, vec![0.0]);
    }
}
