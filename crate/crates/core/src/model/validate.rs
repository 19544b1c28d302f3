//! Numerical validation of the standing assumptions: generator sign pattern
//! and irreducibility, uniform ellipticity witness, periodicity spot checks,
//! killing bound and boundary gradient floor for elliptic specs.
//!
//! Semantic failures are recorded in the report, never thrown; only
//! structural inconsistencies abort.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::spec::ProblemSpec;
use crate::seed::{rng_for, Stream};

const ROW_SUM_TOL: f64 = 1e-10;
const PERIODICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    /// Sample point witnessing a failure, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

impl CheckResult {
    fn pass(name: &str, detail: String, measured: Option<f64>) -> Self {
        Self { name: name.into(), passed: true, detail, measured, witness: None }
    }

    fn fail(name: &str, detail: String, measured: Option<f64>, witness: Option<Vec<f64>>) -> Self {
        Self { name: name.into(), passed: false, detail, measured, witness }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub rng_seed: u64,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Killing floor `alpha` such that `e <= -alpha` was witnessed, when the
    /// check ran and passed.
    pub fn killing_floor(&self) -> Option<f64> {
        self.check("killing_bound").filter(|c| c.passed).and_then(|c| c.measured).map(|s| -s)
    }
}

/// Run every declared check. Deterministic for fixed `(spec, samples,
/// rng_seed)`: each check derives its own substream.
pub fn validate_spec(spec: &ProblemSpec, samples: usize, rng_seed: u64) -> ValidationReport {
    let mut checks = Vec::new();
    checks.push(check_q_row_sums(spec));
    checks.push(check_q_signs(spec));
    checks.push(check_q_irreducible(spec));
    checks.push(check_ellipticity(spec, samples, rng_seed));
    checks.extend(check_periodicity(spec, samples, rng_seed));
    if spec.is_elliptic() {
        checks.push(check_killing_bound(spec, samples, rng_seed));
        checks.push(check_boundary_gradient(spec, samples, rng_seed));
        checks.push(check_domain_bounded(spec, samples, rng_seed));
    }
    ValidationReport { samples, rng_seed, checks }
}

fn check_q_row_sums(spec: &ProblemSpec) -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_row = 0;
    for i in 0..spec.n {
        let s: f64 = (0..spec.n).map(|j| spec.q(i, j)).sum();
        if s.abs() > worst {
            worst = s.abs();
            worst_row = i;
        }
    }
    if worst <= ROW_SUM_TOL {
        CheckResult::pass("q_row_sums", format!("max |row sum| = {worst:.3e}"), Some(worst))
    } else {
        CheckResult::fail(
            "q_row_sums",
            format!("row {worst_row} sums to {worst:.3e}"),
            Some(worst),
            None,
        )
    }
}

fn check_q_signs(spec: &ProblemSpec) -> CheckResult {
    for i in 0..spec.n {
        for j in 0..spec.n {
            if i != j && spec.q(i, j) < 0.0 {
                return CheckResult::fail(
                    "q_signs",
                    format!("q[{i}][{j}] = {} < 0", spec.q(i, j)),
                    Some(spec.q(i, j)),
                    None,
                );
            }
        }
    }
    CheckResult::pass("q_signs", "all off-diagonal rates nonnegative".into(), None)
}

/// Strong connectivity of the directed graph with edges {i -> j : q_ij > 0}.
/// Vacuously true for a single regime.
fn check_q_irreducible(spec: &ProblemSpec) -> CheckResult {
    let n = spec.n;
    if n == 1 {
        return CheckResult::pass("q_irreducible", "single regime (vacuous)".into(), None);
    }
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let rate = if forward { spec.q(i, j) } else { spec.q(j, i) };
                if i != j && rate > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    for i in 0..n {
        if !fwd[i] {
            return CheckResult::fail(
                "q_irreducible",
                format!("state {i} unreachable from state 0"),
                None,
                None,
            );
        }
        if !bwd[i] {
            return CheckResult::fail(
                "q_irreducible",
                format!("state 0 unreachable from state {i}"),
                None,
                None,
            );
        }
    }
    CheckResult::pass("q_irreducible", "switching graph strongly connected".into(), None)
}

fn sample_cell_point(spec: &ProblemSpec, rng: &mut impl Rng) -> Vec<f64> {
    spec.tau.iter().map(|&t| rng.gen::<f64>() * t).collect()
}

/// Monte Carlo lower bound on `min xi^T sigma sigma^T xi` over sampled
/// points, regimes and unit directions.
fn check_ellipticity(spec: &ProblemSpec, samples: usize, rng_seed: u64) -> CheckResult {
    let mut rng = rng_for(rng_seed, Stream::Validation, 0);
    let d = spec.d;
    let mut a = vec![0.0; d * d];
    let mut min_val = f64::INFINITY;
    let mut min_at = vec![0.0; d];
    for _ in 0..samples {
        let x = sample_cell_point(spec, &mut rng);
        let i = rng.gen_range(0..spec.n);
        // Random direction from componentwise Gaussians.
        let mut xi: Vec<f64> = (0..d)
            .map(|_| {
                let u: f64 = rng.gen::<f64>().max(1e-16);
                let v: f64 = rng.gen();
                (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
            })
            .collect();
        let norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        xi.iter_mut().for_each(|v| *v /= norm);
        spec.eval_diffusion_matrix(&x, i, &mut a);
        let mut quad = 0.0;
        for r in 0..d {
            for c in 0..d {
                quad += xi[r] * a[r * d + c] * xi[c];
            }
        }
        if quad < min_val {
            min_val = quad;
            min_at = x;
        }
    }
    if min_val > 0.0 {
        CheckResult::pass(
            "ellipticity",
            format!("min sampled quadratic form = {min_val:.6e}"),
            Some(min_val),
        )
    } else {
        CheckResult::fail(
            "ellipticity",
            format!("degenerate diffusion: quadratic form {min_val:.3e}"),
            Some(min_val),
            Some(min_at),
        )
    }
}

fn check_periodicity(spec: &ProblemSpec, samples: usize, rng_seed: u64) -> Vec<CheckResult> {
    let fields: [(&str, &dyn Fn(&[f64], usize, &mut Vec<f64>)); 4] = [
        ("periodicity_b", &|x, i, out| {
            out.resize(spec.d, 0.0);
            spec.drift_b.eval_into(x, i, out)
        }),
        ("periodicity_c", &|x, i, out| {
            out.resize(spec.d, 0.0);
            spec.drift_c.eval_into(x, i, out)
        }),
        ("periodicity_sigma", &|x, i, out| {
            out.resize(spec.d * spec.m, 0.0);
            spec.sigma.eval_into(x, i, out)
        }),
        ("periodicity_e", &|x, i, out| {
            out.resize(1, 0.0);
            out[0] = spec.eval_e(x, i)
        }),
    ];
    fields
        .iter()
        .enumerate()
        .map(|(fi, (name, eval))| {
            let mut rng = rng_for(rng_seed, Stream::Validation, 1 + fi as u64);
            let mut base = Vec::new();
            let mut shifted = Vec::new();
            let mut worst = 0.0f64;
            let mut worst_at: Option<Vec<f64>> = None;
            for _ in 0..samples {
                let x = sample_cell_point(spec, &mut rng);
                let i = rng.gen_range(0..spec.n);
                let xs: Vec<f64> = x
                    .iter()
                    .zip(&spec.tau)
                    .map(|(&xi, &t)| {
                        let k = rng.gen_range(-3i64..=3) as f64;
                        xi + k * t
                    })
                    .collect();
                eval(&x, i, &mut base);
                eval(&xs, i, &mut shifted);
                for (a, b) in base.iter().zip(&shifted) {
                    let diff = (a - b).abs() / (1.0 + a.abs());
                    if diff > worst {
                        worst = diff;
                        worst_at = Some(x.clone());
                    }
                }
            }
            if worst <= PERIODICITY_TOL {
                CheckResult::pass(name, format!("max relative mismatch {worst:.3e}"), Some(worst))
            } else {
                CheckResult::fail(
                    name,
                    format!("field changes by {worst:.3e} under a lattice shift"),
                    Some(worst),
                    worst_at,
                )
            }
        })
        .collect()
}

/// For elliptic specs: witnesses `e <= -alpha` with `alpha > 0` by sampling;
/// `measured` carries the sampled supremum of `e`.
fn check_killing_bound(spec: &ProblemSpec, samples: usize, rng_seed: u64) -> CheckResult {
    let mut rng = rng_for(rng_seed, Stream::Validation, 16);
    let mut sup = f64::NEG_INFINITY;
    let mut sup_at = vec![0.0; spec.d];
    let mut sup_regime = 0usize;
    for _ in 0..samples {
        let x = sample_cell_point(spec, &mut rng);
        let i = rng.gen_range(0..spec.n);
        let v = spec.eval_e(&x, i);
        if v > sup {
            sup = v;
            sup_at = x;
            sup_regime = i;
        }
    }
    if sup < 0.0 {
        CheckResult::pass(
            "killing_bound",
            format!("sup e = {sup:.6e} < 0, killing floor alpha = {:.6e}", -sup),
            Some(sup),
        )
    } else {
        let mut witness = sup_at;
        witness.push(sup_regime as f64);
        CheckResult::fail(
            "killing_bound",
            format!("e reaches {sup:.6e} >= 0 at regime {sup_regime}"),
            Some(sup),
            Some(witness),
        )
    }
}

/// Locates boundary points by bisecting inside/outside sample pairs, then
/// spot-checks `|grad d| >= delta` there.
fn check_boundary_gradient(spec: &ProblemSpec, samples: usize, rng_seed: u64) -> CheckResult {
    let dom = spec.domain.as_ref().expect("elliptic spec");
    let mut rng = rng_for(rng_seed, Stream::Validation, 17);
    let d = spec.d;
    let sample_box = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..d)
            .map(|k| dom.bbox_lo[k] + rng.gen::<f64>() * (dom.bbox_hi[k] - dom.bbox_lo[k]))
            .collect()
    };
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for _ in 0..samples {
        let x = sample_box(&mut rng);
        if dom.d_func.eval(&x) < 0.0 {
            inside.push(x);
        } else {
            outside.push(x);
        }
        if inside.len() >= 64 && outside.len() >= 64 {
            break;
        }
    }
    if inside.is_empty() || outside.is_empty() {
        return CheckResult::fail(
            "boundary_gradient",
            "could not sample both sides of the boundary inside the bbox".into(),
            None,
            None,
        );
    }
    let pairs = inside.len().min(outside.len()).min(64);
    let mut grad = vec![0.0; d];
    let mut min_grad = f64::INFINITY;
    let mut min_at = None;
    for p in 0..pairs {
        let mut a = inside[p].clone();
        let mut b = outside[p].clone();
        for _ in 0..60 {
            let mid: Vec<f64> = a.iter().zip(&b).map(|(&u, &v)| 0.5 * (u + v)).collect();
            if dom.d_func.eval(&mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        dom.d_func.grad(&a, &mut grad);
        let g = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        if g < min_grad {
            min_grad = g;
            min_at = Some(a);
        }
    }
    // Small slack for the finite-difference gradient.
    if min_grad >= dom.delta * (1.0 - 1e-3) {
        CheckResult::pass(
            "boundary_gradient",
            format!("min |grad d| on sampled boundary = {min_grad:.6e} >= delta = {}", dom.delta),
            Some(min_grad),
        )
    } else {
        CheckResult::fail(
            "boundary_gradient",
            format!("|grad d| = {min_grad:.6e} below declared floor {}", dom.delta),
            Some(min_grad),
            min_at,
        )
    }
}

/// The sublevel set must stay inside the declared bounding box: points just
/// outside the box (within one box width) must not satisfy d < 0.
fn check_domain_bounded(spec: &ProblemSpec, samples: usize, rng_seed: u64) -> CheckResult {
    let dom = spec.domain.as_ref().expect("elliptic spec");
    let mut rng = rng_for(rng_seed, Stream::Validation, 18);
    let d = spec.d;
    for _ in 0..samples {
        // Sample in the doubled box, keep only points outside the original.
        let x: Vec<f64> = (0..d)
            .map(|k| {
                let w = dom.bbox_hi[k] - dom.bbox_lo[k];
                dom.bbox_lo[k] - 0.5 * w + rng.gen::<f64>() * 2.0 * w
            })
            .collect();
        let in_box = (0..d).all(|k| x[k] >= dom.bbox_lo[k] && x[k] <= dom.bbox_hi[k]);
        if !in_box && dom.d_func.eval(&x) < 0.0 {
            return CheckResult::fail(
                "domain_bounded",
                "found a point of the domain outside the declared bbox".into(),
                Some(dom.d_func.eval(&x)),
                Some(x),
            );
        }
    }
    CheckResult::pass("domain_bounded", "no domain point found outside the bbox".into(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_specs;

    #[test]
    fn single_regime_is_vacuously_irreducible() {
        let spec = test_specs::pure_bm(1);
        let report = validate_spec(&spec, 500, 7);
        assert!(report.check("q_irreducible").unwrap().passed);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn two_state_chain_all_q_checks_pass() {
        let spec = test_specs::two_regime_flat();
        let report = validate_spec(&spec, 500, 7);
        for name in ["q_row_sums", "q_signs", "q_irreducible"] {
            assert!(report.check(name).unwrap().passed, "{name}");
        }
    }

    #[test]
    fn absorbing_state_fails_irreducibility() {
        // Hand reachability on two nodes: state 0 absorbing.
        let mut spec = test_specs::two_regime_flat();
        spec.q_matrix = vec![0.0, 0.0, 2.0, -2.0];
        let report = validate_spec(&spec, 100, 7);
        let c = report.check("q_irreducible").unwrap();
        assert!(!c.passed);
        assert!(c.detail.contains("unreachable"));
    }

    #[test]
    fn negative_rate_fails_sign_check() {
        let mut spec = test_specs::two_regime_flat();
        spec.q_matrix = vec![1.0, -1.0, 1.0, -1.0];
        let report = validate_spec(&spec, 100, 7);
        assert!(!report.check("q_signs").unwrap().passed);
    }

    #[test]
    fn validation_is_deterministic() {
        let spec = test_specs::benchmark();
        let a = validate_spec(&spec, 2000, 123);
        let b = validate_spec(&spec, 2000, 123);
        for (ca, cb) in a.checks.iter().zip(&b.checks) {
            assert_eq!(ca.measured, cb.measured, "{}", ca.name);
            assert_eq!(ca.passed, cb.passed);
        }
    }

    #[test]
    fn benchmark_passes_all_checks() {
        let spec = test_specs::benchmark();
        let report = validate_spec(&spec, 2000, 5);
        assert!(report.passed(), "{:#?}", report.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert!(report.killing_floor().unwrap() > 0.9);
    }

    #[test]
    fn sign_indefinite_killing_fails_with_witness() {
        let spec = test_specs::killing_violation();
        let report = validate_spec(&spec, 4000, 5);
        let c = report.check("killing_bound").unwrap();
        assert!(!c.passed);
        assert!(c.witness.is_some());
        assert!(c.measured.unwrap() > 0.0);
    }

    #[test]
    fn aperiodic_custom_field_detected() {
        let mut spec = test_specs::pure_bm(1);
        spec.drift_c = crate::model::CoeffField::new(
            1,
            1,
            vec![crate::model::ScalarField::Custom {
                name: "linear".into(),
                f: std::sync::Arc::new(|x: &[f64], _| x[0]),
            }],
        )
        .unwrap();
        let report = validate_spec(&spec, 500, 7);
        assert!(!report.check("periodicity_c").unwrap().passed);
        assert!(report.check("periodicity_b").unwrap().passed);
    }
}
