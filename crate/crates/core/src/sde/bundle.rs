//! Materialized path ensembles and the pathwise killing integral.
//!
//! Bundles store every grid node of every path; large studies should either
//! chunk the path count or work with [`BarWalker`](crate::sde::BarWalker)
//! directly, which is what the statistical harnesses do.

use rayon::prelude::*;

use crate::model::{wrap_torus, ProblemSpec};
use crate::sde::walker::BarWalker;
use crate::seed::{rng_for, Stream};
use crate::{Error, Result};

/// Default number of uniform steps past which `simulate_eps_paths` attaches
/// a warning instead of silently grinding.
pub const DEFAULT_STEP_BUDGET: f64 = 5e7;

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// Grid nodes, starting at 0; non-uniform because jump times are
    /// inserted.
    pub times: Vec<f64>,
    /// Row-major states, `times.len() * d` entries.
    pub states: Vec<f64>,
    /// Regime at each node (cadlag).
    pub regimes: Vec<u16>,
}

impl PathRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, node: usize, d: usize) -> &[f64] {
        &self.states[node * d..(node + 1) * d]
    }
}

/// Ensemble of paths sharing spec, scaling and master seed.
#[derive(Debug, Clone)]
pub struct PathBundle {
    pub d: usize,
    pub n: usize,
    /// Scaling tag: 0 for the rescaled process itself, the physical epsilon
    /// for ensembles produced by [`simulate_eps_paths`].
    pub eps: f64,
    pub master_seed: u64,
    pub horizon: f64,
    pub dt: f64,
    pub paths: Vec<PathRecord>,
    pub warnings: Vec<String>,
}

impl PathBundle {
    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }
}

/// Euler-Maruyama ensemble of the rescaled process with drift
/// `b + eps_bar c`; `eps_bar = 0` gives the limit dynamics of the fast
/// system. Per-path streams are derived from `(master_seed, path index)`, so
/// the result is independent of worker count.
pub fn simulate_bar_paths(
    spec: &ProblemSpec,
    eps_bar: f64,
    x0: &[f64],
    i0: usize,
    horizon: f64,
    dt: f64,
    n_paths: usize,
    master_seed: u64,
) -> Result<PathBundle> {
    let paths = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = rng_for(master_seed, Stream::BarPaths, p as u64);
            let mut walker = BarWalker::new(spec, eps_bar, x0, i0, horizon, dt, &mut rng)?;
            let cap = walker.n_steps_upper_bound();
            let mut times = Vec::with_capacity(cap);
            let mut states = Vec::with_capacity(cap * spec.d);
            let mut regimes = Vec::with_capacity(cap);
            times.push(0.0);
            states.extend_from_slice(x0);
            regimes.push(i0 as u16);
            while walker.advance(&mut rng) {
                times.push(walker.t1);
                states.extend_from_slice(&walker.x1);
                regimes.push(walker.chain.state_at(walker.t1) as u16);
            }
            Ok(PathRecord { times, states, regimes })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathBundle {
        d: spec.d,
        n: spec.n,
        eps: 0.0,
        master_seed,
        horizon,
        dt,
        paths,
        warnings: Vec::new(),
    })
}

/// Ensemble of the physical process, built by simulating the rescaled system
/// on the fast clock and applying the exact scaling map
/// `X(t) = eps * Xbar(t / eps^2)`. Sharing the stepping code keeps the
/// identity pathwise-exact when the slow drift vanishes.
pub fn simulate_eps_paths(
    spec: &ProblemSpec,
    eps: f64,
    x0: &[f64],
    i0: usize,
    horizon: f64,
    dt: f64,
    n_paths: usize,
    master_seed: u64,
) -> Result<PathBundle> {
    if !(eps > 0.0) {
        return Err(Error::Precondition("simulate_eps_paths requires eps > 0".into()));
    }
    let mut warnings = Vec::new();
    let uniform_steps = horizon / dt;
    if uniform_steps > DEFAULT_STEP_BUDGET {
        warnings.push(format!(
            "step count {uniform_steps:.3e} per path exceeds budget {DEFAULT_STEP_BUDGET:.1e}"
        ));
    }
    let x0_bar: Vec<f64> = x0.iter().map(|v| v / eps).collect();
    let mut bundle = simulate_bar_paths(
        spec,
        eps,
        &x0_bar,
        i0,
        horizon / (eps * eps),
        dt / (eps * eps),
        n_paths,
        master_seed,
    )?;
    let e2 = eps * eps;
    bundle.paths.par_iter_mut().for_each(|p| {
        for t in &mut p.times {
            *t *= e2;
        }
        for x in &mut p.states {
            *x *= eps;
        }
    });
    bundle.eps = eps;
    bundle.horizon = horizon;
    bundle.dt = dt;
    bundle.warnings = warnings;
    Ok(bundle)
}

/// Running integral of the killing coefficient along each path, evaluated on
/// the bundle's own grid by the trapezoidal rule with the regime held
/// constant on each interval. For physical ensembles (`eps > 0`) the
/// integrand is `e(X(t)/eps, regime)`; for rescaled ensembles it is
/// `e(Xbar(t), regime)`.
pub fn killing_integral(bundle: &PathBundle, spec: &ProblemSpec) -> Vec<Vec<f64>> {
    let scale = if bundle.eps > 0.0 { 1.0 / bundle.eps } else { 1.0 };
    bundle
        .paths
        .par_iter()
        .map(|path| {
            let d = bundle.d;
            let mut zeta = Vec::with_capacity(path.len());
            zeta.push(0.0);
            let mut acc = 0.0;
            let mut y = vec![0.0; d];
            for k in 0..path.len() - 1 {
                let regime = path.regimes[k] as usize;
                let h = path.times[k + 1] - path.times[k];
                for (yy, xx) in y.iter_mut().zip(path.state(k, d)) {
                    *yy = xx * scale;
                }
                let e0 = spec.eval_e(&wrap_torus(&y, &spec.tau), regime);
                for (yy, xx) in y.iter_mut().zip(path.state(k + 1, d)) {
                    *yy = xx * scale;
                }
                let e1 = spec.eval_e(&wrap_torus(&y, &spec.tau), regime);
                acc += 0.5 * h * (e0 + e1);
                zeta.push(acc);
            }
            zeta
        })
        .collect()
}

impl BarWalker<'_> {
    /// Upper bound on node count, used to size record buffers.
    pub fn n_steps_upper_bound(&self) -> usize {
        ((self.horizon / self.dt).ceil() as usize) + self.chain.jump_times.len() + 2
    }
}
