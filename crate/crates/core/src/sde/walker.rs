//! Single-path stepping engine for the rescaled dynamics
//! `dX = (b + eps_bar c) dt + sigma dB` with regime switching.
//!
//! The chain is drawn first (it is autonomous), then Euler-Maruyama steps
//! run on the uniform grid refined so that every jump time is a grid point;
//! the regime is constant within each step. Coefficients are evaluated at
//! the torus-wrapped state and the current regime.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::ProblemSpec;
use crate::sde::chain::{simulate_chain, ChainPath};
use crate::{Error, Result};

pub struct BarWalker<'s> {
    spec: &'s ProblemSpec,
    pub eps_bar: f64,
    pub dt: f64,
    pub horizon: f64,
    pub chain: ChainPath,

    /// Interval of the step just produced by `advance`.
    pub t0: f64,
    pub t1: f64,
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    /// Regime on `[t0, t1)`.
    pub regime: usize,
    pub steps: u64,

    n_uniform: u64,
    tick: u64,
    jump_cursor: usize,
    wrapped: Vec<f64>,
    bvec: Vec<f64>,
    cvec: Vec<f64>,
    smat: Vec<f64>,
    done: bool,
}

impl<'s> BarWalker<'s> {
    pub fn new(
        spec: &'s ProblemSpec,
        eps_bar: f64,
        x0: &[f64],
        i0: usize,
        horizon: f64,
        dt: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Precondition("dt must be positive".into()));
        }
        if dt > horizon {
            return Err(Error::Precondition(format!("dt = {dt} exceeds horizon = {horizon}")));
        }
        if x0.len() != spec.d {
            return Err(Error::Dimension("initial point dimension mismatch".into()));
        }
        if i0 >= spec.n {
            return Err(Error::Dimension("initial regime out of range".into()));
        }
        let chain = simulate_chain(spec, i0, horizon, rng);
        let n_uniform = (horizon / dt - 1e-9).ceil().max(1.0) as u64;
        Ok(Self {
            spec,
            eps_bar,
            dt,
            horizon,
            chain,
            t0: 0.0,
            t1: 0.0,
            x0: x0.to_vec(),
            x1: x0.to_vec(),
            regime: i0,
            steps: 0,
            n_uniform,
            tick: 1,
            jump_cursor: 0,
            wrapped: vec![0.0; spec.d],
            bvec: vec![0.0; spec.d],
            cvec: vec![0.0; spec.d],
            smat: vec![0.0; spec.d * spec.m],
            done: false,
        })
    }

    /// Torus representative of the step's start state.
    pub fn wrapped_x0(&self) -> &[f64] {
        &self.wrapped
    }

    /// Produce the next step into `(t0, t1, x0, x1, regime)`. Returns false
    /// once the horizon has been reached.
    pub fn advance(&mut self, rng: &mut impl Rng) -> bool {
        if self.done {
            return false;
        }
        // Roll the previous endpoint over to the new start.
        std::mem::swap(&mut self.x0, &mut self.x1);
        self.t0 = self.t1;
        if self.t0 >= self.horizon {
            self.done = true;
            return false;
        }

        // Regime switches exactly at jump grid points.
        while self.jump_cursor < self.chain.jump_times.len()
            && self.chain.jump_times[self.jump_cursor] <= self.t0
        {
            self.regime = self.chain.post_jump_states[self.jump_cursor];
            self.jump_cursor += 1;
        }

        // Next grid point: nearest of upcoming uniform tick and jump time.
        let mut t_next = if self.tick >= self.n_uniform {
            self.horizon
        } else {
            (self.tick as f64 * self.dt).min(self.horizon)
        };
        let mut tick_consumed = true;
        if let Some(&jt) = self.chain.jump_times.get(self.jump_cursor) {
            if jt < t_next && jt > self.t0 {
                t_next = jt;
                tick_consumed = false;
            }
        }
        if tick_consumed {
            self.tick += 1;
        }
        self.t1 = t_next;
        let h = self.t1 - self.t0;

        let d = self.spec.d;
        let m = self.spec.m;
        self.spec.wrap_into(&self.x0, &mut self.wrapped);
        self.spec.eval_b(&self.wrapped, self.regime, &mut self.bvec);
        self.spec.eval_c(&self.wrapped, self.regime, &mut self.cvec);
        self.spec.eval_sigma(&self.wrapped, self.regime, &mut self.smat);
        let sqrt_h = h.sqrt();
        for k in 0..d {
            let mut v = self.x0[k] + (self.bvec[k] + self.eps_bar * self.cvec[k]) * h;
            for l in 0..m {
                let xi: f64 = rng.sample(StandardNormal);
                // One normal per (step, column); columns iterate fastest so
                // every path consumes d*m draws per step in a fixed order.
                v += self.smat[k * m + l] * sqrt_h * xi;
            }
            self.x1[k] = v;
        }
        self.steps += 1;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_specs;
    use crate::seed::{rng_for, Stream};

    #[test]
    fn frozen_dynamics_stay_put() {
        let mut spec = test_specs::pure_bm(2);
        spec.sigma = crate::model::CoeffField::zero(2, 2, 2, 1);
        let mut rng = rng_for(3, Stream::BarPaths, 0);
        let mut w = BarWalker::new(&spec, 0.7, &[0.3, -0.4], 0, 5.0, 0.1, &mut rng).unwrap();
        while w.advance(&mut rng) {
            assert_eq!(w.x1, vec![0.3, -0.4]);
        }
        assert_eq!(w.t1, 5.0);
    }

    #[test]
    fn grid_contains_jumps_and_horizon() {
        let spec = test_specs::benchmark();
        let mut rng = rng_for(11, Stream::BarPaths, 4);
        let mut w = BarWalker::new(&spec, 0.0, &[0.0], 0, 10.0, 0.25, &mut rng).unwrap();
        let jumps = w.chain.jump_times.clone();
        let mut nodes = vec![0.0];
        while w.advance(&mut rng) {
            assert!(w.t1 > w.t0);
            nodes.push(w.t1);
        }
        assert_eq!(*nodes.last().unwrap(), 10.0);
        for jt in jumps {
            assert!(
                nodes.iter().any(|&t| t == jt),
                "jump {jt} missing from grid"
            );
        }
    }

    #[test]
    fn regime_constant_between_jumps() {
        let spec = test_specs::benchmark();
        let mut rng = rng_for(13, Stream::BarPaths, 9);
        let mut w = BarWalker::new(&spec, 0.0, &[0.0], 1, 8.0, 0.05, &mut rng).unwrap();
        let chain = w.chain.clone();
        while w.advance(&mut rng) {
            assert_eq!(w.regime, chain.state_at(w.t0), "at t0 = {}", w.t0);
        }
    }

    #[test]
    fn dt_larger_than_horizon_is_rejected() {
        let spec = test_specs::pure_bm(1);
        let mut rng = rng_for(1, Stream::BarPaths, 0);
        assert!(BarWalker::new(&spec, 0.0, &[0.0], 0, 1.0, 2.0, &mut rng).is_err());
    }

    #[test]
    fn deterministic_linear_motion_with_slow_drift() {
        // sigma = 0, b = 0, c = v: exact straight line x0 + eps_bar * v * t.
        let mut spec = test_specs::pure_bm(1);
        spec.sigma = crate::model::CoeffField::zero(1, 1, 1, 1);
        spec.drift_c =
            crate::model::CoeffField::new(1, 1, vec![crate::model::ScalarField::constant(2.0, 1, 1)])
                .unwrap();
        let mut rng = rng_for(5, Stream::BarPaths, 0);
        let mut w = BarWalker::new(&spec, 0.5, &[1.0], 0, 4.0, 0.5, &mut rng).unwrap();
        while w.advance(&mut rng) {}
        assert!((w.x1[0] - (1.0 + 0.5 * 2.0 * 4.0)).abs() < 1e-12);
    }
}
