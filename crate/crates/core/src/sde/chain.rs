//! Exact sampling of the switching chain: exponential holding times with
//! rate -q_ii and jump distribution q_ij / (-q_ii).

use rand::Rng;

use crate::model::ProblemSpec;

/// One realized chain trajectory on `[0, horizon]`. Right-continuous: the
/// state at a jump time is the post-jump state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPath {
    pub initial_state: usize,
    pub jump_times: Vec<f64>,
    pub post_jump_states: Vec<usize>,
    pub horizon: f64,
}

impl ChainPath {
    /// State at time `t` (cadlag convention).
    pub fn state_at(&self, t: f64) -> usize {
        match self.jump_times.partition_point(|&jt| jt <= t) {
            0 => self.initial_state,
            k => self.post_jump_states[k - 1],
        }
    }

    /// Fraction of `[0, horizon]` spent in `state`.
    pub fn occupation_fraction(&self, state: usize) -> f64 {
        if self.horizon <= 0.0 {
            return if self.initial_state == state { 1.0 } else { 0.0 };
        }
        let mut total = 0.0;
        let mut prev_t = 0.0;
        let mut prev_s = self.initial_state;
        for (&jt, &js) in self.jump_times.iter().zip(&self.post_jump_states) {
            if prev_s == state {
                total += jt - prev_t;
            }
            prev_t = jt;
            prev_s = js;
        }
        if prev_s == state {
            total += self.horizon - prev_t;
        }
        total / self.horizon
    }
}

/// Draw a bias-free chain path. Rows with q_ii = 0 are absorbing.
pub fn simulate_chain(
    spec: &ProblemSpec,
    initial_state: usize,
    horizon: f64,
    rng: &mut impl Rng,
) -> ChainPath {
    assert!(initial_state < spec.n, "initial regime out of range");
    assert!(horizon >= 0.0);
    let mut jump_times = Vec::new();
    let mut post_jump_states = Vec::new();
    let mut t = 0.0;
    let mut state = initial_state;
    loop {
        let rate = -spec.q(state, state);
        if rate <= 0.0 {
            break;
        }
        // u in (0, 1] so the log never sees zero.
        let u = 1.0 - rng.gen::<f64>();
        t += -u.ln() / rate;
        if t > horizon {
            break;
        }
        // Next state with probability q_ij / rate over j != state.
        let mut v = rng.gen::<f64>() * rate;
        let mut next = state;
        for j in 0..spec.n {
            if j == state {
                continue;
            }
            let q = spec.q(state, j);
            if q <= 0.0 {
                continue;
            }
            if v < q {
                next = j;
                break;
            }
            v -= q;
        }
        if next == state {
            // Rounding put v past the last positive rate; take the largest.
            next = (0..spec.n).filter(|&j| j != state && spec.q(state, j) > 0.0).last().unwrap();
        }
        jump_times.push(t);
        post_jump_states.push(next);
        state = next;
    }
    ChainPath { initial_state, jump_times, post_jump_states, horizon }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_specs;
    use crate::seed::{rng_for, Stream};
    use crate::stats;

    #[test]
    fn zero_generator_never_jumps() {
        let spec = test_specs::pure_bm(1);
        let mut rng = rng_for(1, Stream::BarPaths, 0);
        let path = simulate_chain(&spec, 0, 100.0, &mut rng);
        assert!(path.jump_times.is_empty());
        assert_eq!(path.state_at(50.0), 0);
        assert_eq!(path.occupation_fraction(0), 1.0);
    }

    #[test]
    fn jump_times_increase_and_states_alternate() {
        let spec = test_specs::benchmark();
        for p in 0..32 {
            let mut rng = rng_for(9, Stream::BarPaths, p);
            let path = simulate_chain(&spec, (p % 2) as usize, 20.0, &mut rng);
            let mut prev_t = 0.0;
            let mut prev_s = path.initial_state;
            for (&t, &s) in path.jump_times.iter().zip(&path.post_jump_states) {
                assert!(t > prev_t && t <= 20.0);
                assert_ne!(s, prev_s);
                prev_t = t;
                prev_s = s;
            }
        }
    }

    #[test]
    fn symmetric_chain_splits_time_evenly() {
        // Stationary vector of [[-1,1],[1,-1]] is (1/2, 1/2), solved by hand.
        let spec = test_specs::benchmark();
        let horizon = 1e4;
        let n_paths = 10_000u64;
        let fracs: Vec<f64> = (0..n_paths)
            .map(|p| {
                let mut rng = rng_for(17, Stream::BarPaths, p);
                simulate_chain(&spec, (p % 2) as usize, horizon, &mut rng).occupation_fraction(0)
            })
            .collect();
        let mean = stats::mean(&fracs);
        let se = stats::standard_error(&fracs);
        assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn asymmetric_chain_matches_null_space() {
        // Q = [[-1,1],[3,-3]]: pi solves pi^T Q = 0 -> pi = (3/4, 1/4).
        let spec = test_specs::two_regime_flat();
        let horizon = 2e3;
        let fracs: Vec<f64> = (0..4000u64)
            .map(|p| {
                let mut rng = rng_for(23, Stream::BarPaths, p);
                simulate_chain(&spec, (p % 2) as usize, horizon, &mut rng).occupation_fraction(0)
            })
            .collect();
        let mean = stats::mean(&fracs);
        let se = stats::standard_error(&fracs);
        assert!((mean - 0.75).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn state_at_respects_cadlag_convention() {
        let path = ChainPath {
            initial_state: 0,
            jump_times: vec![1.0, 2.0],
            post_jump_states: vec![1, 0],
            horizon: 3.0,
        };
        assert_eq!(path.state_at(0.999), 0);
        assert_eq!(path.state_at(1.0), 1);
        assert_eq!(path.state_at(1.5), 1);
        assert_eq!(path.state_at(2.0), 0);
    }
}
