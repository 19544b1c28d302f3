//! Simulation of the switching diffusion: exact chain sampling, Euler-Maruyama
//! stepping on the fast clock, the exact scaling map to the physical process,
//! and pathwise killing integrals.

mod chain;
mod walker;
mod bundle;
mod export;

pub use bundle::{
    killing_integral, simulate_bar_paths, simulate_eps_paths, PathBundle, PathRecord,
    DEFAULT_STEP_BUDGET,
};
pub use chain::{simulate_chain, ChainPath};
pub use export::{read_bundle, write_bundle, write_paths_csv};
pub use walker::BarWalker;
