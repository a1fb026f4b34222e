//! Numerical tolerances and size limits.
//!
//! Settings are scoped to the current thread. Library code reads them through
//! [`current`]; callers that need different values wrap their work in
//! [`with_settings`].

use std::cell::Cell;

/// Tolerance for structural identities (associativity, homomorphism checks, ...).
pub const DEFAULT_TOL_ALG: f64 = 1e-9;
/// Tolerance for eigenvalue clustering in the Wedderburn decomposition.
pub const DEFAULT_TOL_EIG: f64 = 1e-8;
pub const DEFAULT_MAX_DIM: usize = 1024;
pub const DEFAULT_MAX_GROUP_ORDER: usize = 24;
pub const DEFAULT_MAX_AUT_CANDIDATES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub tol_alg: f64,
    pub tol_eig: f64,
    /// Largest algebra dimension any construction may produce.
    pub max_dim: usize,
    pub max_group_order: usize,
    /// Search budget for automorphism enumeration.
    pub max_aut_candidates: usize,
    /// Seed for the randomized Wedderburn decomposition.
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol_alg: DEFAULT_TOL_ALG,
            tol_eig: DEFAULT_TOL_EIG,
            max_dim: DEFAULT_MAX_DIM,
            max_group_order: DEFAULT_MAX_GROUP_ORDER,
            max_aut_candidates: DEFAULT_MAX_AUT_CANDIDATES,
            seed: DEFAULT_SEED,
        }
    }
}

thread_local! {
    static CURRENT: Cell<Settings> = Cell::new(Settings::default());
}

pub fn current() -> Settings {
    CURRENT.with(|c| c.get())
}

/// Runs `f` with `settings` installed, restoring the previous settings afterwards
/// (also on panic).
pub fn with_settings<R>(settings: Settings, f: impl FnOnce() -> R) -> R {
    struct Restore(Settings);
    impl Drop for Restore {
        fn drop(&mut self) {
            CURRENT.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(CURRENT.with(|c| c.replace(settings)));
    f()
}
