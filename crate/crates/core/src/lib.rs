//! Dynamical elimination of the intermediate state in a three-level Lambda
//! system: pulse models, propagation, Magnus effective Hamiltonians, the
//! adiabatic analytic solution, and the Ramsey/robustness analysis built on
//! them.
//!
//! Time is measured in units of the pulse duration `t_p` and angular
//! frequencies in `1/t_p`.

pub mod algebra;
pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod optimize;
pub mod pulses;
pub mod quad;

pub use algebra::{expm_hermitian, overlap, Level, Operator3, StateVector, C64};
pub use dynamics::{hamiltonian_at, SystemParams};
pub use error::{Error, Result};
pub use pulses::{PulseSpec, Scheme};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Order-preserving map over a slice, parallel when the `parallel` feature is
/// on.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
