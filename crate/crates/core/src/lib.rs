//! Numerical toolkit for the Zak transform and linear independence of finite
//! time-frequency systems made of integer-lattice shifts plus one arbitrary
//! shift.
//!
//! Sign conventions used throughout:
//!
//! | object | formula |
//! |---|---|
//! | time-frequency shift `π(x, y)` | `f ↦ e^{-2πi⟨y,t⟩} f(t − x)` |
//! | Zak transform | `Zf(t, ω) = Σ_τ f(t + τ) e^{-2πi⟨ω,τ⟩}` |
//! | lattice point `(ℓ, m)` | modulation `ℓ`, translation `m` |
//! | torus shift | `γ = (−x, y) mod Z^{2n}` |
//!
//! With the `parallel` feature (default) grid evaluations run on rayon; every
//! reduction uses a fixed summation order so results do not depend on the
//! number of threads.

pub mod certify;
pub mod error;
pub mod function;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod par;
pub mod phase;
pub mod sum;
pub mod torus;
pub mod trig;
pub mod zak;
pub mod zeros;

pub use error::{Error, Result};
pub use function::{apply_tf_shift, sample, AnalyticFunction, Profile, SampledGrid, Signal, TfPoint};
pub use trig::{TrigPoly, TrigTerm};
pub use zak::{zak_direct, zak_fft, ZakGrid, ZakGridSpec};
