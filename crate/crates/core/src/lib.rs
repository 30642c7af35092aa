//! Star-product quantization through tomographic maps.
//!
//! An operator `A` is mapped to its symbol `f_A(x) = Tr[A U(x)]` by a family of
//! dequantizers `U(x)`, and recovered as `A = Σ_x w(x) f_A(x) D(x)` from a family
//! of quantizers `D(x)`. Operator products become the star product of symbols,
//! realized by the kernel `K(x_A, x_B, x) = Tr[D(x_A) D(x_B) U(x)]`.
//!
//! Two concrete schemes are provided:
//!
//! * [`spin`]: spin-`j` tomograms, exact on a finite Euler-angle grid;
//! * [`symplectic`]: symplectic tomograms `Tr[A δ(X − μq − νp)]` on a truncated
//!   oscillator basis.
//!
//! The scheme-independent machinery lives in [`scheme`].

pub mod error;
pub mod linalg;
pub mod operator;
pub mod scheme;
pub mod specfun;
pub mod spin;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
pub use operator::OperatorMatrix;
pub use specfun::HalfInteger;
