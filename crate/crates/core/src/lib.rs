//! Exact and high-precision arithmetic for both sides of the BF path-integral formula
//! for semistable elliptic curves over Q at a good ordinary odd prime `p`.
//!
//! * [`curve`]: Weierstrass invariants, multiplicative local data, point counts, torsion.
//! * [`padic`]: `Z/p^M`, Teichmüller lifts, the Iwasawa algebra and resultants against `omega_n`.
//! * [`modsym`]: real periods, plus modular symbols, theta elements and the p-adic L-approximant.
//! * [`bf`]: finite BF systems and their exact character sums.
//! * [`verifier`]: fixtures, standing hypotheses, and the reconciliation report.

pub mod arith;
pub mod bf;
pub mod curve;
pub mod error;
pub mod modsym;
pub mod padic;
pub mod verifier;

pub use error::{Error, Result};
