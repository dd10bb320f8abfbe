//! Plus modular symbols, real periods, theta elements and their stabilization.

mod characters;
mod lp;
mod periods;
pub mod real;
mod symbols;
mod theta;

pub use characters::{cyclic_generator, DirichletCharacter};
pub use lp::{stabilized_lp, stabilized_lp_for_curve, StabilizedLp};
pub use periods::{real_period, Periods};
pub use symbols::{Decomposition, ModularSymbol, ModularSymbols, SymbolCache, DEFAULT_DENOMINATOR_BOUND};
pub use theta::{from_branches, project_branch, theta_element, ThetaElement};
