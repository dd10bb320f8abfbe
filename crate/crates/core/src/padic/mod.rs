//! Fixed-precision p-adic integers and the Iwasawa algebra `Z_p[[T]]`.

mod iwasawa;
mod resultant;
mod ring;

pub use iwasawa::{newton_invariants, omega_poly, omega_quotient, IwasawaElement, NewtonInvariants};
pub use resultant::{det_mod, product_valuation, resultant_mod, sylvester_matrix};
pub use ring::{hensel_unit_root, padic_image, teichmuller, valuation, PadicInt, Valuation, Zpm};

/// Default absolute precision `M`.
pub const DEFAULT_PRECISION: u32 = 8;
