//! Integer polynomials for the iterates `f^n = g_n / h_n`: resultants,
//! discriminant shapes, specialisation and degree patterns modulo primes.

mod disc;
mod iterates;
mod modp;
mod poly;
mod resultant;
mod squarefree;

pub use disc::{
    bareiss_determinant, discriminant, discriminant_polynomial, discriminant_shape, factor_shape,
    interpolate_at_naturals, shape_value, DiscriminantShape, MAX_DISC_LEVEL,
};
pub use iterates::{
    format_rational, iterate_metadata, iterate_pair, parse_rational, specialize_numerator, wronskian,
    IterateFraction, IterateMetadata, MAX_ITERATE, MAX_SPECIALIZE,
};
pub use modp::{factor_degrees_mod_p, FactorPattern};
pub use poly::IntPoly;
pub use resultant::{is_signed_power_of_two, resultant, resultant_modular};
pub use squarefree::{same_square_class, squarefree_part};

pub(crate) fn serialize_bigint<S: serde::Serializer>(x: &num_bigint::BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
