//! Exact arithmetic over `Q` and `Q(√d)` and the small amount of exact linear
//! algebra the geometry and lattice code needs.

mod matrix;
mod quad;
mod rational;

pub use matrix::{exact_kernel, exact_rank, Echelon, ExactMatrix};
pub use quad::{is_square_free, QuadExt};
pub use rational::{
    ceil_to_bigint, common_denominator, format_rational, parse_rational, rational_from_bigint,
    rational_from_int, rational_to_f64, Rational,
};

/// Sign of `x` as -1, 0 or +1.
pub fn qext_sign(x: &QuadExt) -> i8 {
    x.sign()
}
