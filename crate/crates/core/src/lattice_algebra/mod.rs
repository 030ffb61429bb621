//! Integer lattices: Smith normal form, saturation of rational subspaces, the
//! parallelepiped reduction, and the construction of lattice maps `L` with
//! machine-checkable certificates.

mod construct;
mod int_matrix;
mod reduce;
mod snf;

pub use construct::{construct_l, first_independent_rows, saturate, verify_map, MapCertificate};
pub use int_matrix::IntMatrix;
pub use reduce::{parallelepiped_points, parallelepiped_points_by_box, parallelepiped_reduce, Reduction};
pub use snf::{column_hermite, integer_kernel, smith_normal_form, SnfResult};
