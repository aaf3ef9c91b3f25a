//! Symmetric polynomials, the substitution morphism from pairs of Jordan
//! quiver invariants, and grid membership for joint spectra of commuting
//! matrices.

mod perm;
mod poly;
mod spectrum;

pub use perm::{tau, tau_r, Permutation};
pub use poly::{
    equivariance_check, equivariance_check_r, factor_families, integer, phi_substitute, phi_substitute_r,
    rational, simultaneous_orbit_representatives, Action, Coeff, SymPoly,
};
pub use spectrum::{
    char_poly_invariants, eigenvalues, grid_test, grid_test_r, joint_spectrum, GridResult, DEFAULT_GRID_TOL,
    EXACT_CHARPOLY_MAX,
};
