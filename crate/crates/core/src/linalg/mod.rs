pub mod matrix;
pub mod operator;
pub mod random;
pub mod space;
pub mod state;

pub use matrix::{c64, gram_schmidt, inner, norm, svd, Matrix, Svd, C64, ONE, ZERO};
pub use operator::{
    controlled, decrement_mod, direct_sum, embed, increment_mod, reflection_about, tensor, Cond, LocalGate, Operator,
    Permutation, Predicate, DEFAULT_TOL,
};
pub use space::{BasisLabel, Layout, Register, RegisterKind, Space};
pub use state::StateVector;
