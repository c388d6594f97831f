//! Concrete algebra constructions: commutative differential embeddings,
//! the free boson, the rank-one lattice, and tensor products.

pub mod commutative;
pub mod heisenberg;
pub mod lattice;
pub mod tensor;

pub use commutative::{
    borcherds_embed, check_comm_diff_axioms, divided_power_algebra, polynomial_algebra,
    CommDiffAlgebraSpec,
};
pub use heisenberg::{
    annihilation_operator, fock_basis, heisenberg_build, integration_operator, sign_involution,
    HeisenbergSpec,
};
pub use lattice::{label_of, lattice_basis, lattice_rank1_build, LatticeRank1Spec};
pub use tensor::{
    laurent_negative_projection, lift_right_operator, tensor_build, RightFactor, TensorSpec,
};
