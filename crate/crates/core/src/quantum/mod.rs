//! Dense complex operator algebra on truncated tensor-product spaces.

mod operator;
mod space;
mod state;

pub use operator::{
    annihilation, basis_ket, creation, embed, number, projector, sigma_minus, sigma_plus,
    sigma_x, sigma_y, sigma_z, CMatrix, Operator,
};
pub use space::HilbertSpace;
pub use state::{expect, partial_trace, state_fidelity, DensityMatrix, STATE_TOLERANCE};

/// Largest total dimension accepted for a dense space.
pub const MAX_DIMENSION: usize = 4096;
