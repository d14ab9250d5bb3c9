//! Building blocks on the rotation group: spherical harmonics, coupling
//! coefficients and Wigner-D matrices.

pub mod coupling;
pub mod rotation;
pub mod sh;
pub mod wigner3j;

pub use coupling::{clebsch_gordan, gaunt_coefficient, gaunt_forbidden, real_clebsch_gordan};
pub use rotation::{rotation_to_y_axis, wigner_d_blocks, wigner_d_matrix, EulerAnglesZYZ, WignerDBlocks};
pub use sh::{eval_real_sh, eval_sh_vector, SphericalPoint, UnitVector3};
pub use wigner3j::wigner_3j;
