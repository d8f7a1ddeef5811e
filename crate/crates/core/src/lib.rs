//! Exact reduced forms for linear differential systems in `sp(4)` and an effective
//! abelianity test for variational equations of two-degree-of-freedom Hamiltonians.

pub mod field;
pub mod expr;
pub mod linalg;
pub mod diffop;
pub mod linsys;
pub mod kovacic2;
pub mod nve;
pub mod sp4;
pub mod weinorman;
pub mod pipeline;
