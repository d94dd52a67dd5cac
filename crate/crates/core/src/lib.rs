//! Virtual element discretization of the Poisson problem on polygonal and
//! polyhedral meshes, solved with two-level overlapping Schwarz
//! preconditioners (GDSW, GDSW*, RGDSW coarse spaces).

pub mod coarse;
pub mod decomposition;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod schwarz;
pub mod study;
pub mod vem;
