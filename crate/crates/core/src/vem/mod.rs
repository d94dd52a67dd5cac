//! Virtual element discretization of `−Δu = f`, `u = g` on ∂Ω, orders 1 and 2.

mod assembly;
mod dofs;
mod element;
mod monomials;
mod norms;
pub mod problems;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use assembly::{assemble, dof_functional, interpolate, AssembledSystem, ScalarField};
pub use dofs::{check_order, DofMap, Entity};
pub use element::{cell_quadrature, compute_projectors, element_load, element_operators, element_stiffness, polygon_projectors, ElementOperators, Projectors};
pub use monomials::{polynomial_dim, Monomials};
pub use norms::{compute_errors, ErrorNorms};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VemError {
    #[error("order k={0} is not supported: only k=1 and k=2 are implemented; higher orders need an adjusted coarse-space construction in 3D")]
    UnsupportedOrder(usize),
    #[error("cell {cell} is degenerate (measure {measure:e})")]
    DegenerateElement { cell: usize, measure: f64 },
    #[error("cell {cell}: projector system is numerically singular")]
    NumericalDegeneracy { cell: usize },
}

/// Stabilization of the non-polynomial part of the element stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stabilization {
    /// `S = diag(max((K_c)_ii, h_E^{d−2}))`.
    #[default]
    DRecipe,
    /// `S = h_E^{d−2} I`.
    DofiDofi,
}

impl FromStr for Stabilization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d-recipe" | "drecipe" => Ok(Stabilization::DRecipe),
            "dofi-dofi" | "dofidofi" => Ok(Stabilization::DofiDofi),
            other => Err(format!("unknown stabilization '{other}' (expected d-recipe or dofi-dofi)")),
        }
    }
}

impl fmt::Display for Stabilization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stabilization::DRecipe => "d-recipe",
            Stabilization::DofiDofi => "dofi-dofi",
        })
    }
}
