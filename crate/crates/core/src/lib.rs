//! Exact computations with Witt vectors, finite commutative infinitesimal
//! group schemes over `F_p`, their Dieudonné modules and Cartier duals, and
//! divided-power differential operators.

pub mod algebra;
pub mod amodule;
pub mod diffops;
pub mod dieudonne;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod poly;
pub mod report;
pub mod scheme;
pub mod witt;

pub use error::{Error, Result};

/// Refusal thresholds for the computations whose cost grows (doubly)
/// exponentially in their parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Largest field size `p^e`.
    pub field_size: u64,
    /// Largest dimension of a Hopf algebra.
    pub dim: usize,
    /// Largest dimension handed to the isomorphism search.
    pub iso_dim: usize,
    /// Largest number of partial assignments the isomorphism search visits.
    pub iso_nodes: u64,
    /// Largest `|D(G)|` that will be enumerated.
    pub enumeration: u64,
    /// Largest free `A`-module enumerated by the inverse functor.
    pub free_module: u64,
    /// Overrides the per-prime Witt level cap.
    pub witt_level: Option<u32>,
    /// Overrides the per-prime λ level cap.
    pub lambda_level: Option<u32>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            field_size: numeric::DEFAULT_FIELD_CAP,
            dim: 4096,
            iso_dim: 256,
            iso_nodes: 5_000_000,
            enumeration: 1 << 16,
            free_module: 1 << 16,
            witt_level: None,
            lambda_level: None,
        }
    }
}

impl Caps {
    pub fn witt_level_cap(&self, p: u32) -> u32 {
        self.witt_level.unwrap_or(match p {
            2 => 6,
            3 => 4,
            5 => 3,
            _ => 2,
        })
    }

    pub fn lambda_level_cap(&self, p: u32) -> u32 {
        self.lambda_level.unwrap_or(match p {
            2 | 3 => 2,
            _ => 1,
        })
    }
}
