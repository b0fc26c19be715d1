//! Exact computations in the symplectic oscillator Lie algebra
//! `g_n = sp_2n ⋉ H_n`: structure constants, PBW normal ordering, the Weyl
//! algebra realization, weight modules and their characters.

pub mod characters;
pub mod error;
pub mod lie;
pub mod morphisms;
pub mod parse;
pub mod scalar;
pub mod uea;
pub mod weyl;

pub use error::{Error, ParseError, Result};
pub use lie::{BasisElement, LieElement, Root, SymplecticOscillator, Weight};
pub use scalar::Scalar;
