//! Crossed modules of finite groupoids, their actions on finite-dimensional
//! C*-algebras, and crossed-product constructions.

pub mod action;
pub mod algebra;
pub mod crossed_module;
pub mod crossed_product;
pub mod error;
pub mod group;
pub mod groupoid;
pub mod linalg;
pub mod morita;
pub mod pontryagin;
pub mod settings;
pub mod symmetry;

pub use crossed_module::{CrossedModule, CrossedModuleError, PairIndex};
pub use group::{make_hom, quotient_group, FiniteGroup, GroupError, GroupHom};
pub use groupoid::{FiniteGroupoid, GroupBundle, GroupoidError, GroupoidHom};
pub use error::Error;
pub use morita::{bimodule_check, linking, verify_morita, LinkingData, MoritaError};
pub use symmetry::{aut2, bisection_group, induced_algebra_action, translation_action, translation_bridge, SymmetryError};
