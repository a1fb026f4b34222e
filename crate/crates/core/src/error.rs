use thiserror::Error;

use crate::action::ActionError;
use crate::algebra::AlgebraError;
use crate::crossed_module::CrossedModuleError;
use crate::crossed_product::CrossedProductError;
use crate::group::GroupError;
use crate::groupoid::GroupoidError;
use crate::morita::MoritaError;
use crate::symmetry::SymmetryError;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    CrossedModule(#[from] CrossedModuleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    CrossedProduct(#[from] CrossedProductError),
    #[error(transparent)]
    Morita(#[from] MoritaError),
}

impl Error {
    /// Short name of the variant that describes the failure, e.g. `NotFull`.
    pub fn kind(&self) -> String {
        let dbg = match self {
            Error::Group(e) => format!("{e:?}"),
            Error::Groupoid(e) => format!("{e:?}"),
            Error::CrossedModule(e) => format!("{e:?}"),
            Error::Algebra(e) => format!("{e:?}"),
            Error::Action(e) => format!("{e:?}"),
            Error::Symmetry(e) => format!("{e:?}"),
            Error::CrossedProduct(e) => format!("{e:?}"),
            Error::Morita(e) => format!("{e:?}"),
        };
        innermost_variant(&dbg)
    }
}

/// `Action(Algebra(NotUnital { .. }))` → `NotUnital`.
fn innermost_variant(dbg: &str) -> String {
    let mut rest = dbg;
    loop {
        let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        let name = &rest[..end];
        let wrapper = matches!(
            name,
            "Group" | "Groupoid" | "CrossedModule" | "Algebra" | "Action" | "Symmetry" | "CrossedProduct" | "Morita"
        );
        if wrapper && rest[end..].starts_with('(') {
            rest = &rest[end + 1..];
        } else {
            return name.to_string();
        }
    }
}
