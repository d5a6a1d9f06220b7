//! The mod-3 Steenrod algebra in the Milnor basis, its quotient Hopf
//! algebras, and finite module presentations for the complexes this
//! workspace computes with.

pub mod algebra;
pub mod cartan;
pub mod milnor;
pub mod module;
pub mod oracle;

pub use algebra::{algebra_basis, Algebra, QuotientAlgebra};
pub use milnor::{binom3, monomial_product, multinomial3, MilnorMonomial, SteenrodElement};
pub use module::{check_module_axioms, module_from_presentation, AxiomReport, ModulePresentation};
