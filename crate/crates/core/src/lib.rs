//! Scaled Boolean algebras: qualitative generalizations of finitely
//! additive measures, their partial arithmetic, divisibility, and the
//! constructions built on them.

pub mod algebra;
pub mod belief;
pub mod census;
pub mod cf;
pub mod divisibility;
pub mod lp;
pub mod named;
pub mod nonarch;
pub mod scale;
pub mod scaling;

pub use algebra::{Algebra, AlgebraError, Element, Mask};
pub use scale::{verify_scale_map, Scale, ScaleError, TableOp, UndefinedReason};
pub use scaling::{ClassId, Rel, Scaling, ScalingError, StrictOrder};
