//! Weil polynomials of Drinfeld modules over finite fields and the
//! isomorphism classes inside an isogeny class.

pub mod base_ring;
pub mod charpoly;
pub mod context;
pub mod field;
pub mod invariants;
pub mod local;
pub mod poly;
pub mod series;
pub mod skew;
pub mod weil;

pub use base_ring::{APoly, Place, Val};
pub use field::{FFElem, FieldSpec};
pub use poly::Poly;
