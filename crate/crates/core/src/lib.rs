//! Local Langlands bookkeeping for Deligne representations with coefficients
//! in a finite field of characteristic `ell`.

pub mod deligne;
pub mod dsl;
pub mod error;
pub mod factors;
pub mod field;
pub mod gln;
pub mod laurent;
pub mod matrix;
pub mod matrixmodel;
pub mod poly;
pub mod sweep;
pub mod weil;

pub use error::{Error, Result};
pub use field::{make_ctx, FieldCtx, FieldElem};
