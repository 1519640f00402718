pub mod arith;
pub mod bsd;
pub mod certify;
pub mod congruence;
pub mod curve;
pub mod database;
pub mod error;
pub mod isogeny;
pub mod local_torsion;
pub mod mordell_weil;
pub mod tables;
pub mod tate;
pub mod twist_search;

pub use error::{Error, Result};
