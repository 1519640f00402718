pub mod count;
pub mod divpoly;
pub mod model;
pub mod point;

pub use count::count_points;
pub use divpoly::{division_polynomial, DivisionPolynomial};
pub use model::{Invariants, IsoTransform, WeierstrassModel};
pub use point::{Curve, CurvePoint, Fp, Point};
