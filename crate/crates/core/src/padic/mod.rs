pub mod modular;
pub mod newton;
pub mod poly;
pub mod scalar;
pub mod series;

pub use modular::Zmod;
pub use newton::{newton_polygon, CoeffInfo, NewtonPolygon, Segment, Slope};
pub use poly::PadicPoly;
pub use scalar::PadicScalar;
