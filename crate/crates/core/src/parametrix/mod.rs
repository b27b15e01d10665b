//! Multi-reflection parametrix for sources at distance a ≫ h^{4/7} from
//! the wall: each reflected wave is an Airy-type oscillatory integral in
//! rescaled variables, and the sum over reflections telescopes at x = 0.

pub mod geometry;
pub mod roots;
pub mod wave;

pub use geometry::*;
pub use roots::*;
pub use wave::*;
