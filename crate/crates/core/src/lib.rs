pub mod diffpoly;
pub mod model3wave;
pub mod hierarchy;
pub mod numerics;
