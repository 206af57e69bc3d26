//! Finite-scale machinery for the sharp threshold of the two-colour van der
//! Waerden property in random subsets of `Z/nZ`.

pub mod bounds;
pub mod containers;
pub mod cyclic;
pub mod error;
pub mod focus;
pub mod harness;
pub mod ramsey;
pub mod random;
pub mod subset;

pub use cyclic::{
    enumerate_aps, ApCatalog, ApFamily, ApSpace, ArithmeticProgression, CyclicIndex, Edge,
};
pub use error::{Result, VdwError};
pub use ramsey::{Colour, TwoColouring};
pub use subset::GroundSubset;
