//! Finite-depth computation on inverse limit spaces of quadratic and tent
//! maps: kneading data and entropy, renormalization cycles and backward-orbit
//! grids, natural chains, the folding structure of the arc-component of the
//! fixed endpoint, the collapsing map between the two cores, and recovery of
//! the shift power a homeomorphism is isotopic to.

pub mod dd;
pub mod map;
pub mod symbolic;
pub mod kneading;
pub mod renorm;
pub mod invlim;
pub mod folding;
pub mod collapse;

pub use map::{Family, UnimodalMap};
