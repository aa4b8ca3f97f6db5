//! Crossed modules over finitely presented groups: free crossed modules and
//! identities among relations, the group extension problem, and
//! low-dimensional group cohomology.

pub mod cohomology;
pub mod error;
pub mod extensions;
pub mod freexmod;
pub mod group;
pub mod grouprings;
pub mod linalg;
pub mod presentations;
pub mod topology;
pub mod words;
pub mod xmod;

pub use error::{Error, Result};
