//! Anticyclotomic p-adic L-functions for definite unitary pairs at finite precision.
//!
//! The crate is organised bottom-up: [`coeff`] provides the p-adic rings,
//! [`weights`] the weight combinatorics, [`branching`] the invariant generators,
//! [`dist`] distributions and the interpolation map, [`autforms`] the class-set
//! model with its U_p operator, [`lfun`] period sums and character values,
//! and [`family`] Coleman-family lifting. [`cli`] drives everything from JSON.

pub mod branching;
pub mod dist;
pub mod coeff;
pub mod linalg;
pub mod weights;
pub mod autforms;
pub mod lfun;
pub mod family;
pub mod verify;
pub mod cli;
