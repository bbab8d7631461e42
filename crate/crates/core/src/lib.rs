#![no_std]
#![allow(clippy::needless_range_loop)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod surface;
pub mod zlattice;
pub mod eisenstein;
pub mod typeiii;
pub mod geodesics;
pub mod rho;
pub mod thurston;
pub mod record;
