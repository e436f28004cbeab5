#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod calculus;
pub mod comb;
pub mod cpc;
pub mod encodings;
pub mod explore;
pub mod harness;
pub mod lambda;
pub mod name;
pub mod pi;
pub mod process;
pub mod syntax;
pub mod trace;
