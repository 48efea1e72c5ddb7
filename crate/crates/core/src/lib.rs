#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod gmod;
pub mod scalar;
pub mod resolve;
pub mod koszul;
pub mod ext;
pub mod builtins;
pub mod verify;
