//! Fusion systems of finite permutation groups.
//!
//! Groups are fully materialized, subgroups are bitsets over the parent's
//! elements, and every decision procedure is an exhaustive search. The crate
//! builds the fusion system of a group over a Sylow subgroup, decides its
//! closure and normality predicates, tests supersolvability, and checks
//! hypothesis/conclusion pairs over a corpus of small groups.

#![allow(clippy::mutable_key_type)]

pub mod arith;
pub mod builtin;
pub mod classify;
pub mod error;
pub mod fusion;
pub mod group;
pub mod io;
pub mod lattice;
pub mod normality;
pub mod ops;
pub mod par;
pub mod perm;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Caps, Elem, Group, GroupMap, Subgroup};
pub use perm::Permutation;
