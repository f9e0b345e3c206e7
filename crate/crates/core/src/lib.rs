//! Separation subclasses of finite structures: rule definitions, direct membership
//! checking, the separation game solver and first-order axiom generation.

pub mod axiomgen;
pub mod game;
pub mod logic;
pub mod schemes;
pub mod separation;
