//! Modular-variable dynamics of two separated Gaussian packets in a uniform
//! field, under unitary and Caldeira-Leggett evolution, with numerical
//! oracles for every closed form.

pub mod cl;
pub mod error;
pub mod extended;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod schrodinger;
pub mod sim;
pub mod special;
pub mod two_particle;
pub mod window;

pub use error::{Error, Result};
