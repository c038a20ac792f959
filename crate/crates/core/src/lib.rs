//! Viscoelastic flow solver for integral constitutive laws written in
//! deformation-field form.

pub mod compare;
pub mod config;
pub mod deformation;
pub mod error;
pub mod flow;
pub mod kernel;
pub mod mesh;
pub mod run;
pub mod scenarios;
pub mod stationary;
pub mod strain;
pub mod stress;
pub mod tensor;

pub use error::{Error, Result};
