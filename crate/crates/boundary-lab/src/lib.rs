//! Numerical laboratory for bounded analytic functions on the unit disk.
//!
//! The crate evaluates singular inner functions, Blaschke products, and the
//! transform `g = e^{-i log h}` near the unit circle, samples them along
//! radii, and classifies each radius as converged or oscillating. A comb
//! domain module checks the slit-separation picture by rasterized flood
//! fill. The `boundary-lab` binary drives the scenario demos and writes
//! CSV/JSON artifacts.

pub mod boundary_sets;
pub mod comb_geometry;
pub mod complex_core;
pub mod config;
pub mod function_factory;
pub mod radial_probe;
pub mod report;

pub mod commands;

pub use complex_core::{DiskPoint, LeftHalfPlaneValue, UnitCirclePoint};
