//! Steady states of a driven, damped three-level cascade, the two-photon
//! states they emit, and geometric phases along paths in parameter space.

pub mod analytic;
pub mod cascade;
pub mod gp;
pub mod linops;
pub mod photonstate;
