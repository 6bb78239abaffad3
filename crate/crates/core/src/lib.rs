//! Core library of the tc-sched toolkit: task-set model, schedule
//! validation, exact and heuristic schedulers, metrics, generators, and
//! benchmark drivers for collision-free multi-channel time-slot schedules
//! of dependent periodic task sets.

pub mod bench;
pub mod exact;
pub mod gen;
pub mod heuristic;
pub mod io;
pub mod metrics;
pub mod model;
pub mod testutil;
pub mod validator;
