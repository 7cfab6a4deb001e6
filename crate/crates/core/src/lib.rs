//! Simulation and fairness analysis for multi-user online scheduling on
//! identical machines.
//!
//! `k` users each submit a sequence of jobs. Jobs arrive in batches, one per
//! user per round, and an online algorithm must place every job of a batch
//! before the next one arrives. Each user cares about its own makespan; the
//! [`metrics`] module scores how fairly an algorithm treats them.
//!
//! Metric code is generic over [`Scalar`]; the aliases below fix it to exact
//! rationals or `f64`.

pub mod algorithms;
pub mod bounds;
pub mod cli;
pub mod engine;
pub mod enumerate;
pub mod generate;
pub mod io;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod scalar;

pub use algorithms::{DedicatedMachines, GreedyLeastLoaded, RoundRobinUser, ScriptedAlgorithm};
pub use engine::{simulate, EngineConfig, EngineError, OnlineAlgorithm, Placement};
pub use metrics::{
    fairness_report, DiscriminationIndex, FairnessIndex, FairnessReport, MetricError,
    MetricsConfig, Objective, OptimumMode, UserOutcome,
};
pub use model::{
    build_batches, per_user_makespans, validate_schedule, Batch, Job, JobId, MachineId,
    ProblemInstance, Schedule, Time, UserId, UserSequence,
};
pub use scalar::{Rational, Scalar};

pub type ExactFairnessReport = FairnessReport<Rational>;
pub type ExactUserOutcome = UserOutcome<Rational>;
pub type ExactFairnessIndex = FairnessIndex<Rational>;
pub type ExactDiscriminationIndex = DiscriminationIndex<Rational>;

pub type FloatFairnessReport = FairnessReport<f64>;
pub type FloatUserOutcome = UserOutcome<f64>;
