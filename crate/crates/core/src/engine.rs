//! Online simulation: batches are revealed one at a time and the algorithm
//! fixes every job of a batch before the next batch is shown.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{
    build_batches, Assignment, Batch, JobId, MachineId, MachineState, ProblemInstance, Schedule,
    Time,
};

/// A decision for one job of the current batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub job: JobId,
    pub machine: MachineId,
    /// Explicit start time. Only honoured when idling is allowed; `None`
    /// starts the job at the machine's load front.
    pub start: Option<Time>,
}

impl Placement {
    pub fn at_front(job: JobId, machine: MachineId) -> Self {
        Placement {
            job,
            machine,
            start: None,
        }
    }
}

/// An online scheduling policy.
///
/// `decide` sees the current batch, the machine states at the start of the
/// round and the assignments fixed in earlier rounds, nothing else. Engine
/// applies placements in batch order, so a policy that reasons about loads
/// within a batch has to track its own placements.
pub trait OnlineAlgorithm {
    fn name(&self) -> &str;

    fn decide(&self, batch: &Batch, machines: &[MachineState], history: &[Assignment])
        -> Vec<Placement>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineConfig {
    /// When false every job starts exactly at its machine's load front.
    pub idling_allowed: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("{algorithm}, round {round}: machine {machine} is outside 1..={machine_count}")]
    MachineOutOfRange {
        algorithm: String,
        round: u32,
        machine: MachineId,
        machine_count: u32,
    },
    #[error("{algorithm}, round {round}: no placement for job {job}")]
    MissingChoice {
        algorithm: String,
        round: u32,
        job: JobId,
    },
    #[error("{algorithm}, round {round}: job {job} placed more than once")]
    DuplicateChoice {
        algorithm: String,
        round: u32,
        job: JobId,
    },
    #[error("{algorithm}, round {round}: job {job} is not part of this batch")]
    UnexpectedJob {
        algorithm: String,
        round: u32,
        job: JobId,
    },
    #[error("{algorithm}, round {round}: job {job} asks for start {start} but idling is disabled (load front is {front})")]
    IdlingDisabled {
        algorithm: String,
        round: u32,
        job: JobId,
        start: Time,
        front: Time,
    },
    #[error("{algorithm}, round {round}: job {job} at start {start} overlaps {other} on {machine}")]
    Overlap {
        algorithm: String,
        round: u32,
        job: JobId,
        other: JobId,
        machine: MachineId,
        start: Time,
    },
}

/// Runs `algorithm` over the batches of `instance`.
pub fn simulate(
    instance: Arc<ProblemInstance>,
    algorithm: &dyn OnlineAlgorithm,
    config: EngineConfig,
) -> Result<Schedule, EngineError> {
    let m = instance.machine_count();
    let mut machines: Vec<MachineState> = (0..m as usize)
        .map(|i| MachineState {
            machine: MachineId::from_index(i),
            available_at: 0,
        })
        .collect();
    let mut timelines: Vec<Vec<(Time, Time, JobId)>> = vec![Vec::new(); m as usize];
    let mut history: Vec<Assignment> = Vec::with_capacity(instance.total_jobs());
    let name = algorithm.name().to_string();

    for batch in build_batches(&instance) {
        let round = batch.round;
        let choices = algorithm.decide(&batch, &machines, &history);

        let mut by_job: HashMap<JobId, Placement> = HashMap::with_capacity(choices.len());
        for choice in choices {
            if !batch.jobs.iter().any(|j| j.id == choice.job) {
                return Err(EngineError::UnexpectedJob {
                    algorithm: name,
                    round,
                    job: choice.job,
                });
            }
            if by_job.insert(choice.job, choice).is_some() {
                return Err(EngineError::DuplicateChoice {
                    algorithm: name,
                    round,
                    job: choice.job,
                });
            }
        }

        for job in &batch.jobs {
            let Some(choice) = by_job.get(&job.id) else {
                return Err(EngineError::MissingChoice {
                    algorithm: name,
                    round,
                    job: job.id,
                });
            };
            if choice.machine.0 < 1 || choice.machine.0 > m {
                return Err(EngineError::MachineOutOfRange {
                    algorithm: name,
                    round,
                    machine: choice.machine,
                    machine_count: m,
                });
            }
            let slot = choice.machine.index();
            let front = machines[slot].available_at;
            let p = job.processing_time;
            let start = match choice.start {
                None => front,
                Some(s) if s == front => s,
                Some(s) if !config.idling_allowed => {
                    return Err(EngineError::IdlingDisabled {
                        algorithm: name,
                        round,
                        job: job.id,
                        start: s,
                        front,
                    })
                }
                Some(s) => {
                    if let Some(&(_, _, other)) = timelines[slot]
                        .iter()
                        .find(|&&(a, b, _)| s < b && a < s + p)
                    {
                        return Err(EngineError::Overlap {
                            algorithm: name,
                            round,
                            job: job.id,
                            other,
                            machine: choice.machine,
                            start: s,
                        });
                    }
                    s
                }
            };
            let completion = start + p;
            timelines[slot].push((start, completion, job.id));
            machines[slot].available_at = front.max(completion);
            history.push(Assignment {
                job: job.id,
                machine: choice.machine,
                start,
                completion,
                decided_in_round: round,
            });
        }
    }

    Ok(Schedule::new(instance, history))
}
