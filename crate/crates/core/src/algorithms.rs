//! Baseline online policies.

use std::collections::HashMap;

use thiserror::Error;

use crate::engine::{OnlineAlgorithm, Placement};
use crate::model::{Assignment, Batch, JobId, MachineId, MachineState, Time, UserId};

/// Each job goes to the machine with the smallest load front, lowest index on
/// ties.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyLeastLoaded;

impl OnlineAlgorithm for GreedyLeastLoaded {
    fn name(&self) -> &str {
        "greedy"
    }

    fn decide(&self, batch: &Batch, machines: &[MachineState], _: &[Assignment]) -> Vec<Placement> {
        let mut loads: Vec<Time> = machines.iter().map(|m| m.available_at).collect();
        batch
            .jobs
            .iter()
            .map(|job| {
                let (slot, _) = loads
                    .iter()
                    .enumerate()
                    .min_by_key(|&(i, &load)| (load, i))
                    .expect("at least two machines");
                loads[slot] += job.processing_time;
                Placement::at_front(job.id, MachineId::from_index(slot))
            })
            .collect()
    }
}

fn user_machine(user: UserId, machine_count: usize) -> MachineId {
    MachineId::from_index((user.0 as usize).saturating_sub(1) % machine_count)
}

/// User `r` always uses machine `((r - 1) mod m) + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RoundRobinUser;

impl OnlineAlgorithm for RoundRobinUser {
    fn name(&self) -> &str {
        "rr-user"
    }

    fn decide(&self, batch: &Batch, machines: &[MachineState], _: &[Assignment]) -> Vec<Placement> {
        batch
            .jobs
            .iter()
            .map(|job| Placement::at_front(job.id, user_machine(job.user(), machines.len())))
            .collect()
    }
}

/// Pins every user's whole sequence to one machine. Meant for `k = b * m`,
/// where each machine then serves exactly `b` users; for other `k` it is the
/// same mapping as [`RoundRobinUser`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DedicatedMachines;

impl OnlineAlgorithm for DedicatedMachines {
    fn name(&self) -> &str {
        "dedicated"
    }

    fn decide(&self, batch: &Batch, machines: &[MachineState], _: &[Assignment]) -> Vec<Placement> {
        batch
            .jobs
            .iter()
            .map(|job| Placement::at_front(job.id, user_machine(job.user(), machines.len())))
            .collect()
    }
}

/// Replays a fixed assignment table. Jobs missing from the table produce no
/// placement, which the engine reports.
#[derive(Debug, Clone)]
pub struct ScriptedAlgorithm {
    name: String,
    table: HashMap<JobId, (MachineId, Option<Time>)>,
}

impl ScriptedAlgorithm {
    pub fn new(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = (JobId, MachineId, Option<Time>)>,
    ) -> Self {
        ScriptedAlgorithm {
            name: name.into(),
            table: entries
                .into_iter()
                .map(|(job, machine, start)| (job, (machine, start)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn has_explicit_starts(&self) -> bool {
        self.table.values().any(|(_, start)| start.is_some())
    }
}

impl OnlineAlgorithm for ScriptedAlgorithm {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&self, batch: &Batch, _: &[MachineState], _: &[Assignment]) -> Vec<Placement> {
        batch
            .jobs
            .iter()
            .filter_map(|job| {
                self.table.get(&job.id).map(|&(machine, start)| Placement {
                    job: job.id,
                    machine,
                    start,
                })
            })
            .collect()
    }
}

pub const BUILTIN_ALGORITHMS: [&str; 4] = ["greedy", "rr-user", "dedicated", "scripted:<file>"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown algorithm `{0}`; valid options: greedy, rr-user, dedicated, scripted:<file>")]
pub struct UnknownAlgorithm(pub String);

/// Resolves the built-in policy names. `scripted:<file>` needs file access and
/// is handled by the I/O layer.
pub fn builtin_algorithm(name: &str) -> Result<Box<dyn OnlineAlgorithm + Send + Sync>, UnknownAlgorithm> {
    match name {
        "greedy" => Ok(Box::new(GreedyLeastLoaded)),
        "rr-user" => Ok(Box::new(RoundRobinUser)),
        "dedicated" => Ok(Box::new(DedicatedMachines)),
        other => Err(UnknownAlgorithm(other.to_string())),
    }
}
