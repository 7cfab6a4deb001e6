//! Exhaustive enumeration of batch-respecting schedules.
//!
//! With jobs started at their machine's load front, a schedule is fully
//! determined by which machine each job goes to, so an instance with `n` jobs
//! has exactly `m^n` of them. They are produced in lexicographic order of the
//! assignment vector (jobs in arrival order, machines by index).

use std::sync::Arc;

use crate::model::{Assignment, Job, MachineId, ProblemInstance, Schedule, Time};
use crate::oracle::OracleError;

/// Default cap on `m^n`. `FAIRSCHED_BUDGET` overrides it in the CLI.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Every assignment vector; each job starts at its machine's load front.
    LoadFront,
    /// Only vectors where every job goes to a machine that is free earliest
    /// at the time it is placed, so no machine idles while a revealed job
    /// waits elsewhere.
    WorkConserving,
}

pub struct ScheduleEnumerator {
    instance: Arc<ProblemInstance>,
    jobs: Vec<Job>,
    machine_count: u32,
    mode: EnumerationMode,
    digits: Vec<u32>,
    total: u64,
    visited: u64,
    exhausted: bool,
}

/// Starts an enumeration, refusing if `m^n` exceeds `budget`.
pub fn enumerate_schedules(
    instance: Arc<ProblemInstance>,
    mode: EnumerationMode,
    budget: u64,
) -> Result<ScheduleEnumerator, OracleError> {
    let m = instance.machine_count();
    let jobs = instance.jobs_in_arrival_order();
    let total = u64::from(m).checked_pow(jobs.len() as u32);
    match total {
        Some(t) if t <= budget => Ok(ScheduleEnumerator {
            digits: vec![0; jobs.len()],
            machine_count: m,
            jobs,
            instance,
            mode,
            total: t,
            visited: 0,
            exhausted: false,
        }),
        required => Err(OracleError::BudgetExceeded { required, budget }),
    }
}

impl ScheduleEnumerator {
    /// `m^n`.
    pub fn total_vectors(&self) -> u64 {
        self.total
    }

    /// Assignment vectors examined so far, including ones the mode skipped.
    pub fn vectors_visited(&self) -> u64 {
        self.visited
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.machine_count {
                return;
            }
            *d = 0;
        }
        self.exhausted = true;
    }

    fn build(&self) -> Option<Schedule> {
        let mut loads: Vec<Time> = vec![0; self.machine_count as usize];
        let mut assignments = Vec::with_capacity(self.jobs.len());
        for (job, &slot) in self.jobs.iter().zip(&self.digits) {
            let slot = slot as usize;
            if self.mode == EnumerationMode::WorkConserving
                && loads[slot] != *loads.iter().min().expect("machines")
            {
                return None;
            }
            let start = loads[slot];
            let completion = start + job.processing_time;
            loads[slot] = completion;
            assignments.push(Assignment {
                job: job.id,
                machine: MachineId::from_index(slot),
                start,
                completion,
                decided_in_round: job.id.round(),
            });
        }
        Some(Schedule::new(self.instance.clone(), assignments))
    }
}

impl Iterator for ScheduleEnumerator {
    type Item = Schedule;

    fn next(&mut self) -> Option<Schedule> {
        while !self.exhausted {
            let built = self.build();
            self.visited += 1;
            self.advance();
            if built.is_some() {
                return built;
            }
        }
        None
    }
}
