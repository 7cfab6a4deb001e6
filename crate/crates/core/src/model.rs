//! Users, jobs, batches, machines and schedules.
//!
//! Users submit job sequences; round `b` reveals the `b`-th job of every user
//! that still has one. A schedule fixes every job to a machine and a start
//! time, and each decision must be taken in the round its job is revealed.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer time units.
pub type Time = u64;

/// Job weight for the weighted-completion objective.
pub type Weight = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.0)
    }
}

/// One-based machine index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MachineId(pub u32);

impl MachineId {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        MachineId(index as u32 + 1)
    }
}

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

/// Identifies the `index`-th job (one-based) of `user`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JobId {
    pub user: UserId,
    pub index: u32,
}

impl JobId {
    pub fn new(user: u32, index: u32) -> Self {
        JobId {
            user: UserId(user),
            index,
        }
    }

    /// Batch round in which this job is revealed.
    pub fn round(self) -> u32 {
        self.index
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}_{}", self.user.0, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub processing_time: Time,
    /// `None` when the input did not specify one; see [`Job::weight_or_default`].
    pub weight: Option<Weight>,
    /// Desired flow time override for the sum-of-flow objective.
    pub desired_flow: Option<Time>,
}

impl Job {
    pub fn new(user: u32, index: u32, processing_time: Time) -> Self {
        Job {
            id: JobId::new(user, index),
            processing_time,
            weight: None,
            desired_flow: None,
        }
    }

    pub fn user(&self) -> UserId {
        self.id.user
    }

    pub fn weight_or_default(&self) -> Weight {
        self.weight.unwrap_or_else(|| Weight::from_integer(1))
    }

    /// Arrival time: batch round minus one.
    pub fn arrival(&self) -> Time {
        Time::from(self.id.round()) - 1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("machine_count must be ≥ 2, got {0}")]
    TooFewMachines(u32),
    #[error("k ≥ 2 required, got {0} user(s)")]
    TooFewUsers(usize),
    #[error("duplicate user id {0}")]
    DuplicateUser(UserId),
    #[error("user {0} has no jobs")]
    EmptySequence(UserId),
    #[error("processing_time must be ≥ 1 (job {0})")]
    ZeroProcessingTime(JobId),
    #[error("job {job} is out of place in the sequence of {user}")]
    MisnumberedJob { user: UserId, job: JobId },
    #[error("schedule has no assignment for user {0}")]
    MissingUser(UserId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserSequence {
    user: UserId,
    jobs: Vec<Job>,
}

impl UserSequence {
    /// Builds a sequence; job ids must be `user`, `1..=n` in order.
    pub fn new(user: UserId, jobs: Vec<Job>) -> Result<Self, ModelError> {
        if jobs.is_empty() {
            return Err(ModelError::EmptySequence(user));
        }
        for (i, job) in jobs.iter().enumerate() {
            if job.id.user != user || job.id.index as usize != i + 1 {
                return Err(ModelError::MisnumberedJob { user, job: job.id });
            }
            if job.processing_time < 1 {
                return Err(ModelError::ZeroProcessingTime(job.id));
            }
        }
        Ok(UserSequence { user, jobs })
    }

    pub fn from_processing_times(user: u32, times: &[Time]) -> Result<Self, ModelError> {
        let jobs = times
            .iter()
            .enumerate()
            .map(|(i, &p)| Job::new(user, i as u32 + 1, p))
            .collect();
        UserSequence::new(UserId(user), jobs)
    }

    pub fn user(&self) -> UserId {
        self.user
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn total_processing(&self) -> Time {
        self.jobs.iter().map(|j| j.processing_time).sum()
    }

    pub fn processing_times(&self) -> Vec<Time> {
        self.jobs.iter().map(|j| j.processing_time).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    machine_count: u32,
    users: Vec<UserSequence>,
}

impl ProblemInstance {
    /// Users are kept in ascending id order, which is also the order jobs of a
    /// batch are presented in.
    pub fn new(machine_count: u32, mut users: Vec<UserSequence>) -> Result<Self, ModelError> {
        if machine_count < 2 {
            return Err(ModelError::TooFewMachines(machine_count));
        }
        if users.len() < 2 {
            return Err(ModelError::TooFewUsers(users.len()));
        }
        users.sort_by_key(|u| u.user);
        for pair in users.windows(2) {
            if pair[0].user == pair[1].user {
                return Err(ModelError::DuplicateUser(pair[0].user));
            }
        }
        Ok(ProblemInstance {
            machine_count,
            users,
        })
    }

    /// Users numbered `1..=k` from the given processing-time lists.
    pub fn from_processing_times(machine_count: u32, users: &[&[Time]]) -> Result<Self, ModelError> {
        let users = users
            .iter()
            .enumerate()
            .map(|(r, times)| UserSequence::from_processing_times(r as u32 + 1, times))
            .collect::<Result<Vec<_>, _>>()?;
        ProblemInstance::new(machine_count, users)
    }

    pub fn machine_count(&self) -> u32 {
        self.machine_count
    }

    pub fn users(&self) -> &[UserSequence] {
        &self.users
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn user(&self, id: UserId) -> Option<&UserSequence> {
        self.users
            .binary_search_by_key(&id, |u| u.user)
            .ok()
            .map(|i| &self.users[i])
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.user(id.user)?.jobs.get((id.index as usize).checked_sub(1)?)
    }

    pub fn total_jobs(&self) -> usize {
        self.users.iter().map(UserSequence::len).sum()
    }

    pub fn total_processing(&self) -> Time {
        self.users.iter().map(UserSequence::total_processing).sum()
    }

    pub fn batch_count(&self) -> usize {
        self.users.iter().map(UserSequence::len).max().unwrap_or(0)
    }

    /// All jobs in batch order (round, then ascending user).
    pub fn jobs_in_arrival_order(&self) -> Vec<Job> {
        build_batches(self).into_iter().flat_map(|b| b.jobs).collect()
    }

    /// Same instance with every processing time multiplied by `factor`.
    pub fn scaled(&self, factor: Time) -> ProblemInstance {
        let users = self
            .users
            .iter()
            .map(|u| UserSequence {
                user: u.user,
                jobs: u
                    .jobs
                    .iter()
                    .map(|j| Job {
                        processing_time: j.processing_time * factor,
                        desired_flow: j.desired_flow.map(|f| f * factor),
                        ..*j
                    })
                    .collect(),
            })
            .collect();
        ProblemInstance {
            machine_count: self.machine_count,
            users,
        }
    }
}

/// One online arrival round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub round: u32,
    pub jobs: Vec<Job>,
}

/// Batch `b` holds the `b`-th job of every user with at least `b` jobs, in
/// ascending user order.
pub fn build_batches(instance: &ProblemInstance) -> Vec<Batch> {
    (0..instance.batch_count())
        .map(|b| Batch {
            round: b as u32 + 1,
            jobs: instance
                .users
                .iter()
                .filter_map(|u| u.jobs.get(b).copied())
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub job: JobId,
    pub machine: MachineId,
    pub start: Time,
    pub completion: Time,
    pub decided_in_round: u32,
}

impl Assignment {
    pub fn processing_time(&self) -> Time {
        self.completion - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MachineState {
    pub machine: MachineId,
    pub available_at: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    instance: Arc<ProblemInstance>,
    assignments: Vec<Assignment>,
    per_user_makespan: BTreeMap<UserId, Time>,
}

impl Schedule {
    /// Wraps assignments in decision order. Does not validate; see
    /// [`validate_schedule`].
    pub fn new(instance: Arc<ProblemInstance>, assignments: Vec<Assignment>) -> Self {
        let mut per_user_makespan = BTreeMap::new();
        for a in &assignments {
            let entry = per_user_makespan.entry(a.job.user).or_insert(0);
            *entry = (*entry).max(a.completion);
        }
        Schedule {
            instance,
            assignments,
            per_user_makespan,
        }
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn shared_instance(&self) -> &Arc<ProblemInstance> {
        &self.instance
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn assignment(&self, job: JobId) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.job == job)
    }

    pub fn per_user_makespan(&self) -> &BTreeMap<UserId, Time> {
        &self.per_user_makespan
    }

    pub fn overall_makespan(&self) -> Time {
        self.per_user_makespan.values().copied().max().unwrap_or(0)
    }

    /// Assignments grouped per machine, sorted by start time.
    pub fn machine_timelines(&self) -> Vec<Vec<Assignment>> {
        let mut lines = vec![Vec::new(); self.instance.machine_count as usize];
        for a in &self.assignments {
            if let Some(line) = lines.get_mut(a.machine.index()) {
                line.push(*a);
            }
        }
        for line in &mut lines {
            line.sort_by_key(|a| (a.start, a.completion));
        }
        lines
    }
}

/// Map of user to makespan; one entry per user of the instance.
pub fn per_user_makespans(schedule: &Schedule) -> Result<BTreeMap<UserId, Time>, ModelError> {
    let mut out = BTreeMap::new();
    for user in schedule.instance.users() {
        let c = schedule
            .per_user_makespan
            .get(&user.user)
            .ok_or(ModelError::MissingUser(user.user))?;
        out.insert(user.user, *c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownJob(JobId),
    DuplicateAssignment(JobId),
    MissingAssignment(JobId),
    MachineOutOfRange { job: JobId, machine: MachineId },
    CompletionMismatch { job: JobId, expected: Time, found: Time },
    Overlap { machine: MachineId, first: JobId, second: JobId },
    /// Decided in a round other than the one that revealed the job.
    Irrevocability { job: JobId, revealed: u32, decided: u32 },
    /// Decision list goes back to an earlier round.
    RoundOrder { job: JobId, previous_round: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownJob(j) => write!(f, "unknown job {j}"),
            Violation::DuplicateAssignment(j) => write!(f, "job {j} assigned more than once"),
            Violation::MissingAssignment(j) => write!(f, "job {j} never assigned"),
            Violation::MachineOutOfRange { job, machine } => {
                write!(f, "job {job} placed on nonexistent machine {machine}")
            }
            Violation::CompletionMismatch {
                job,
                expected,
                found,
            } => write!(
                f,
                "job {job} completes at {found}, expected start + processing_time = {expected}"
            ),
            Violation::Overlap {
                machine,
                first,
                second,
            } => write!(f, "jobs {first} and {second} overlap on {machine}"),
            Violation::Irrevocability {
                job,
                revealed,
                decided,
            } => write!(
                f,
                "job {job} revealed in round {revealed} but decided in round {decided}"
            ),
            Violation::RoundOrder {
                job,
                previous_round,
            } => write!(
                f,
                "job {job} decided after a round-{previous_round} decision; rounds must not go backwards"
            ),
        }
    }
}

/// Checks every schedule invariant; an empty list means the schedule is valid.
pub fn validate_schedule(schedule: &Schedule) -> Vec<Violation> {
    let instance = &schedule.instance;
    let m = instance.machine_count;
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    let mut last_round = 0;

    for a in &schedule.assignments {
        let Some(job) = instance.job(a.job) else {
            violations.push(Violation::UnknownJob(a.job));
            continue;
        };
        if !seen.insert(a.job) {
            violations.push(Violation::DuplicateAssignment(a.job));
        }
        if a.machine.0 < 1 || a.machine.0 > m {
            violations.push(Violation::MachineOutOfRange {
                job: a.job,
                machine: a.machine,
            });
        }
        let expected = a.start + job.processing_time;
        if a.completion != expected {
            violations.push(Violation::CompletionMismatch {
                job: a.job,
                expected,
                found: a.completion,
            });
        }
        if a.decided_in_round != a.job.round() {
            violations.push(Violation::Irrevocability {
                job: a.job,
                revealed: a.job.round(),
                decided: a.decided_in_round,
            });
        }
        if a.decided_in_round < last_round {
            violations.push(Violation::RoundOrder {
                job: a.job,
                previous_round: last_round,
            });
        }
        last_round = last_round.max(a.decided_in_round);
    }

    for user in instance.users() {
        for job in user.jobs() {
            if !seen.contains(&job.id) {
                violations.push(Violation::MissingAssignment(job.id));
            }
        }
    }

    let mut by_machine: HashMap<MachineId, Vec<&Assignment>> = HashMap::new();
    for a in &schedule.assignments {
        by_machine.entry(a.machine).or_default().push(a);
    }
    let mut machines: Vec<_> = by_machine.into_iter().collect();
    machines.sort_by_key(|(m, _)| *m);
    for (machine, mut line) in machines {
        line.sort_by_key(|a| (a.start, a.completion));
        for pair in line.windows(2) {
            let (prev, next) = (pair[0], pair[1]);
            // Zero-length intervals cannot occur for valid jobs.
            if next.start < prev.completion {
                violations.push(Violation::Overlap {
                    machine,
                    first: prev.job,
                    second: next.job,
                });
            }
        }
    }
    violations
}
