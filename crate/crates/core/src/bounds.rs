//! Computational checks of the fairness lower bounds.
//!
//! Two kinds of checks live here: replaying the fixed adversarial schedules
//! for two users on two machines, and exhaustively enumerating every
//! work-conserving schedule of a small equal-length instance to test the
//! makespan and fairness bounds claimed for "any algorithm".

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algorithms::ScriptedAlgorithm;
use crate::engine::{simulate, EngineConfig, EngineError};
use crate::enumerate::{enumerate_schedules, EnumerationMode};
use crate::metrics::optimum_makespan_bound;
use crate::model::{Assignment, JobId, MachineId, ProblemInstance, Schedule, Time, UserId};
use crate::oracle::{exact_optimal_makespan, OracleError};
use crate::scalar::{Rational, Scalar};

pub const WORK_CONSERVING_ASSUMPTION: &str =
    "work-conserving schedules only: every job starts on a machine that is free earliest when it is placed";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `k` users, each with `y` jobs of length `x`, on `m` machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EqualLengthFamily {
    pub k: u32,
    pub m: u32,
    pub x: Time,
    pub y: u32,
}

impl EqualLengthFamily {
    pub fn new(k: u32, m: u32, x: Time, y: u32) -> Result<Self, BoundsError> {
        if m < 2 {
            return Err(BoundsError::InvalidFamily(format!("m = {m}, need m ≥ 2")));
        }
        if k < m {
            return Err(BoundsError::InvalidFamily(format!("k = {k} < m = {m}")));
        }
        if x < 1 || y < 1 {
            return Err(BoundsError::InvalidFamily("x and y must be ≥ 1".into()));
        }
        Ok(EqualLengthFamily { k, m, x, y })
    }

    /// `Some(b)` when `k = b * m`.
    pub fn b(&self) -> Option<u32> {
        self.k.is_multiple_of(self.m).then(|| self.k / self.m)
    }

    pub fn job_count(&self) -> u64 {
        u64::from(self.k) * u64::from(self.y)
    }

    pub fn instance(&self) -> ProblemInstance {
        let jobs = vec![self.x; self.y as usize];
        let users: Vec<&[Time]> = (0..self.k).map(|_| jobs.as_slice()).collect();
        ProblemInstance::from_processing_times(self.m, &users).expect("family parameters validated")
    }
}

fn rational_string<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

fn optional_rational_string<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// A schedule that breaks (or, for replays, fails to reproduce) a claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub user: UserId,
    pub assignments: Vec<Assignment>,
    pub per_user_makespan: BTreeMap<UserId, Time>,
}

impl Witness {
    fn from_schedule(schedule: &Schedule, user: UserId) -> Self {
        Witness {
            user,
            assignments: schedule.assignments().to_vec(),
            per_user_makespan: schedule.per_user_makespan().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationVerdict {
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<EqualLengthFamily>,
    /// Schedules the claim was evaluated on.
    pub instances_checked: u64,
    /// Assignment vectors walked to find them (`m^n` for enumerations).
    pub schedules_enumerated: u64,
    pub holds: bool,
    /// The claim's threshold: a makespan cap or a minimum RF.
    #[serde(serialize_with = "rational_string")]
    pub bound: Rational,
    /// Worst value seen: largest makespan or smallest RF.
    #[serde(serialize_with = "rational_string")]
    pub observed: Rational,
    /// Smallest RF when each user's optimum is the exact offline optimum
    /// instead of total processing over `m`.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "optional_rational_string"
    )]
    pub observed_exact_optimum: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub assumptions: Vec<String>,
}

/// A two-user, two-machine instance together with the adversarial schedule
/// that realises the stated makespans.
#[derive(Debug, Clone)]
pub struct ProofInstance {
    pub name: &'static str,
    pub instance: Arc<ProblemInstance>,
    pub script: Vec<(JobId, MachineId)>,
    pub expected_makespan: BTreeMap<UserId, Time>,
    pub expected_opt_bound: BTreeMap<UserId, Rational>,
}

fn proof_instance(
    name: &'static str,
    users: &[&[Time]],
    script: &[(u32, u32, u32)],
    makespans: [Time; 2],
    opt_bound: [(u64, u64); 2],
) -> ProofInstance {
    ProofInstance {
        name,
        instance: Arc::new(ProblemInstance::from_processing_times(2, users).expect("fixed instance")),
        script: script
            .iter()
            .map(|&(u, i, machine)| (JobId::new(u, i), MachineId(machine)))
            .collect(),
        expected_makespan: [(UserId(1), makespans[0]), (UserId(2), makespans[1])].into(),
        expected_opt_bound: [
            (UserId(1), Rational::ratio(opt_bound[0].0, opt_bound[0].1)),
            (UserId(2), Rational::ratio(opt_bound[1].0, opt_bound[1].1)),
        ]
        .into(),
    }
}

/// The four adversarial cases for `k = 2`, `m = 2`. Job sequences are in
/// arrival order.
pub fn theorem1_proof_instances() -> Vec<ProofInstance> {
    vec![
        // Unequal lengths, first pair split across machines.
        proof_instance(
            "theorem1-case-1a",
            &[&[1, 2], &[1]],
            &[(1, 1, 1), (2, 1, 2), (1, 2, 1)],
            [3, 1],
            [(3, 2), (1, 2)],
        ),
        // Unequal lengths, first pair stacked on one machine.
        proof_instance(
            "theorem1-case-1b",
            &[&[1, 1, 2], &[1, 2]],
            &[(1, 1, 1), (2, 1, 1), (1, 2, 2), (2, 2, 2), (1, 3, 1)],
            [4, 3],
            [(2, 1), (3, 2)],
        ),
        // Equal lengths, first pair split.
        proof_instance(
            "theorem1-case-2a",
            &[&[1, 1, 2], &[1, 2, 2]],
            &[(1, 1, 1), (2, 1, 2), (1, 2, 1), (2, 2, 2), (1, 3, 1), (2, 3, 2)],
            [4, 5],
            [(2, 1), (5, 2)],
        ),
        // Equal lengths, first pair stacked.
        proof_instance(
            "theorem1-case-2b",
            &[&[1, 1, 2], &[1, 2, 2]],
            &[(1, 1, 1), (2, 1, 1), (1, 2, 2), (2, 2, 2), (1, 3, 1), (2, 3, 2)],
            [4, 5],
            [(2, 1), (5, 2)],
        ),
    ]
}

/// Replays one proof schedule and checks makespans, optimum bounds and
/// `RF ≥ 1/2` for both users.
pub fn replay_proof_instance(proof: &ProofInstance) -> Result<VerificationVerdict, BoundsError> {
    let script = ScriptedAlgorithm::new(
        proof.name,
        proof.script.iter().map(|&(job, machine)| (job, machine, None)),
    );
    let schedule = simulate(proof.instance.clone(), &script, EngineConfig::default())?;
    let half = Rational::ratio(1, 2);
    let m = proof.instance.machine_count();

    let mut holds = schedule.per_user_makespan() == &proof.expected_makespan;
    let mut failing_user = None;
    let mut min_rf: Option<Rational> = None;
    for user in proof.instance.users() {
        let id = user.user();
        let opt: Rational = optimum_makespan_bound(&user.processing_times(), m)
            .expect("non-empty user on two machines");
        let achieved = Rational::from_int(schedule.per_user_makespan()[&id]);
        let rf = opt.clone() / achieved;
        let ok = Some(&opt) == proof.expected_opt_bound.get(&id) && rf >= half;
        if !ok || schedule.per_user_makespan().get(&id) != proof.expected_makespan.get(&id) {
            holds = false;
            failing_user.get_or_insert(id);
        }
        min_rf = Some(match min_rf {
            Some(cur) => cur.min_of(rf),
            None => rf,
        });
    }

    Ok(VerificationVerdict {
        claim: proof.name.to_string(),
        family: None,
        instances_checked: 1,
        schedules_enumerated: 1,
        holds,
        bound: half,
        observed: min_rf.expect("two users"),
        observed_exact_optimum: None,
        witness: (!holds).then(|| {
            Witness::from_schedule(&schedule, failing_user.unwrap_or(UserId(1)))
        }),
        assumptions: vec!["scripted adversarial schedule, jobs at machine load front".into()],
    })
}

pub fn replay_theorem1_cases() -> Result<Vec<VerificationVerdict>, BoundsError> {
    theorem1_proof_instances()
        .iter()
        .map(replay_proof_instance)
        .collect()
}

struct Sweep {
    checked: u64,
    enumerated: u64,
    witness: Option<Witness>,
}

/// Walks every work-conserving schedule; `violates` returns the first user
/// breaking the claim in a schedule, if any.
fn sweep(
    family: &EqualLengthFamily,
    budget: u64,
    mut visit: impl FnMut(&Schedule) -> Option<UserId>,
) -> Result<Sweep, BoundsError> {
    let instance = Arc::new(family.instance());
    let mut schedules = enumerate_schedules(instance, EnumerationMode::WorkConserving, budget)?;
    let mut checked = 0;
    let mut witness = None;
    for schedule in schedules.by_ref() {
        checked += 1;
        if let Some(user) = visit(&schedule) {
            witness.get_or_insert_with(|| Witness::from_schedule(&schedule, user));
        }
    }
    Ok(Sweep {
        checked,
        enumerated: schedules.vectors_visited(),
        witness,
    })
}

fn assumptions(family: &EqualLengthFamily, sweep: &Sweep) -> Vec<String> {
    vec![
        WORK_CONSERVING_ASSUMPTION.to_string(),
        format!(
            "{} of {} load-front assignment vectors (m^n with m = {}, n = {}) are work-conserving",
            sweep.checked,
            sweep.enumerated,
            family.m,
            family.job_count()
        ),
    ]
}

/// Makespan-cap claims: every user's makespan stays within `cap`.
fn verify_makespan_cap(
    claim: &str,
    family: &EqualLengthFamily,
    cap: Time,
    budget: u64,
) -> Result<VerificationVerdict, BoundsError> {
    let mut worst = 0;
    let result = sweep(family, budget, |s| {
        let mut bad = None;
        for (user, &c) in s.per_user_makespan() {
            worst = worst.max(c);
            if c > cap && bad.is_none() {
                bad = Some(*user);
            }
        }
        bad
    })?;
    Ok(VerificationVerdict {
        claim: claim.to_string(),
        family: Some(*family),
        instances_checked: result.checked,
        schedules_enumerated: result.enumerated,
        holds: result.witness.is_none(),
        bound: Rational::from_int(cap),
        observed: Rational::from_int(worst),
        observed_exact_optimum: None,
        assumptions: assumptions(family, &result),
        witness: result.witness,
    })
}

/// For `k = b * m`: every user's makespan is at most `b * x * y`.
pub fn verify_lemma2(family: &EqualLengthFamily, budget: u64) -> Result<VerificationVerdict, BoundsError> {
    let b = family.b().ok_or_else(|| {
        BoundsError::InvalidFamily(format!("k = {} is not a multiple of m = {}", family.k, family.m))
    })?;
    let cap = u64::from(b) * family.x * u64::from(family.y);
    verify_makespan_cap("lemma2", family, cap, budget)
}

/// For `k > m` with `k` not a multiple of `m`: every user's makespan is at
/// most `ceil(n / m) * x`.
pub fn verify_lemma4(family: &EqualLengthFamily, budget: u64) -> Result<VerificationVerdict, BoundsError> {
    if family.k <= family.m || family.b().is_some() {
        return Err(BoundsError::InvalidFamily(format!(
            "need k > m and k not a multiple of m, got k = {}, m = {}",
            family.k, family.m
        )));
    }
    let cap = family.job_count().div_ceil(u64::from(family.m)) * family.x;
    verify_makespan_cap("lemma4", family, cap, budget)
}

/// Every user's RF, against total processing over `m`, is at least `1/k`.
pub fn verify_theorem2(family: &EqualLengthFamily, budget: u64) -> Result<VerificationVerdict, BoundsError> {
    let per_user: Vec<Time> = vec![family.x; family.y as usize];
    let opt: Rational = optimum_makespan_bound(&per_user, family.m).expect("y ≥ 1, m ≥ 2");
    let exact_opt = Rational::from_int(exact_optimal_makespan(&per_user, family.m)?);
    let bound = Rational::ratio(1, u64::from(family.k));

    let mut worst_rf: Option<Rational> = None;
    let mut worst_exact: Option<Rational> = None;
    let result = sweep(family, budget, |s| {
        let mut bad = None;
        for (user, &c) in s.per_user_makespan() {
            let achieved = Rational::from_int(c);
            let rf = opt.clone() / achieved.clone();
            let rf_exact = exact_opt.clone() / achieved;
            if rf < bound && bad.is_none() {
                bad = Some(*user);
            }
            worst_rf = Some(match worst_rf.take() {
                Some(cur) => cur.min_of(rf),
                None => rf,
            });
            worst_exact = Some(match worst_exact.take() {
                Some(cur) => cur.min_of(rf_exact),
                None => rf_exact,
            });
        }
        bad
    })?;
    Ok(VerificationVerdict {
        claim: "theorem2".to_string(),
        family: Some(*family),
        instances_checked: result.checked,
        schedules_enumerated: result.enumerated,
        holds: result.witness.is_none(),
        bound,
        observed: worst_rf.expect("at least one schedule"),
        observed_exact_optimum: worst_exact,
        assumptions: assumptions(family, &result),
        witness: result.witness,
    })
}
