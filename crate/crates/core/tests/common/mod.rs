//! Strategies and property checks shared by the integration suites and the
//! acceptance gate.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use fairsched::algorithms::builtin_algorithm;
use fairsched::metrics::{fairness_report, FairnessReport, MetricsConfig, Objective, UserOutcome};
use fairsched::model::{JobId, MachineId, ProblemInstance, Schedule, Time, UserId};
use fairsched::{simulate, EngineConfig, Rational, Scalar, ScriptedAlgorithm};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const POLICIES: [&str; 3] = ["greedy", "rr-user", "dedicated"];

/// `m`, then one processing-time list per user.
pub fn instance_strategy(max_users: usize, max_jobs: usize, max_p: Time) -> impl Strategy<Value = ProblemInstance> {
    (
        2u32..=3,
        prop::collection::vec(prop::collection::vec(1..=max_p, 1..=max_jobs), 2..=max_users),
    )
        .prop_map(|(m, users)| {
            let refs: Vec<&[Time]> = users.iter().map(Vec::as_slice).collect();
            ProblemInstance::from_processing_times(m, &refs).expect("strategy builds valid instances")
        })
}

/// An instance plus a machine choice for every job, in arrival order.
pub fn scripted_strategy() -> impl Strategy<Value = (ProblemInstance, Vec<u32>)> {
    instance_strategy(4, 4, 9).prop_flat_map(|inst| {
        let m = inst.machine_count();
        let n = inst.total_jobs();
        (Just(inst), prop::collection::vec(1..=m, n))
    })
}

pub fn run_policy(instance: &ProblemInstance, name: &str) -> Schedule {
    let alg = builtin_algorithm(name).unwrap();
    simulate(Arc::new(instance.clone()), alg.as_ref(), EngineConfig::default()).unwrap()
}

pub fn run_scripted(instance: &ProblemInstance, machines: &[u32]) -> Schedule {
    let script = ScriptedAlgorithm::new(
        "random",
        instance
            .jobs_in_arrival_order()
            .iter()
            .zip(machines)
            .map(|(job, &m)| (job.id, MachineId(m), None)),
    );
    simulate(Arc::new(instance.clone()), &script, EngineConfig::default()).unwrap()
}

pub fn makespan_report(schedule: &Schedule) -> FairnessReport<Rational> {
    fairness_report(schedule, Objective::Makespan, &MetricsConfig::default()).unwrap()
}

/// Random per-user (achieved, optimum) pairs drawn from a small range so
/// that ties between users are common.
pub fn outcome_strategy() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((1u64..=6, 1u64..=6).prop_map(|(a, b)| (a.max(b), a.min(b))), 2..=6)
}

pub fn report_from_pairs(pairs: &[(u64, u64)]) -> FairnessReport<Rational> {
    let outcomes: BTreeMap<UserId, UserOutcome<Rational>> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(achieved, optimum))| {
            let user = UserId(i as u32 + 1);
            (user, UserOutcome::new(user, Rational::from_int(achieved), Rational::from_int(optimum)))
        })
        .collect();
    FairnessReport::from_outcomes(Objective::Makespan, outcomes).unwrap()
}

fn zero() -> Rational {
    Rational::from_int(0)
}

fn one() -> Rational {
    Rational::from_int(1)
}

pub fn check_ranges(report: &FairnessReport<Rational>) -> Result<(), TestCaseError> {
    let (zero, one) = (zero(), one());
    for rf in report.fairness_index.relative_fairness.values() {
        prop_assert!(*rf > zero && *rf <= one, "RF {rf} outside (0, 1]");
    }
    let gf = report.global_fairness();
    prop_assert!(*gf > zero && *gf <= one, "GF {gf} outside (0, 1]");
    let di = &report.discrimination_index;
    for v in di.udi.values().chain(di.rdi.values()).chain([&di.gdi]) {
        prop_assert!(*v >= zero && *v < one, "discrimination {v} outside [0, 1)");
    }
    Ok(())
}

/// Range bounds over a random (possibly unfair) online schedule.
pub fn prop_ranges((instance, machines): (ProblemInstance, Vec<u32>)) -> Result<(), TestCaseError> {
    check_ranges(&makespan_report(&run_scripted(&instance, &machines)))?;
    for name in POLICIES {
        check_ranges(&makespan_report(&run_policy(&instance, name)))?;
    }
    Ok(())
}

/// Multiplying every processing time by `factor` leaves all RFs unchanged.
pub fn prop_scale_independent((instance, factor): (ProblemInstance, Time)) -> Result<(), TestCaseError> {
    let scaled = instance.scaled(factor);
    for name in POLICIES {
        let base = makespan_report(&run_policy(&instance, name));
        let big = makespan_report(&run_policy(&scaled, name));
        prop_assert_eq!(&base.fairness_index, &big.fairness_index, "{}", name);
    }
    Ok(())
}

/// Worsening one user's achieved value lowers that user's RF and GF, and
/// leaves everyone else alone.
pub fn prop_degradation_monotone((pairs, victim, extra): (Vec<(u64, u64)>, usize, u64)) -> Result<(), TestCaseError> {
    let victim = victim % pairs.len();
    let before = report_from_pairs(&pairs);
    let mut worse = pairs.clone();
    worse[victim].0 += extra;
    let after = report_from_pairs(&worse);
    prop_assert!(after.global_fairness() < before.global_fairness());
    for (user, rf) in &after.fairness_index.relative_fairness {
        let old = &before.fairness_index.relative_fairness[user];
        if user.0 as usize == victim + 1 {
            prop_assert!(rf < old);
        } else {
            prop_assert_eq!(rf, old);
        }
    }
    Ok(())
}

/// Every RDI is zero exactly when every user has the same RF.
pub fn prop_rdi_zero_iff_absolute(pairs: Vec<(u64, u64)>) -> Result<(), TestCaseError> {
    let report = report_from_pairs(&pairs);
    let all_zero = report.discrimination_index.rdi.values().all(|v| *v == zero());
    prop_assert_eq!(all_zero, report.absolute_fair);
    prop_assert_eq!(report.exact_b_fair().is_some(), report.absolute_fair);
    Ok(())
}

/// For makespan, stretch is the reciprocal of RF.
pub fn prop_rf_times_stretch((instance, machines): (ProblemInstance, Vec<u32>)) -> Result<(), TestCaseError> {
    let report = makespan_report(&run_scripted(&instance, &machines));
    for (user, rf) in &report.fairness_index.relative_fairness {
        prop_assert_eq!(rf.clone() * report.stretch[user].clone(), one());
    }
    Ok(())
}

/// GDI is the mean of the UDIs.
pub fn prop_gdi_is_mean_udi(pairs: Vec<(u64, u64)>) -> Result<(), TestCaseError> {
    let report = report_from_pairs(&pairs);
    let di = &report.discrimination_index;
    let sum = di.udi.values().fold(zero(), |acc, v| acc + v.clone());
    prop_assert_eq!(sum / Rational::from_int(di.udi.len() as u64), di.gdi.clone());
    Ok(())
}

/// Minimum makespan of `jobs` on `m` machines by trying all `m^n`
/// assignments.
pub fn brute_force_makespan(jobs: &[Time], m: u32) -> Time {
    let n = jobs.len() as u32;
    let mut best = Time::MAX;
    for code in 0..u64::from(m).pow(n) {
        let mut loads = vec![0; m as usize];
        let mut c = code;
        for &p in jobs {
            loads[(c % u64::from(m)) as usize] += p;
            c /= u64::from(m);
        }
        best = best.min(*loads.iter().max().unwrap());
    }
    best
}

pub fn job(user: u32, index: u32) -> JobId {
    JobId::new(user, index)
}
