mod common;

use std::sync::Arc;

use common::*;
use fairsched::io::{parse_instance, parse_schedule, serialize_instance, serialize_schedule};
use fairsched::model::{ProblemInstance, Time};
use fairsched::validate_schedule;
use proptest::prelude::*;

fn prefix(instance: &ProblemInstance, rounds: usize) -> ProblemInstance {
    let users: Vec<Vec<Time>> = instance
        .users()
        .iter()
        .map(|u| u.processing_times().into_iter().take(rounds).collect())
        .collect();
    let refs: Vec<&[Time]> = users.iter().map(Vec::as_slice).collect();
    ProblemInstance::from_processing_times(instance.machine_count(), &refs).unwrap()
}

proptest! {
    #[test]
    fn simulated_schedules_validate(inst in instance_strategy(5, 5, 9)) {
        for name in POLICIES {
            let s = run_policy(&inst, name);
            prop_assert!(validate_schedule(&s).is_empty(), "{}: {:?}", name, validate_schedule(&s));
            prop_assert_eq!(s.assignments().len(), inst.total_jobs());
        }
    }

    #[test]
    fn random_scripts_validate(case in scripted_strategy()) {
        let s = run_scripted(&case.0, &case.1);
        prop_assert!(validate_schedule(&s).is_empty());
    }

    #[test]
    fn decisions_ignore_future_batches(inst in instance_strategy(4, 5, 9), rounds in 1usize..5) {
        let short = prefix(&inst, rounds);
        for name in POLICIES {
            let full = run_policy(&inst, name);
            let cut = run_policy(&short, name);
            for a in cut.assignments() {
                prop_assert_eq!(Some(a), full.assignment(a.job), "{}", name);
            }
        }
    }

    #[test]
    fn machines_never_idle_without_idling(case in scripted_strategy()) {
        let s = run_scripted(&case.0, &case.1);
        for timeline in s.machine_timelines() {
            let mut front = 0;
            for a in timeline {
                prop_assert_eq!(a.start, front);
                front = a.completion;
            }
        }
    }

    #[test]
    fn simulation_is_deterministic(inst in instance_strategy(4, 4, 9)) {
        for name in POLICIES {
            prop_assert_eq!(run_policy(&inst, name), run_policy(&inst, name));
        }
    }

    #[test]
    fn user_makespan_at_least_fair_share(inst in instance_strategy(4, 4, 9)) {
        let m = Time::from(inst.machine_count());
        let s = run_policy(&inst, "greedy");
        for user in inst.users() {
            prop_assert!(s.per_user_makespan()[&user.user()] * m >= user.total_processing());
        }
    }

    #[test]
    fn instance_round_trip(inst in instance_strategy(5, 5, 50)) {
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn schedule_round_trip(case in scripted_strategy()) {
        let s = run_scripted(&case.0, &case.1);
        let (back, name) = parse_schedule(&serialize_schedule(&s, "random")).unwrap();
        prop_assert_eq!(name, "random");
        prop_assert_eq!(back.assignments(), s.assignments());
        prop_assert_eq!(back.instance(), s.instance());
    }

    #[test]
    fn metric_ranges(case in scripted_strategy()) {
        prop_ranges(case)?;
    }

    #[test]
    fn scale_independence(inst in instance_strategy(4, 4, 9), factor in 1u64..=7) {
        prop_scale_independent((inst, factor))?;
    }

    #[test]
    fn degradation_lowers_gf(pairs in outcome_strategy(), victim in 0usize..6, extra in 1u64..10) {
        prop_degradation_monotone((pairs, victim, extra))?;
    }

    #[test]
    fn rdi_zero_iff_absolute(pairs in outcome_strategy()) {
        prop_rdi_zero_iff_absolute(pairs)?;
    }

    #[test]
    fn stretch_inverts_rf(case in scripted_strategy()) {
        prop_rf_times_stretch(case)?;
    }

    #[test]
    fn gdi_is_mean_udi(pairs in outcome_strategy()) {
        prop_gdi_is_mean_udi(pairs)?;
    }
}

#[test]
fn shared_instance_is_not_copied() {
    let inst = Arc::new(ProblemInstance::from_processing_times(2, &[&[1], &[2]]).unwrap());
    let s = fairsched::simulate(inst.clone(), &fairsched::GreedyLeastLoaded, Default::default()).unwrap();
    assert!(Arc::ptr_eq(s.shared_instance(), &inst));
}
