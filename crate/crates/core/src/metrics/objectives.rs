//! Achieved and optimum values per user for each supported objective.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::metrics::{
    optimum_makespan_bound, FairnessReport, MetricError, Objective, OptimumSource, UserOutcome,
};
use crate::model::{per_user_makespans, validate_schedule, Schedule, Time, UserSequence};
use crate::oracle::{
    exact_min_weighted_completion, exact_optimal_makespan_with_limit, spt_sum_completion,
    weighted_completion_lower_bound, WeightedJob, DEFAULT_ORACLE_LIMIT,
    DEFAULT_WEIGHTED_ORACLE_LIMIT,
};
use crate::scalar::Scalar;

/// Which optimum the makespan objective compares against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OptimumMode {
    /// Total processing over `m`.
    #[default]
    FairBound,
    /// Exact optimum of the user's jobs alone, falling back to the bound
    /// above the oracle limit.
    ExactOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsConfig {
    pub optimum: OptimumMode,
    pub oracle_limit: usize,
    pub weighted_oracle_limit: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            optimum: OptimumMode::FairBound,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            weighted_oracle_limit: DEFAULT_WEIGHTED_ORACLE_LIMIT,
        }
    }
}

pub fn objective_values<T: Scalar>(
    schedule: &Schedule,
    objective: Objective,
    config: &MetricsConfig,
) -> Result<BTreeMap<crate::model::UserId, UserOutcome<T>>, MetricError> {
    let m = schedule.instance().machine_count();
    let makespans = per_user_makespans(schedule)?;
    let completion = |job: crate::model::JobId| -> Time {
        schedule
            .assignment(job)
            .map(|a| a.completion)
            .expect("validated schedule assigns every job")
    };

    let mut out = BTreeMap::new();
    for user in schedule.instance().users() {
        let id = user.user();
        let outcome = match objective {
            Objective::Makespan => {
                let achieved = T::from_int(makespans[&id]);
                let times = user.processing_times();
                let exact = match config.optimum {
                    OptimumMode::ExactOracle if times.len() <= config.oracle_limit => Some(
                        exact_optimal_makespan_with_limit(&times, m, config.oracle_limit)?,
                    ),
                    _ => None,
                };
                match exact {
                    Some(opt) => UserOutcome {
                        user: id,
                        achieved,
                        optimum: T::from_int(opt),
                        optimum_source: OptimumSource::Exact,
                    },
                    None => UserOutcome {
                        user: id,
                        achieved,
                        optimum: optimum_makespan_bound(&times, m)?,
                        optimum_source: OptimumSource::FairBound,
                    },
                }
            }
            Objective::SumCompletion => UserOutcome {
                user: id,
                achieved: T::from_int(user.jobs().iter().map(|j| completion(j.id)).sum()),
                optimum: T::from_int(spt_sum_completion(&user.processing_times(), m)),
                optimum_source: OptimumSource::Exact,
            },
            Objective::WeightedCompletion => weighted_outcome(user, m, config, &completion)?,
            Objective::SumFlow => {
                let flow: i128 = user
                    .jobs()
                    .iter()
                    .map(|j| i128::from(completion(j.id)) - i128::from(j.arrival()))
                    .sum();
                if flow <= 0 {
                    return Err(MetricError::NonPositiveAchieved(id));
                }
                let desired: Time = user
                    .jobs()
                    .iter()
                    .map(|j| j.desired_flow.unwrap_or(j.processing_time))
                    .sum();
                UserOutcome {
                    user: id,
                    achieved: T::from_int(flow as u64),
                    optimum: T::from_int(desired),
                    optimum_source: OptimumSource::Desired,
                }
            }
        };
        out.insert(id, outcome);
    }
    Ok(out)
}

fn weighted_outcome<T: Scalar>(
    user: &UserSequence,
    m: u32,
    config: &MetricsConfig,
    completion: &dyn Fn(crate::model::JobId) -> Time,
) -> Result<UserOutcome<T>, MetricError> {
    let mut weights = Vec::with_capacity(user.len());
    for job in user.jobs() {
        weights.push(job.weight.ok_or(MetricError::MissingWeight(job.id))?);
    }
    // Scale to integer weights over a common denominator.
    let denom = weights.iter().fold(1u64, |acc, w| acc.lcm(w.denom()));
    let scaled: Vec<WeightedJob> = user
        .jobs()
        .iter()
        .zip(&weights)
        .map(|(job, w)| WeightedJob {
            processing_time: job.processing_time,
            weight: w.numer() * (denom / w.denom()),
        })
        .collect();
    let achieved: u128 = user
        .jobs()
        .iter()
        .zip(&scaled)
        .map(|(job, w)| u128::from(w.weight) * u128::from(completion(job.id)))
        .sum();

    let (opt_numer, opt_denom, source) = if scaled.len() <= config.weighted_oracle_limit {
        let opt = exact_min_weighted_completion(&scaled, m, config.weighted_oracle_limit)?;
        (opt, 1u128, OptimumSource::Exact)
    } else {
        let (n, d) = weighted_completion_lower_bound(&scaled, m);
        (n, d, OptimumSource::LowerBound)
    };

    Ok(UserOutcome {
        user: user.user(),
        achieved: big_ratio::<T>(achieved, u128::from(denom)),
        optimum: big_ratio::<T>(opt_numer, opt_denom * u128::from(denom)),
        optimum_source: source,
    })
}

fn big_ratio<T: Scalar>(numer: u128, denom: u128) -> T {
    let g = numer.gcd(&denom).max(1);
    let (n, d) = (numer / g, denom / g);
    let to_u64 = |v: u128| u64::try_from(v).expect("weighted objective value fits in 64 bits");
    T::ratio(to_u64(n), to_u64(d))
}

/// Validates the schedule, then builds the full report for `objective`.
pub fn fairness_report<T: Scalar>(
    schedule: &Schedule,
    objective: Objective,
    config: &MetricsConfig,
) -> Result<FairnessReport<T>, MetricError> {
    let violations = validate_schedule(schedule);
    if !violations.is_empty() {
        return Err(MetricError::InvalidSchedule(violations));
    }
    let outcomes = objective_values(schedule, objective, config)?;
    FairnessReport::from_outcomes(objective, outcomes)
}
