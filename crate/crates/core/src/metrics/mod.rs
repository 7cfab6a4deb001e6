//! Per-user fairness measures.
//!
//! Every user has an achieved objective value and an optimum for it. Relative
//! fairness is `optimum / achieved`; the rest is derived from those ratios:
//!
//! | measure | value |
//! |---------|-------|
//! | RF      | `opt / achieved` per user |
//! | RFP     | `RF * 100` |
//! | GF      | mean of RF |
//! | GFP     | `GF * 100` |
//! | UDI     | `1 - RF` |
//! | GDI     | `1 - GF` |
//! | RDI     | `GF - RF` when `RF < GF`, else 0 |
//!
//! All functions are generic over [`Scalar`] so they can run on exact
//! rationals or on floats.

mod objectives;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{JobId, ModelError, Time, UserId, Violation};
use crate::oracle::OracleError;
use crate::scalar::Scalar;

pub use objectives::{fairness_report, objective_values, MetricsConfig, OptimumMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("user has no jobs")]
    EmptySequence,
    #[error("machine count must be ≥ 2, got {0}")]
    TooFewMachines(u32),
    #[error("achieved value must be positive (user {0})")]
    NonPositiveAchieved(UserId),
    #[error("optimum value must be positive (user {0})")]
    NonPositiveOptimum(UserId),
    #[error("no users to aggregate")]
    NoUsers,
    #[error("Jain's index needs at least one positive value")]
    AllZero,
    #[error("weighted objective needs a weight on every job; {0} has none")]
    MissingWeight(JobId),
    #[error("schedule is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidSchedule(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Makespan,
    SumCompletion,
    WeightedCompletion,
    SumFlow,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Makespan => "makespan",
            Objective::SumCompletion => "sum_completion",
            Objective::WeightedCompletion => "weighted_completion",
            Objective::SumFlow => "sum_flow",
        }
    }
}

/// Where a user's optimum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumSource {
    /// Total processing spread evenly over all machines.
    FairBound,
    /// Exact offline optimum of the user's jobs alone.
    Exact,
    /// Lower bound used when the exact search is over its size limit.
    LowerBound,
    /// Sum of desired flow times.
    Desired,
}

impl OptimumSource {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimumSource::FairBound => "fair_bound",
            OptimumSource::Exact => "exact",
            OptimumSource::LowerBound => "lower_bound",
            OptimumSource::Desired => "desired",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserOutcome<T> {
    pub user: UserId,
    pub achieved: T,
    pub optimum: T,
    pub optimum_source: OptimumSource,
}

impl<T: Scalar> UserOutcome<T> {
    pub fn new(user: UserId, achieved: T, optimum: T) -> Self {
        UserOutcome {
            user,
            achieved,
            optimum,
            optimum_source: OptimumSource::FairBound,
        }
    }
}

/// Makespan a user could get with all machines to itself and perfect
/// splitting: total processing over `m`.
pub fn optimum_makespan_bound<T: Scalar>(processing_times: &[Time], m: u32) -> Result<T, MetricError> {
    if processing_times.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    if m < 2 {
        return Err(MetricError::TooFewMachines(m));
    }
    Ok(T::ratio(processing_times.iter().sum(), u64::from(m)))
}

pub fn relative_fairness<T: Scalar>(outcome: &UserOutcome<T>) -> Result<T, MetricError> {
    if outcome.achieved <= T::zero() {
        return Err(MetricError::NonPositiveAchieved(outcome.user));
    }
    if outcome.optimum <= T::zero() {
        return Err(MetricError::NonPositiveOptimum(outcome.user));
    }
    Ok(outcome.optimum.clone() / outcome.achieved.clone())
}

pub fn relative_fairness_percent<T: Scalar>(rf: &T) -> T {
    rf.clone() * T::from_int(100)
}

pub fn global_fairness<T: Scalar>(rfs: &BTreeMap<UserId, T>) -> Result<T, MetricError> {
    if rfs.is_empty() {
        return Err(MetricError::NoUsers);
    }
    let sum = rfs.values().cloned().fold(T::zero(), |a, b| a + b);
    Ok(sum / T::from_int(rfs.len() as u64))
}

pub fn global_fairness_percent<T: Scalar>(gf: &T) -> T {
    gf.clone() * T::from_int(100)
}

pub fn user_discrimination<T: Scalar>(rf: &T) -> T {
    T::one() - rf.clone()
}

pub fn global_discrimination<T: Scalar>(gf: &T) -> T {
    T::one() - gf.clone()
}

/// Strict comparison: `rf == gf` falls through to zero.
pub fn relative_discrimination<T: Scalar>(rf: &T, gf: &T) -> T {
    if rf < gf && !rf.same(gf) {
        gf.clone() - rf.clone()
    } else {
        T::zero()
    }
}

/// Jain's index normalised by the number of values, so it lies in `(0, 1]`.
pub fn jain_index<T: Scalar>(values: &[T]) -> Result<T, MetricError> {
    if values.iter().all(|v| *v <= T::zero()) {
        return Err(MetricError::AllZero);
    }
    let sum = values.iter().cloned().fold(T::zero(), |a, b| a + b);
    let squares = values
        .iter()
        .cloned()
        .fold(T::zero(), |a, b| a + b.clone() * b);
    Ok(sum.clone() * sum / (T::from_int(values.len() as u64) * squares))
}

/// Degradation factor `achieved / optimum`.
pub fn stretch<T: Scalar>(achieved: &T, optimum: &T) -> Result<T, MetricError> {
    if *optimum <= T::zero() {
        return Err(MetricError::NonPositiveOptimum(UserId(0)));
    }
    Ok(achieved.clone() / optimum.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessIndex<T> {
    pub relative_fairness: BTreeMap<UserId, T>,
    pub global_fairness: T,
}

impl<T: Scalar> FairnessIndex<T> {
    pub fn from_relative(relative_fairness: BTreeMap<UserId, T>) -> Result<Self, MetricError> {
        let global_fairness = global_fairness(&relative_fairness)?;
        Ok(FairnessIndex {
            relative_fairness,
            global_fairness,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationIndex<T> {
    pub udi: BTreeMap<UserId, T>,
    pub gdi: T,
    pub rdi: BTreeMap<UserId, T>,
}

impl<T: Scalar> DiscriminationIndex<T> {
    pub fn from_index(index: &FairnessIndex<T>) -> Self {
        let gf = &index.global_fairness;
        DiscriminationIndex {
            udi: index
                .relative_fairness
                .iter()
                .map(|(u, rf)| (*u, user_discrimination(rf)))
                .collect(),
            gdi: global_discrimination(gf),
            rdi: index
                .relative_fairness
                .iter()
                .map(|(u, rf)| (*u, relative_discrimination(rf, gf)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport<T> {
    pub objective: Objective,
    pub outcomes: BTreeMap<UserId, UserOutcome<T>>,
    pub fairness_index: FairnessIndex<T>,
    pub discrimination_index: DiscriminationIndex<T>,
    pub rf_percent: BTreeMap<UserId, T>,
    pub gf_percent: T,
    /// Smallest RF: the algorithm is at least this-fair.
    pub fairness_level: T,
    /// All users got the same RF.
    pub absolute_fair: bool,
    pub jain_index: T,
    pub stretch: BTreeMap<UserId, T>,
}

impl<T: Scalar> FairnessReport<T> {
    /// Builds the report from per-user achieved and optimum values.
    pub fn from_outcomes(
        objective: Objective,
        outcomes: BTreeMap<UserId, UserOutcome<T>>,
    ) -> Result<Self, MetricError> {
        let mut rfs = BTreeMap::new();
        let mut stretches = BTreeMap::new();
        for (user, outcome) in &outcomes {
            rfs.insert(*user, relative_fairness(outcome)?);
            stretches.insert(*user, stretch(&outcome.achieved, &outcome.optimum)?);
        }
        let fairness_index = FairnessIndex::from_relative(rfs)?;
        let discrimination_index = DiscriminationIndex::from_index(&fairness_index);
        let rf_values: Vec<T> = fairness_index.relative_fairness.values().cloned().collect();
        let first = rf_values[0].clone();
        let absolute_fair = rf_values.iter().all(|rf| rf.same(&first));
        let fairness_level = rf_values
            .iter()
            .cloned()
            .reduce(Scalar::min_of)
            .expect("non-empty");
        Ok(FairnessReport {
            objective,
            rf_percent: fairness_index
                .relative_fairness
                .iter()
                .map(|(u, rf)| (*u, relative_fairness_percent(rf)))
                .collect(),
            gf_percent: global_fairness_percent(&fairness_index.global_fairness),
            jain_index: jain_index(&rf_values)?,
            fairness_level,
            absolute_fair,
            stretch: stretches,
            outcomes,
            fairness_index,
            discrimination_index,
        })
    }

    /// `Some(b)` when the algorithm is exactly b-fair, i.e. every user has RF `b`.
    pub fn exact_b_fair(&self) -> Option<&T> {
        self.absolute_fair.then_some(&self.fairness_level)
    }

    pub fn global_fairness(&self) -> &T {
        &self.fairness_index.global_fairness
    }

    pub fn relative_fairness(&self, user: UserId) -> Option<&T> {
        self.fairness_index.relative_fairness.get(&user)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn rf_map(values: &[Rational]) -> BTreeMap<UserId, Rational> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| (UserId(i as u32 + 1), v.clone()))
            .collect()
    }

    #[test]
    fn optimum_bound_examples() {
        assert_eq!(optimum_makespan_bound::<Rational>(&[1, 2], 2).unwrap(), q(3, 2));
        assert_eq!(optimum_makespan_bound::<Rational>(&[5, 6], 2).unwrap(), q(11, 2));
        assert_eq!(optimum_makespan_bound::<Rational>(&[1, 1, 1], 3).unwrap(), q(1, 1));
        assert_eq!(optimum_makespan_bound::<f64>(&[1, 2], 2).unwrap(), 1.5);
        assert_eq!(
            optimum_makespan_bound::<Rational>(&[], 2),
            Err(MetricError::EmptySequence)
        );
        assert_eq!(
            optimum_makespan_bound::<Rational>(&[1], 1),
            Err(MetricError::TooFewMachines(1))
        );
    }

    #[test]
    fn relative_fairness_examples() {
        let rf = |opt: Rational, achieved: Rational| {
            relative_fairness(&UserOutcome::new(UserId(1), achieved, opt)).unwrap()
        };
        // Printed as 0.13 and 0.38 (truncated); exact values are 3/22 and 7/18.
        assert_eq!(rf(q(3, 2), q(11, 1)), q(3, 22));
        assert_eq!(rf(q(7, 2), q(9, 1)), q(7, 18));
        assert_eq!(rf(q(5, 1), q(5, 1)), q(1, 1));
        assert_eq!(
            relative_fairness(&UserOutcome::new(UserId(2), q(0, 1), q(1, 1))),
            Err(MetricError::NonPositiveAchieved(UserId(2)))
        );
    }

    #[test]
    fn percentages() {
        assert_eq!(relative_fairness_percent(&q(55, 100)), q(55, 1));
        assert_eq!(relative_fairness_percent(&q(1, 1)), q(100, 1));
        assert_eq!(relative_fairness_percent(&q(3, 22)).to_decimal(2), "13.64");
    }

    #[test]
    fn global_fairness_examples() {
        let gf = global_fairness(&rf_map(&[q(3, 22), q(7, 18), q(11, 20)])).unwrap();
        // 0.3584..., printed as 0.35.
        assert_eq!(gf, q(3, 22) / q(3, 1) + q(7, 18) / q(3, 1) + q(11, 20) / q(3, 1));
        assert!((gf.to_decimal(4).parse::<f64>().unwrap() - 0.3584).abs() < 1e-9);
        assert_eq!(
            global_fairness(&rf_map(&[q(3, 5), q(3, 5), q(3, 5), q(1, 5)])).unwrap(),
            q(1, 2)
        );
        assert_eq!(global_fairness(&rf_map(&[q(1, 1), q(1, 1)])).unwrap(), q(1, 1));
        assert_eq!(
            global_fairness::<Rational>(&BTreeMap::new()),
            Err(MetricError::NoUsers)
        );
    }

    #[test]
    fn discrimination_examples() {
        assert_eq!(user_discrimination(&q(3, 5)), q(2, 5));
        assert_eq!(user_discrimination(&q(1, 5)), q(4, 5));
        assert_eq!(user_discrimination(&q(1, 1)), q(0, 1));
        assert_eq!(global_discrimination(&q(1, 2)), q(1, 2));
        assert_eq!(global_discrimination(&q(1, 1)), q(0, 1));
        assert_eq!(global_discrimination(&q(35, 100)), q(65, 100));
        assert_eq!(relative_discrimination(&q(1, 5), &q(1, 2)), q(3, 10));
        assert_eq!(relative_discrimination(&q(3, 5), &q(1, 2)), q(0, 1));
        assert_eq!(relative_discrimination(&q(1, 2), &q(1, 2)), q(0, 1));
    }

    #[test]
    fn discrimination_tuple_for_four_users() {
        let fi = FairnessIndex::from_relative(rf_map(&[q(3, 5), q(3, 5), q(3, 5), q(1, 5)])).unwrap();
        let di = DiscriminationIndex::from_index(&fi);
        assert_eq!(
            di.udi.values().cloned().collect::<Vec<_>>(),
            vec![q(2, 5), q(2, 5), q(2, 5), q(4, 5)]
        );
        assert_eq!(di.gdi, q(1, 2));
        assert_eq!(
            di.rdi.values().cloned().collect::<Vec<_>>(),
            vec![q(0, 1), q(0, 1), q(0, 1), q(3, 10)]
        );
    }

    #[test]
    fn jain_examples() {
        assert_eq!(jain_index(&[q(2, 7), q(2, 7), q(2, 7)]).unwrap(), q(1, 1));
        assert_eq!(jain_index(&[q(1, 1), q(0, 1)]).unwrap(), q(1, 2));
        assert_eq!(jain_index(&[q(0, 1), q(0, 1)]), Err(MetricError::AllZero));
        // Independent f64 evaluation of (sum)^2 / (k * sum of squares).
        let xs = [3.0 / 22.0, 7.0 / 18.0, 11.0 / 20.0];
        let s: f64 = xs.iter().sum();
        let s2: f64 = xs.iter().map(|x| x * x).sum();
        let expected = s * s / (3.0 * s2);
        let exact = jain_index(&[q(3, 22), q(7, 18), q(11, 20)]).unwrap();
        assert!((exact.to_f64().unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.8159).abs() < 1e-4);
    }

    #[test]
    fn stretch_examples() {
        assert_eq!(stretch(&q(11, 1), &q(3, 2)).unwrap(), q(22, 3));
        assert_eq!(stretch(&q(4, 1), &q(4, 1)).unwrap(), q(1, 1));
        assert_eq!(stretch(&q(9, 1), &q(7, 2)).unwrap(), q(18, 7));
        assert!(stretch(&q(1, 1), &q(0, 1)).is_err());
    }

    use num_traits::ToPrimitive;

    #[test]
    fn report_from_outcomes_all_optimal() {
        let outcomes: BTreeMap<_, _> = [(1, 3u64, 2u64), (2, 5, 2)]
            .into_iter()
            .map(|(u, p, m)| {
                let v = Rational::ratio(p, m);
                (UserId(u), UserOutcome::new(UserId(u), v.clone(), v))
            })
            .collect();
        let r = FairnessReport::from_outcomes(Objective::Makespan, outcomes).unwrap();
        assert_eq!(*r.global_fairness(), q(1, 1));
        assert_eq!(r.discrimination_index.gdi, q(0, 1));
        assert!(r.absolute_fair);
        assert_eq!(r.exact_b_fair(), Some(&q(1, 1)));
        assert_eq!(r.jain_index, q(1, 1));
    }

    #[test]
    fn generic_over_floats() {
        let outcomes: BTreeMap<_, _> = [(1, 1.5f64, 11.0), (2, 3.5, 9.0), (3, 5.5, 10.0)]
            .into_iter()
            .enumerate()
            .map(|(i, (_, opt, c))| {
                let u = UserId(i as u32 + 1);
                (u, UserOutcome::new(u, c, opt))
            })
            .collect();
        let r = FairnessReport::from_outcomes(Objective::Makespan, outcomes).unwrap();
        assert!((r.global_fairness() - 0.35842).abs() < 1e-4);
        assert!(!r.absolute_fair);
        assert_eq!(r.exact_b_fair(), None);
        assert!((r.fairness_level - 3.0 / 22.0).abs() < 1e-12);
    }
}
