//! Exact offline optima for small job sets on identical machines.

use std::cmp::Ordering;

use thiserror::Error;

use crate::model::Time;

/// Largest job count the exact searches accept by default.
pub const DEFAULT_ORACLE_LIMIT: usize = 14;

/// Job count above which the weighted search is replaced by a lower bound.
pub const DEFAULT_WEIGHTED_ORACLE_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{jobs} jobs exceed the exact-oracle limit of {limit}; use the bound-only mode (total processing / m) instead")]
    OverLimit { jobs: usize, limit: usize },
    #[error("machine count must be ≥ 1")]
    NoMachines,
    #[error("enumeration needs {} schedules but the budget is {budget}", required.map_or_else(|| "more than 2^64".to_string(), |r| r.to_string()))]
    BudgetExceeded { required: Option<u64>, budget: u64 },
}

/// `max(ceil(sum / m), max p)`.
pub fn makespan_lower_bound(jobs: &[Time], m: u32) -> Time {
    let total: Time = jobs.iter().sum();
    let longest = jobs.iter().copied().max().unwrap_or(0);
    total.div_ceil(u64::from(m.max(1))).max(longest)
}

/// Longest-processing-time-first list schedule.
pub fn lpt_makespan(jobs: &[Time], m: u32) -> Time {
    let mut sorted = jobs.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut loads = vec![0; m.max(1) as usize];
    for p in sorted {
        let slot = (0..loads.len()).min_by_key(|&i| loads[i]).expect("machine");
        loads[slot] += p;
    }
    loads.into_iter().max().unwrap_or(0)
}

pub fn exact_optimal_makespan(jobs: &[Time], m: u32) -> Result<Time, OracleError> {
    exact_optimal_makespan_with_limit(jobs, m, DEFAULT_ORACLE_LIMIT)
}

/// Minimum makespan of `jobs` alone on `m` machines, by branch and bound.
pub fn exact_optimal_makespan_with_limit(
    jobs: &[Time],
    m: u32,
    limit: usize,
) -> Result<Time, OracleError> {
    if m == 0 {
        return Err(OracleError::NoMachines);
    }
    if jobs.len() > limit {
        return Err(OracleError::OverLimit {
            jobs: jobs.len(),
            limit,
        });
    }
    if jobs.is_empty() {
        return Ok(0);
    }
    let mut sorted = jobs.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut search = MakespanSearch {
        jobs: &sorted,
        lower: makespan_lower_bound(jobs, m),
        best: lpt_makespan(jobs, m),
        loads: vec![0; (m as usize).min(sorted.len())],
    };
    search.descend(0);
    Ok(search.best)
}

struct MakespanSearch<'a> {
    jobs: &'a [Time],
    lower: Time,
    best: Time,
    loads: Vec<Time>,
}

impl MakespanSearch<'_> {
    fn descend(&mut self, next: usize) {
        if self.best == self.lower {
            return;
        }
        if next == self.jobs.len() {
            self.best = self.loads.iter().copied().max().unwrap_or(0);
            return;
        }
        let p = self.jobs[next];
        let mut tried: Vec<Time> = Vec::with_capacity(self.loads.len());
        for slot in 0..self.loads.len() {
            let load = self.loads[slot];
            // Machines with equal load are interchangeable.
            if tried.contains(&load) || load + p >= self.best {
                continue;
            }
            tried.push(load);
            self.loads[slot] += p;
            self.descend(next + 1);
            self.loads[slot] -= p;
        }
    }
}

/// Minimum sum of completion times on `m` machines: shortest job first, dealt
/// round-robin (optimal for unweighted completion time on identical machines).
pub fn spt_sum_completion(jobs: &[Time], m: u32) -> Time {
    let mut sorted = jobs.to_vec();
    sorted.sort_unstable();
    let mut loads = vec![0; m.max(1) as usize];
    let mut total = 0;
    for (i, p) in sorted.into_iter().enumerate() {
        let slot = i % loads.len();
        loads[slot] += p;
        total += loads[slot];
    }
    total
}

/// A job for the weighted objective; weights are integers here, callers
/// scale rational weights to a common denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedJob {
    pub processing_time: Time,
    pub weight: u64,
}

/// Smith order: ascending `p / w`, zero weights last.
fn smith_order(a: &WeightedJob, b: &WeightedJob) -> Ordering {
    let lhs = u128::from(a.processing_time) * u128::from(b.weight);
    let rhs = u128::from(b.processing_time) * u128::from(a.weight);
    lhs.cmp(&rhs)
}

fn single_machine_weighted(jobs: &[WeightedJob]) -> u128 {
    let mut sorted = jobs.to_vec();
    sorted.sort_by(smith_order);
    let mut t = 0u128;
    let mut total = 0u128;
    for j in sorted {
        t += u128::from(j.processing_time);
        total += u128::from(j.weight) * t;
    }
    total
}

/// Minimum total weighted completion time of `jobs` alone on `m` machines.
pub fn exact_min_weighted_completion(
    jobs: &[WeightedJob],
    m: u32,
    limit: usize,
) -> Result<u128, OracleError> {
    if m == 0 {
        return Err(OracleError::NoMachines);
    }
    if jobs.len() > limit {
        return Err(OracleError::OverLimit {
            jobs: jobs.len(),
            limit,
        });
    }
    let mut sorted = jobs.to_vec();
    sorted.sort_by(smith_order);

    // Greedy start: each job in Smith order onto the least loaded machine.
    let machines = (m as usize).min(sorted.len().max(1));
    let mut loads = vec![0u128; machines];
    let mut best = 0u128;
    for j in &sorted {
        let slot = (0..machines).min_by_key(|&i| loads[i]).expect("machine");
        loads[slot] += u128::from(j.processing_time);
        best += u128::from(j.weight) * loads[slot];
    }

    let mut tail_bound = vec![0u128; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        tail_bound[i] =
            tail_bound[i + 1] + u128::from(sorted[i].weight) * u128::from(sorted[i].processing_time);
    }

    let mut search = WeightedSearch {
        jobs: &sorted,
        tail_bound,
        best,
        loads: vec![0; machines],
    };
    search.descend(0, 0);
    Ok(search.best)
}

struct WeightedSearch<'a> {
    jobs: &'a [WeightedJob],
    tail_bound: Vec<u128>,
    best: u128,
    loads: Vec<u128>,
}

impl WeightedSearch<'_> {
    // Jobs arrive in Smith order, so appending keeps every machine's
    // sequence Smith-sorted and the partial cost is exact.
    fn descend(&mut self, next: usize, cost: u128) {
        if cost + self.tail_bound[next] >= self.best {
            return;
        }
        if next == self.jobs.len() {
            self.best = cost;
            return;
        }
        let job = self.jobs[next];
        let mut tried: Vec<u128> = Vec::with_capacity(self.loads.len());
        for slot in 0..self.loads.len() {
            let load = self.loads[slot];
            if tried.contains(&load) {
                continue;
            }
            tried.push(load);
            let completion = load + u128::from(job.processing_time);
            self.loads[slot] = completion;
            self.descend(next + 1, cost + u128::from(job.weight) * completion);
            self.loads[slot] = load;
        }
    }
}

/// Lower bound on total weighted completion time on `m` machines:
/// `max(sum w p, (2 * W1 + (m - 1) * sum w p) / (2m))`, where `W1` is the
/// single-machine Smith-order cost. Returned as `(numerator, denominator)`.
pub fn weighted_completion_lower_bound(jobs: &[WeightedJob], m: u32) -> (u128, u128) {
    let m = u128::from(m.max(1));
    let wp: u128 = jobs
        .iter()
        .map(|j| u128::from(j.weight) * u128::from(j.processing_time))
        .sum();
    let single = single_machine_weighted(jobs);
    let numer = 2 * single + (m - 1) * wp;
    let denom = 2 * m;
    if wp * denom >= numer {
        (wp, 1)
    } else {
        (numer, denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(exact_optimal_makespan(&[1, 2], 2).unwrap(), 2);
        assert_eq!(exact_optimal_makespan(&[7], 3).unwrap(), 7);
        assert_eq!(exact_optimal_makespan(&[5, 6], 2).unwrap(), 6);
        assert_eq!(exact_optimal_makespan(&[3, 3, 2, 2, 2], 2).unwrap(), 6);
        assert_eq!(exact_optimal_makespan(&[], 2).unwrap(), 0);
        // Single machine: everything is serial.
        assert_eq!(exact_optimal_makespan(&[4, 1, 3], 1).unwrap(), 8);
    }

    #[test]
    fn lpt_is_not_always_optimal() {
        // LPT gives 7 here, optimum is 6 (3+3 | 2+2+2).
        let jobs = [3, 3, 2, 2, 2];
        assert_eq!(lpt_makespan(&jobs, 2), 7);
        assert_eq!(exact_optimal_makespan(&jobs, 2).unwrap(), 6);
    }

    #[test]
    fn over_limit_points_to_bound_mode() {
        let jobs = vec![1; 15];
        let err = exact_optimal_makespan(&jobs, 2).unwrap_err();
        assert_eq!(err, OracleError::OverLimit { jobs: 15, limit: 14 });
        assert!(err.to_string().contains("bound-only"));
        assert_eq!(exact_optimal_makespan_with_limit(&jobs, 2, 15).unwrap(), 8);
        assert_eq!(exact_optimal_makespan(&[1], 0), Err(OracleError::NoMachines));
    }

    #[test]
    fn fourteen_jobs_finish() {
        let jobs = [13, 11, 11, 10, 9, 8, 7, 7, 5, 4, 3, 3, 2, 1];
        let opt = exact_optimal_makespan(&jobs, 3).unwrap();
        assert_eq!(opt, makespan_lower_bound(&jobs, 3));
    }

    #[test]
    fn spt_examples() {
        // (1, 2) on two machines: both start at 0.
        assert_eq!(spt_sum_completion(&[2, 1], 2), 3);
        // (1, 2, 3) on one machine: 1 + 3 + 6.
        assert_eq!(spt_sum_completion(&[3, 1, 2], 1), 10);
    }

    #[test]
    fn weighted_examples() {
        let jobs = [
            WeightedJob { processing_time: 1, weight: 2 },
            WeightedJob { processing_time: 2, weight: 1 },
        ];
        assert_eq!(exact_min_weighted_completion(&jobs, 2, 10).unwrap(), 4);
        assert_eq!(exact_min_weighted_completion(&jobs, 1, 10).unwrap(), 2 + 3);
        let zero = [
            WeightedJob { processing_time: 5, weight: 0 },
            WeightedJob { processing_time: 1, weight: 1 },
        ];
        assert_eq!(exact_min_weighted_completion(&zero, 1, 10).unwrap(), 1);
        assert!(exact_min_weighted_completion(&jobs, 2, 1).is_err());
    }

    #[test]
    fn weighted_bound_below_optimum() {
        let jobs: Vec<_> = [(3, 1), (1, 4), (2, 2), (5, 1), (2, 3)]
            .into_iter()
            .map(|(p, w)| WeightedJob { processing_time: p, weight: w })
            .collect();
        for m in 1..=3 {
            let opt = exact_min_weighted_completion(&jobs, m, 10).unwrap();
            let (n, d) = weighted_completion_lower_bound(&jobs, m);
            assert!(n <= opt * d, "m={m}: bound {n}/{d} above optimum {opt}");
        }
        // One machine: the bound is the exact Smith cost.
        let (n, d) = weighted_completion_lower_bound(&jobs, 1);
        assert_eq!(n, exact_min_weighted_completion(&jobs, 1, 10).unwrap() * d);
    }
}
