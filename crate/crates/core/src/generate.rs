//! Synthetic workloads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{ModelError, ProblemInstance, Time, UserSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// `k` users with `y` jobs of length `x` each.
    EqualLength { k: u32, m: u32, x: Time, y: u32 },
    /// Processing times uniform in `[p_min, p_max]`. `jobs_per_user` holds
    /// either one count for every user or one count per user.
    UniformRandom {
        k: u32,
        m: u32,
        jobs_per_user: Vec<u32>,
        p_min: Time,
        p_max: Time,
        seed: u64,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("processing-time range [{lo}, {hi}] is invalid; need 1 ≤ lo ≤ hi")]
    Range { lo: Time, hi: Time },
    #[error("jobs_per_user has {given} entries; give 1 or k = {k}")]
    JobCounts { given: usize, k: u32 },
    #[error("every user needs at least one job")]
    ZeroJobs,
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn generate(spec: &GeneratorSpec) -> Result<ProblemInstance, GenerateError> {
    match spec {
        GeneratorSpec::EqualLength { k, m, x, y } => {
            if *x < 1 {
                return Err(GenerateError::Range { lo: *x, hi: *x });
            }
            if *y < 1 {
                return Err(GenerateError::ZeroJobs);
            }
            let jobs = vec![*x; *y as usize];
            let users: Vec<&[Time]> = (0..*k).map(|_| jobs.as_slice()).collect();
            Ok(ProblemInstance::from_processing_times(*m, &users)?)
        }
        GeneratorSpec::UniformRandom {
            k,
            m,
            jobs_per_user,
            p_min,
            p_max,
            seed,
        } => {
            if *p_min < 1 || p_min > p_max {
                return Err(GenerateError::Range {
                    lo: *p_min,
                    hi: *p_max,
                });
            }
            let counts: Vec<u32> = match jobs_per_user.len() {
                1 => vec![jobs_per_user[0]; *k as usize],
                n if n == *k as usize => jobs_per_user.clone(),
                given => return Err(GenerateError::JobCounts { given, k: *k }),
            };
            if counts.contains(&0) {
                return Err(GenerateError::ZeroJobs);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let users = counts
                .iter()
                .enumerate()
                .map(|(r, &n)| {
                    let times: Vec<Time> = (0..n).map(|_| rng.gen_range(*p_min..=*p_max)).collect();
                    UserSequence::from_processing_times(r as u32 + 1, &times)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProblemInstance::new(*m, users)?)
        }
    }
}
