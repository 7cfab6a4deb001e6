//! JSON and CSV file formats.
//!
//! Instance files:
//!
//! ```json
//! {
//!   "version": 1,
//!   "machine_count": 2,
//!   "users": [
//!     { "id": 1, "jobs": [ { "p": 1 }, { "p": 2, "weight": "3/2", "desired_flow": 4 } ] }
//!   ]
//! }
//! ```
//!
//! Script files list `{user, index, machine, start?}` entries in batch order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algorithms::ScriptedAlgorithm;
use crate::metrics::{FairnessReport, MetricsConfig, Objective, OptimumMode};
use crate::model::{
    validate_schedule, Assignment, Job, JobId, MachineId, ModelError, ProblemInstance, Schedule,
    Time, UserId, UserSequence, Weight,
};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

/// Fractional digits of rendered metric values.
pub const DECIMAL_PLACES: usize = 4;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("schedule is invalid: {0}")]
    InvalidSchedule(String),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn serialize_weight<S: Serializer>(w: &Option<Weight>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(w) if *w.denom() == 1 => s.serialize_u64(*w.numer()),
        Some(w) => s.serialize_str(&format!("{}/{}", w.numer(), w.denom())),
        None => s.serialize_none(),
    }
}

fn deserialize_weight<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Weight>, D::Error> {
    struct WeightVisitor;

    impl Visitor<'_> for WeightVisitor {
        type Value = Option<Weight>;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a non-negative integer or a string \"a/b\"")
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
            Ok(Some(Weight::from_integer(v)))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
            let (n, d) = match v.split_once('/') {
                Some((n, d)) => (n.trim(), d.trim()),
                None => (v.trim(), "1"),
            };
            let n: u64 = n.parse().map_err(|_| E::custom(format!("bad weight `{v}`")))?;
            let d: u64 = d.parse().map_err(|_| E::custom(format!("bad weight `{v}`")))?;
            if d == 0 {
                return Err(E::custom(format!("bad weight `{v}`: zero denominator")));
            }
            Ok(Some(Weight::new(n, d)))
        }
    }

    d.deserialize_any(WeightVisitor)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub p: Time,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_weight",
        deserialize_with = "deserialize_weight"
    )]
    pub weight: Option<Weight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desired_flow: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserEntry {
    pub id: u32,
    pub jobs: Vec<JobEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub machine_count: u32,
    pub users: Vec<UserEntry>,
}

impl InstanceFile {
    pub fn from_instance(instance: &ProblemInstance) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            machine_count: instance.machine_count(),
            users: instance
                .users()
                .iter()
                .map(|u| UserEntry {
                    id: u.user().0,
                    jobs: u
                        .jobs()
                        .iter()
                        .map(|j| JobEntry {
                            p: j.processing_time,
                            weight: j.weight,
                            desired_flow: j.desired_flow,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance, InputError> {
        if self.version != FORMAT_VERSION {
            return Err(InputError::Version(self.version));
        }
        let users = self
            .users
            .iter()
            .map(|u| {
                let jobs = u
                    .jobs
                    .iter()
                    .enumerate()
                    .map(|(i, j)| Job {
                        weight: j.weight,
                        desired_flow: j.desired_flow,
                        ..Job::new(u.id, i as u32 + 1, j.p)
                    })
                    .collect();
                UserSequence::new(UserId(u.id), jobs)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProblemInstance::new(self.machine_count, users)?)
    }
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance, InputError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.to_instance()
}

/// Canonical form: users in ascending id, optional fields omitted when unset,
/// two-space indentation, trailing newline.
pub fn serialize_instance(instance: &ProblemInstance) -> String {
    to_json_line(&InstanceFile::from_instance(instance))
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("plain data serializes");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptEntry {
    pub user: u32,
    pub index: u32,
    pub machine: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Time>,
}

pub fn parse_script(text: &str, name: impl Into<String>) -> Result<ScriptedAlgorithm, InputError> {
    let entries: Vec<ScriptEntry> = serde_json::from_str(text)?;
    Ok(ScriptedAlgorithm::new(
        name,
        entries
            .into_iter()
            .map(|e| (JobId::new(e.user, e.index), MachineId(e.machine), e.start)),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentEntry {
    pub user: u32,
    pub index: u32,
    pub machine: u32,
    pub start: Time,
    pub completion: Time,
    pub round: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MakespanEntry {
    pub user: u32,
    pub makespan: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub version: u32,
    pub algorithm: String,
    pub instance: InstanceFile,
    pub assignments: Vec<AssignmentEntry>,
    pub per_user_makespan: Vec<MakespanEntry>,
    pub overall_makespan: Time,
}

pub fn serialize_schedule(schedule: &Schedule, algorithm: &str) -> String {
    let file = ScheduleFile {
        version: FORMAT_VERSION,
        algorithm: algorithm.to_string(),
        instance: InstanceFile::from_instance(schedule.instance()),
        assignments: schedule
            .assignments()
            .iter()
            .map(|a| AssignmentEntry {
                user: a.job.user.0,
                index: a.job.index,
                machine: a.machine.0,
                start: a.start,
                completion: a.completion,
                round: a.decided_in_round,
            })
            .collect(),
        per_user_makespan: schedule
            .per_user_makespan()
            .iter()
            .map(|(u, c)| MakespanEntry {
                user: u.0,
                makespan: *c,
            })
            .collect(),
        overall_makespan: schedule.overall_makespan(),
    };
    to_json_line(&file)
}

/// Parses and validates a schedule file; returns the schedule and the name of
/// the algorithm that produced it.
pub fn parse_schedule(text: &str) -> Result<(Schedule, String), InputError> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    if file.version != FORMAT_VERSION {
        return Err(InputError::Version(file.version));
    }
    let instance = Arc::new(file.instance.to_instance()?);
    let assignments = file
        .assignments
        .iter()
        .map(|a| Assignment {
            job: JobId::new(a.user, a.index),
            machine: MachineId(a.machine),
            start: a.start,
            completion: a.completion,
            decided_in_round: a.round,
        })
        .collect();
    let schedule = Schedule::new(instance, assignments);
    let violations = validate_schedule(&schedule);
    if !violations.is_empty() {
        let text = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        return Err(InputError::InvalidSchedule(text));
    }
    let stored: BTreeMap<UserId, Time> = file
        .per_user_makespan
        .iter()
        .map(|e| (UserId(e.user), e.makespan))
        .collect();
    if &stored != schedule.per_user_makespan() || file.overall_makespan != schedule.overall_makespan()
    {
        return Err(InputError::InvalidSchedule(
            "stored makespans disagree with the assignments".into(),
        ));
    }
    Ok((schedule, file.algorithm))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub machine_count: u32,
    pub users: usize,
    pub jobs: usize,
    pub batches: usize,
}

/// One user's row; every metric comes as a 4-digit decimal and an exact form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRow {
    pub user: u32,
    pub achieved: String,
    pub achieved_exact: String,
    pub optimum: String,
    pub optimum_exact: String,
    pub optimum_source: String,
    pub rf: String,
    pub rf_exact: String,
    pub rfp: String,
    pub rfp_exact: String,
    pub udi: String,
    pub udi_exact: String,
    pub rdi: String,
    pub rdi_exact: String,
    pub stretch: String,
    pub stretch_exact: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalRow {
    pub gf: String,
    pub gf_exact: String,
    pub gfp: String,
    pub gfp_exact: String,
    pub gdi: String,
    pub gdi_exact: String,
    pub fairness_level: String,
    pub fairness_level_exact: String,
    pub absolute_fair: bool,
    pub jain_index: String,
    pub jain_index_exact: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub instance: InstanceSummary,
    pub algorithm: String,
    pub objective: Objective,
    pub optimum_mode: String,
    pub users: Vec<UserRow>,
    pub global: GlobalRow,
}

fn pair<T: Scalar>(v: &T) -> (String, String) {
    (v.to_decimal(DECIMAL_PLACES), v.to_exact_string())
}

impl ReportFile {
    pub fn new<T: Scalar>(
        report: &FairnessReport<T>,
        instance: &ProblemInstance,
        algorithm: &str,
        config: &MetricsConfig,
    ) -> Self {
        let fi = &report.fairness_index;
        let di = &report.discrimination_index;
        let users = report
            .outcomes
            .iter()
            .map(|(u, outcome)| {
                let (achieved, achieved_exact) = pair(&outcome.achieved);
                let (optimum, optimum_exact) = pair(&outcome.optimum);
                let (rf, rf_exact) = pair(&fi.relative_fairness[u]);
                let (rfp, rfp_exact) = pair(&report.rf_percent[u]);
                let (udi, udi_exact) = pair(&di.udi[u]);
                let (rdi, rdi_exact) = pair(&di.rdi[u]);
                let (stretch, stretch_exact) = pair(&report.stretch[u]);
                UserRow {
                    user: u.0,
                    achieved,
                    achieved_exact,
                    optimum,
                    optimum_exact,
                    optimum_source: outcome.optimum_source.as_str().to_string(),
                    rf,
                    rf_exact,
                    rfp,
                    rfp_exact,
                    udi,
                    udi_exact,
                    rdi,
                    rdi_exact,
                    stretch,
                    stretch_exact,
                }
            })
            .collect();
        let (gf, gf_exact) = pair(&fi.global_fairness);
        let (gfp, gfp_exact) = pair(&report.gf_percent);
        let (gdi, gdi_exact) = pair(&di.gdi);
        let (fairness_level, fairness_level_exact) = pair(&report.fairness_level);
        let (jain_index, jain_index_exact) = pair(&report.jain_index);
        ReportFile {
            version: FORMAT_VERSION,
            instance: InstanceSummary {
                machine_count: instance.machine_count(),
                users: instance.user_count(),
                jobs: instance.total_jobs(),
                batches: instance.batch_count(),
            },
            algorithm: algorithm.to_string(),
            objective: report.objective,
            optimum_mode: match config.optimum {
                OptimumMode::FairBound => "fair_bound",
                OptimumMode::ExactOracle => "exact_oracle",
            }
            .to_string(),
            users,
            global: GlobalRow {
                gf,
                gf_exact,
                gfp,
                gfp_exact,
                gdi,
                gdi_exact,
                fairness_level,
                fairness_level_exact,
                absolute_fair: report.absolute_fair,
                jain_index,
                jain_index_exact,
            },
        }
    }

    pub fn to_json(&self) -> String {
        to_json_line(self)
    }

    /// Per-user table with the global columns repeated on every row.
    pub fn to_csv(&self) -> Result<String, InputError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.users {
            writer.serialize(CsvRow::new(row, &self.global))?;
        }
        let bytes = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 strings"))
    }
}

/// Flat CSV record: one user's columns followed by the global ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub user: u32,
    pub achieved: String,
    pub achieved_exact: String,
    pub optimum: String,
    pub optimum_exact: String,
    pub optimum_source: String,
    pub rf: String,
    pub rf_exact: String,
    pub rfp: String,
    pub rfp_exact: String,
    pub udi: String,
    pub udi_exact: String,
    pub rdi: String,
    pub rdi_exact: String,
    pub stretch: String,
    pub stretch_exact: String,
    pub gf: String,
    pub gf_exact: String,
    pub gfp: String,
    pub gfp_exact: String,
    pub gdi: String,
    pub gdi_exact: String,
    pub fairness_level: String,
    pub fairness_level_exact: String,
    pub absolute_fair: bool,
    pub jain_index: String,
    pub jain_index_exact: String,
}

impl CsvRow {
    fn new(u: &UserRow, g: &GlobalRow) -> Self {
        let u = u.clone();
        let g = g.clone();
        CsvRow {
            user: u.user,
            achieved: u.achieved,
            achieved_exact: u.achieved_exact,
            optimum: u.optimum,
            optimum_exact: u.optimum_exact,
            optimum_source: u.optimum_source,
            rf: u.rf,
            rf_exact: u.rf_exact,
            rfp: u.rfp,
            rfp_exact: u.rfp_exact,
            udi: u.udi,
            udi_exact: u.udi_exact,
            rdi: u.rdi,
            rdi_exact: u.rdi_exact,
            stretch: u.stretch,
            stretch_exact: u.stretch_exact,
            gf: g.gf,
            gf_exact: g.gf_exact,
            gfp: g.gfp,
            gfp_exact: g.gfp_exact,
            gdi: g.gdi,
            gdi_exact: g.gdi_exact,
            fairness_level: g.fairness_level,
            fairness_level_exact: g.fairness_level_exact,
            absolute_fair: g.absolute_fair,
            jain_index: g.jain_index,
            jain_index_exact: g.jain_index_exact,
        }
    }

    pub fn user_row(&self) -> UserRow {
        let r = self.clone();
        UserRow {
            user: r.user,
            achieved: r.achieved,
            achieved_exact: r.achieved_exact,
            optimum: r.optimum,
            optimum_exact: r.optimum_exact,
            optimum_source: r.optimum_source,
            rf: r.rf,
            rf_exact: r.rf_exact,
            rfp: r.rfp,
            rfp_exact: r.rfp_exact,
            udi: r.udi,
            udi_exact: r.udi_exact,
            rdi: r.rdi,
            rdi_exact: r.rdi_exact,
            stretch: r.stretch,
            stretch_exact: r.stretch_exact,
        }
    }

    pub fn global_row(&self) -> GlobalRow {
        let r = self.clone();
        GlobalRow {
            gf: r.gf,
            gf_exact: r.gf_exact,
            gfp: r.gfp,
            gfp_exact: r.gfp_exact,
            gdi: r.gdi,
            gdi_exact: r.gdi_exact,
            fairness_level: r.fairness_level,
            fairness_level_exact: r.fairness_level_exact,
            absolute_fair: r.absolute_fair,
            jain_index: r.jain_index,
            jain_index_exact: r.jain_index_exact,
        }
    }
}

/// Reads rows written by [`ReportFile::to_csv`].
pub fn parse_report_csv(text: &str) -> Result<Vec<CsvRow>, InputError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    Ok(reader.deserialize().collect::<Result<Vec<CsvRow>, _>>()?)
}
