//! Instances, assignments and validation.
//!
//! Sizes, multiplicities and weights are arbitrary-precision integers; speeds
//! and targets are normalized rationals. A machine index `i` is always
//! zero-based in code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineModel {
    Identical,
    Uniform,
    Unrelated,
}

impl MachineModel {
    pub fn tag(self) -> &'static str {
        match self {
            MachineModel::Identical => "identical",
            MachineModel::Uniform => "uniform",
            MachineModel::Unrelated => "unrelated",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "identical" => Some(MachineModel::Identical),
            "uniform" => Some(MachineModel::Uniform),
            "unrelated" => Some(MachineModel::Unrelated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Cmax,
    L2Sq,
    SumWc,
}

impl Objective {
    pub fn tag(self) -> &'static str {
        match self {
            Objective::Cmax => "cmax",
            Objective::L2Sq => "l2sq",
            Objective::SumWc => "sumwc",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "cmax" => Some(Objective::Cmax),
            "l2sq" => Some(Objective::L2Sq),
            "sumwc" => Some(Objective::SumWc),
            _ => None,
        }
    }

    pub const ALL: [Objective; 3] = [Objective::Cmax, Objective::L2Sq, Objective::SumWc];
}

/// Processing time of a job type on one machine. `Infinite` means the job
/// cannot run there at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Size {
    Finite(BigInt),
    Infinite,
}

impl Size {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            Size::Finite(p) => Some(p),
            Size::Infinite => None,
        }
    }
}

impl From<i64> for Size {
    fn from(v: i64) -> Self {
        Size::Finite(BigInt::from(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JobSizes {
    /// One unscaled size shared by every machine (identical / uniform).
    Common(BigInt),
    /// One entry per machine (unrelated).
    PerMachine(Vec<Size>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JobType {
    pub sizes: JobSizes,
    pub multiplicity: BigInt,
    pub weight: Option<BigInt>,
}

impl JobType {
    pub fn new(size: impl Into<BigInt>, multiplicity: impl Into<BigInt>) -> Self {
        JobType {
            sizes: JobSizes::Common(size.into()),
            multiplicity: multiplicity.into(),
            weight: None,
        }
    }

    pub fn per_machine(sizes: Vec<Size>, multiplicity: impl Into<BigInt>) -> Self {
        JobType {
            sizes: JobSizes::PerMachine(sizes),
            multiplicity: multiplicity.into(),
            weight: None,
        }
    }

    pub fn with_weight(mut self, w: impl Into<BigInt>) -> Self {
        self.weight = Some(w.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScheduleInstance {
    pub model: MachineModel,
    pub machines: usize,
    /// Only populated for the uniform model, one entry per machine.
    pub speeds: Vec<BigRational>,
    pub jobs: Vec<JobType>,
    pub objective: Objective,
    pub target: Option<BigRational>,
}

impl ScheduleInstance {
    pub fn identical(machines: usize, jobs: Vec<JobType>) -> Self {
        ScheduleInstance {
            model: MachineModel::Identical,
            machines,
            speeds: Vec::new(),
            jobs,
            objective: Objective::Cmax,
            target: None,
        }
    }

    pub fn uniform(speeds: Vec<BigRational>, jobs: Vec<JobType>) -> Self {
        ScheduleInstance {
            model: MachineModel::Uniform,
            machines: speeds.len(),
            speeds,
            jobs,
            objective: Objective::Cmax,
            target: None,
        }
    }

    pub fn unrelated(machines: usize, jobs: Vec<JobType>) -> Self {
        ScheduleInstance {
            model: MachineModel::Unrelated,
            machines,
            speeds: Vec::new(),
            jobs,
            objective: Objective::Cmax,
            target: None,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_target(mut self, target: BigRational) -> Self {
        self.target = Some(target);
        self
    }

    pub fn job_types(&self) -> usize {
        self.jobs.len()
    }

    /// Unscaled size of job type `j` on machine `i`; `None` when infinite.
    pub fn size(&self, i: usize, j: usize) -> Option<&BigInt> {
        match &self.jobs[j].sizes {
            JobSizes::Common(p) => Some(p),
            JobSizes::PerMachine(v) => v.get(i).and_then(Size::finite),
        }
    }

    pub fn speed(&self, i: usize) -> BigRational {
        match self.model {
            MachineModel::Uniform => self.speeds[i].clone(),
            _ => BigRational::one(),
        }
    }

    /// Processing time after speed scaling; `None` when infinite.
    pub fn scaled_size(&self, i: usize, j: usize) -> Option<BigRational> {
        let p = BigRational::from_integer(self.size(i, j)?.clone());
        Some(match self.model {
            MachineModel::Uniform => p / &self.speeds[i],
            _ => p,
        })
    }

    /// Multiplicities as machine-sized counts. Fails on negative or huge values.
    pub fn multiplicities(&self) -> Result<Vec<u64>, ModelError> {
        self.jobs
            .iter()
            .enumerate()
            .map(|(j, t)| t.multiplicity.to_u64().ok_or(ModelError::BadMultiplicity { job: j }))
            .collect()
    }

    pub fn weight(&self, j: usize) -> Result<&BigInt, ModelError> {
        self.jobs[j].weight.as_ref().ok_or(ModelError::MissingWeight { job: j })
    }

    /// True when every machine sees the same scaled size for job type `j`.
    pub fn machine_independent(&self, j: usize) -> bool {
        let first = self.scaled_size(0, j);
        (1..self.machines).all(|i| self.scaled_size(i, j) == first)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_instance(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("multiplicity of job type {job} is negative or too large to enumerate")]
    BadMultiplicity { job: usize },
    #[error("job type {job} has no weight")]
    MissingWeight { job: usize },
}

/// Per-machine job-count matrix `counts[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub counts: Vec<Vec<u64>>,
}

impl Assignment {
    pub fn new(counts: Vec<Vec<u64>>) -> Self {
        Assignment { counts }
    }

    pub fn zeros(machines: usize, job_types: usize) -> Self {
        Assignment {
            counts: vec![vec![0; job_types]; machines],
        }
    }

    pub fn machines(&self) -> usize {
        self.counts.len()
    }

    pub fn column_sums(&self, job_types: usize) -> Vec<u64> {
        let mut sums = vec![0u64; job_types];
        for row in &self.counts {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    /// Machine-major flattening `(x^1, ..., x^m)`.
    pub fn flatten(&self) -> Vec<u64> {
        self.counts.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadVector {
    pub unscaled: Vec<BigInt>,
    pub scaled: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoMachines,
    NoJobTypes,
    NegativeMultiplicity { job: usize },
    NonPositiveSize { job: usize, machine: Option<usize> },
    NegativeWeight { job: usize },
    MissingWeight { job: usize },
    SizeListLength { job: usize, expected: usize, found: usize },
    SizeShape { job: usize },
    SpeedCount { expected: usize, found: usize },
    NonPositiveSpeed { machine: usize },
    UnexpectedSpeeds,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoMachines => write!(f, "m ≥ 1"),
            Violation::NoJobTypes => write!(f, "k ≥ 1"),
            Violation::NegativeMultiplicity { job } => write!(f, "multiplicity ≥ 0 (job type {job})"),
            Violation::NonPositiveSize { job, machine: None } => write!(f, "size ≥ 1 (job type {job})"),
            Violation::NonPositiveSize { job, machine: Some(i) } => {
                write!(f, "size ≥ 1 (job type {job}, machine {i})")
            }
            Violation::NegativeWeight { job } => write!(f, "weight ≥ 0 (job type {job})"),
            Violation::MissingWeight { job } => write!(f, "weight required for sumwc (job type {job})"),
            Violation::SizeListLength { job, expected, found } => write!(
                f,
                "size list length = machine count (job type {job}: expected {expected}, found {found})"
            ),
            Violation::SizeShape { job } => write!(f, "size shape matches machine model (job type {job})"),
            Violation::SpeedCount { expected, found } => {
                write!(f, "one speed per machine (expected {expected}, found {found})")
            }
            Violation::NonPositiveSpeed { machine } => write!(f, "speed > 0 (machine {machine})"),
            Violation::UnexpectedSpeeds => write!(f, "speeds only allowed in the uniform model"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

pub fn validate_instance(inst: &ScheduleInstance) -> ValidationReport {
    let mut v = Vec::new();
    if inst.machines == 0 {
        v.push(Violation::NoMachines);
    }
    if inst.jobs.is_empty() {
        v.push(Violation::NoJobTypes);
    }
    match inst.model {
        MachineModel::Uniform => {
            if inst.speeds.len() != inst.machines {
                v.push(Violation::SpeedCount {
                    expected: inst.machines,
                    found: inst.speeds.len(),
                });
            }
            for (i, s) in inst.speeds.iter().enumerate() {
                if !s.is_positive() {
                    v.push(Violation::NonPositiveSpeed { machine: i });
                }
            }
        }
        _ => {
            if !inst.speeds.is_empty() {
                v.push(Violation::UnexpectedSpeeds);
            }
        }
    }
    for (j, job) in inst.jobs.iter().enumerate() {
        if job.multiplicity.is_negative() {
            v.push(Violation::NegativeMultiplicity { job: j });
        }
        match &job.weight {
            Some(w) if w.is_negative() => v.push(Violation::NegativeWeight { job: j }),
            None if inst.objective == Objective::SumWc => v.push(Violation::MissingWeight { job: j }),
            _ => {}
        }
        match (&job.sizes, inst.model) {
            (JobSizes::Common(p), MachineModel::Identical | MachineModel::Uniform) => {
                if !p.is_positive() {
                    v.push(Violation::NonPositiveSize { job: j, machine: None });
                }
            }
            (JobSizes::PerMachine(list), MachineModel::Unrelated) => {
                if list.len() != inst.machines {
                    v.push(Violation::SizeListLength {
                        job: j,
                        expected: inst.machines,
                        found: list.len(),
                    });
                }
                for (i, s) in list.iter().enumerate() {
                    if let Size::Finite(p) = s {
                        if !p.is_positive() {
                            v.push(Violation::NonPositiveSize {
                                job: j,
                                machine: Some(i),
                            });
                        }
                    }
                }
            }
            _ => v.push(Violation::SizeShape { job: j }),
        }
    }
    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    pub(crate) fn tiny() -> ScheduleInstance {
        ScheduleInstance::identical(2, vec![JobType::new(3, 2), JobType::new(5, 1)])
    }

    #[test]
    fn tiny_is_valid() {
        assert!(tiny().validate().is_ok());
    }

    #[test]
    fn negative_multiplicity_reported() {
        let mut inst = tiny();
        inst.jobs[0].multiplicity = BigInt::from(-1);
        let report = inst.validate();
        assert_eq!(report.violations, vec![Violation::NegativeMultiplicity { job: 0 }]);
        assert!(report.to_string().contains("multiplicity ≥ 0"));
    }

    #[test]
    fn zero_speed_reported() {
        let inst = ScheduleInstance::uniform(vec![ratio(0, 1), ratio(1, 1)], vec![JobType::new(2, 1)]);
        let report = inst.validate();
        assert_eq!(report.violations, vec![Violation::NonPositiveSpeed { machine: 0 }]);
        assert!(report.to_string().contains("speed > 0"));
    }

    #[test]
    fn sumwc_requires_weights() {
        let inst = tiny().with_objective(Objective::SumWc);
        assert_eq!(
            inst.validate().violations,
            vec![Violation::MissingWeight { job: 0 }, Violation::MissingWeight { job: 1 }]
        );
    }

    #[test]
    fn unrelated_size_list_length() {
        let inst = ScheduleInstance::unrelated(3, vec![JobType::per_machine(vec![1.into(), Size::Infinite], 1)]);
        assert_eq!(
            inst.validate().violations,
            vec![Violation::SizeListLength {
                job: 0,
                expected: 3,
                found: 2
            }]
        );
    }

    #[test]
    fn shape_mismatch_and_stray_speeds() {
        let mut inst = ScheduleInstance::identical(1, vec![JobType::per_machine(vec![1.into()], 1)]);
        inst.speeds = vec![ratio(1, 1)];
        let v = inst.validate().violations;
        assert!(v.contains(&Violation::SizeShape { job: 0 }));
        assert!(v.contains(&Violation::UnexpectedSpeeds));
    }

    #[test]
    fn empty_instance_flags_counts() {
        let inst = ScheduleInstance::identical(0, vec![]);
        assert_eq!(
            inst.validate().violations,
            vec![Violation::NoMachines, Violation::NoJobTypes]
        );
    }
}
