//! Translating between balanced packings and perfect schedules.

use super::certificate::{Family, JobRole, ReductionCertificate};
use super::instances::BalancedBinPackingInstance;
use super::ReductionError;
use crate::model::Assignment;
use num_traits::ToPrimitive;
use std::fmt;

fn source(cert: &ReductionCertificate) -> Result<BalancedBinPackingInstance, ReductionError> {
    BalancedBinPackingInstance::new(cert.items.clone(), cert.bins, cert.capacity)
        .map_err(|_| ReductionError::BadPacking)
}

fn index(cert: &ReductionCertificate, role: JobRole) -> usize {
    cert.role_index(role)
        .expect("certificate lists every role of its family")
}

fn total_a(cert: &ReductionCertificate) -> u64 {
    cert.total.to_u64().expect("A fits in u64 for u64 item sizes")
}

/// The schedule in which machine `i` runs the jobs of bin `packing[i]`.
pub fn perfect_schedule(cert: &ReductionCertificate, packing: &[usize]) -> Result<Assignment, ReductionError> {
    if !cert.family.is_schedule_family() {
        return Err(ReductionError::Unsupported(cert.family));
    }
    let bbp = source(cert)?;
    if !bbp.is_valid_packing(packing) {
        return Err(ReductionError::BadPacking);
    }
    let a = total_a(cert);
    let mut counts = vec![vec![0u64; cert.roles.len()]; cert.machines()];
    for (i, row) in counts.iter_mut().enumerate() {
        let (ai, j) = (cert.items[i], packing[i]);
        if cert.family == Family::Bbp2RCmax4 {
            if j == 0 {
                row[index(cert, JobRole::AlphaOne(0))] = ai;
                row[index(cert, JobRole::AlphaZero(0))] = a - ai;
            } else {
                row[index(cert, JobRole::Beta(1))] = 1;
                row[index(cert, JobRole::AlphaOne(1))] = ai;
            }
            continue;
        }
        row[index(cert, JobRole::AlphaOne(j))] = ai;
        row[index(cert, JobRole::AlphaZero(j))] = a - ai;
        row[index(cert, JobRole::Beta(j))] = 1;
        if cert.family.has_gamma() {
            row[index(cert, JobRole::Gamma)] = 1;
        }
    }
    Ok(Assignment::new(counts))
}

/// Why an assignment is not a perfect schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotPerfect {
    pub machine: Option<usize>,
    pub reason: &'static str,
}

impl fmt::Display for NotPerfect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.machine {
            Some(i) => write!(f, "not perfect: {} (machine {})", self.reason, i + 1),
            None => write!(f, "not perfect: {}", self.reason),
        }
    }
}

impl std::error::Error for NotPerfect {}

fn fail(machine: Option<usize>, reason: &'static str) -> NotPerfect {
    NotPerfect { machine, reason }
}

/// Recovers the packing `i ↦ j(i)` from a perfect schedule, or reports the
/// first structural violation.
pub fn packing_from_perfect_schedule(cert: &ReductionCertificate, x: &Assignment) -> Result<Vec<usize>, NotPerfect> {
    if !cert.family.is_schedule_family() {
        return Err(fail(None, "family has no schedule"));
    }
    let k = cert.roles.len();
    if x.machines() != cert.machines() || x.counts.iter().any(|r| r.len() != k) {
        return Err(fail(None, "dimension"));
    }
    let a = total_a(cert);
    let mut map = Vec::with_capacity(cert.machines());
    for (i, row) in x.counts.iter().enumerate() {
        let ai = cert.items[i];
        let betas: Vec<(usize, u64)> = cert
            .roles
            .iter()
            .zip(row)
            .filter_map(|(r, &c)| match r {
                JobRole::Beta(j) if c > 0 => Some((*j, c)),
                _ => None,
            })
            .collect();
        let mut expected = vec![0u64; k];
        let j = if cert.family == Family::Bbp2RCmax4 {
            match betas.as_slice() {
                [] => {
                    expected[index(cert, JobRole::AlphaOne(0))] = ai;
                    expected[index(cert, JobRole::AlphaZero(0))] = a - ai;
                    0
                }
                [(1, 1)] => {
                    expected[index(cert, JobRole::Beta(1))] = 1;
                    expected[index(cert, JobRole::AlphaOne(1))] = ai;
                    1
                }
                _ => return Err(fail(Some(i), "β multiplicity")),
            }
        } else {
            let j = match betas.as_slice() {
                [(j, 1)] => *j,
                _ => return Err(fail(Some(i), "β multiplicity")),
            };
            expected[index(cert, JobRole::AlphaOne(j))] = ai;
            expected[index(cert, JobRole::AlphaZero(j))] = a - ai;
            expected[index(cert, JobRole::Beta(j))] = 1;
            if cert.family.has_gamma() {
                expected[index(cert, JobRole::Gamma)] = 1;
            }
            j
        };
        for (t, (&got, &want)) in row.iter().zip(&expected).enumerate() {
            if got != want {
                let reason = match cert.roles[t] {
                    JobRole::AlphaOne(_) => "α¹ count",
                    JobRole::AlphaZero(_) => "α⁰ count",
                    JobRole::Gamma => "γ multiplicity",
                    _ => "β multiplicity",
                };
                return Err(fail(Some(i), reason));
            }
        }
        map.push(j);
    }
    let bbp = source(cert).map_err(|_| fail(None, "source instance"))?;
    if !bbp.is_valid_packing(&map) {
        return Err(fail(None, "bin sums"));
    }
    Ok(map)
}
