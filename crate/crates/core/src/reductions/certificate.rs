use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Bin packing to balanced bin packing.
    Bp2Bbp,
    /// Balanced bin packing to uniform machines, makespan.
    Bbp2QCmax,
    /// Balanced bin packing to unrelated machines, makespan.
    Bbp2RCmax,
    /// Unrelated machines, makespan, four job types (two bins only).
    Bbp2RCmax4,
    /// Uniform makespan to cutting stock.
    Q2Cs,
    Bbp2QL2,
    Bbp2RL2,
    Bbp2RSumWc,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Bp2Bbp,
        Family::Bbp2QCmax,
        Family::Bbp2RCmax,
        Family::Bbp2RCmax4,
        Family::Q2Cs,
        Family::Bbp2QL2,
        Family::Bbp2RL2,
        Family::Bbp2RSumWc,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Bp2Bbp => "bp2bbp",
            Family::Bbp2QCmax => "bbp2qcmax",
            Family::Bbp2RCmax => "bbp2rcmax",
            Family::Bbp2RCmax4 => "bbp2rcmax4",
            Family::Q2Cs => "q2cs",
            Family::Bbp2QL2 => "bbp2ql2",
            Family::Bbp2RL2 => "bbp2rl2",
            Family::Bbp2RSumWc => "bbp2rswc",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Family::ALL.into_iter().find(|f| f.tag() == s)
    }

    /// Families whose output is a scheduling instance built from a BBP.
    pub fn is_schedule_family(self) -> bool {
        !matches!(self, Family::Bp2Bbp | Family::Q2Cs)
    }

    /// Families with a γ blocker job on every machine.
    pub fn has_gamma(self) -> bool {
        matches!(self, Family::Bbp2RCmax | Family::Bbp2RL2 | Family::Bbp2RSumWc)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Role of a job type (or cutting stock item type) in a reduced instance.
/// Bin indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JobRole {
    AlphaOne(usize),
    AlphaZero(usize),
    Beta(usize),
    Gamma,
    Eta,
    Nu,
    Original(usize),
}

impl JobRole {
    pub fn label(&self) -> String {
        match self {
            JobRole::AlphaOne(j) => format!("alpha1_{}", j + 1),
            JobRole::AlphaZero(j) => format!("alpha0_{}", j + 1),
            JobRole::Beta(j) => format!("beta_{}", j + 1),
            JobRole::Gamma => "gamma".into(),
            JobRole::Eta => "eta".into(),
            JobRole::Nu => "nu".into(),
            JobRole::Original(t) => format!("job_{}", t + 1),
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        let indexed = |prefix: &str| -> Option<usize> {
            let n: usize = s.strip_prefix(prefix)?.parse().ok()?;
            n.checked_sub(1)
        };
        match s {
            "gamma" => Some(JobRole::Gamma),
            "eta" => Some(JobRole::Eta),
            "nu" => Some(JobRole::Nu),
            _ => indexed("alpha1_")
                .map(JobRole::AlphaOne)
                .or_else(|| indexed("alpha0_").map(JobRole::AlphaZero))
                .or_else(|| indexed("beta_").map(JobRole::Beta))
                .or_else(|| indexed("job_").map(JobRole::Original)),
        }
    }
}

/// Size matrix factorization `p = C·D` with `C` of shape k×2 and `D` of shape 2×m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTwo {
    pub c: Vec<[BigInt; 2]>,
    pub d: Vec<[BigInt; 2]>,
}

impl RankTwo {
    pub fn entry(&self, t: usize, i: usize) -> BigInt {
        &self.c[t][0] * &self.d[i][0] + &self.c[t][1] * &self.d[i][1]
    }
}

/// Closed-form pieces of the weighted completion time target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumWcTerms {
    /// `½·m·T_R²`.
    pub load_term: BigRational,
    /// `½ Σ_t n_t p_t w_t` over the α and β types.
    pub gamma: BigRational,
    /// `½ Σ_i p^i_γ w_γ`.
    pub delta_linear: BigRational,
    /// `½ Σ_i p^i_γ a_i`.
    pub delta_quadr: BigRational,
}

impl SumWcTerms {
    pub fn total(&self) -> BigRational {
        &self.load_term + &self.gamma + &self.delta_linear + &self.delta_quadr
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub family: Family,
    /// One role per job type (item type for cutting stock), in instance order.
    pub roles: Vec<JobRole>,
    /// Item sizes of the source packing instance; machine `i` corresponds to item `i`.
    pub items: Vec<u64>,
    pub bins: usize,
    pub capacity: u64,
    /// `A = k·B`.
    pub total: BigInt,
    /// The makespan bound the construction is built around (`T`, `T_R` or `A⁴`).
    pub horizon: BigInt,
    pub a_max: u64,
    pub rank2: Option<RankTwo>,
    /// Objective target: makespan, ℓ₂² value, weighted completion time or budget.
    pub target: BigRational,
    /// Radix constants `(K₁, K₂)` of the cutting stock encoding.
    pub radix: Option<(BigInt, BigInt)>,
    pub sumwc: Option<SumWcTerms>,
    /// Constants that are derived from the intended solution rather than given.
    pub derived: Vec<String>,
}

impl ReductionCertificate {
    pub fn role_index(&self, role: JobRole) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    pub fn machines(&self) -> usize {
        self.items.len()
    }
}
