//! JSON documents for instances, assignments and certificates.
//!
//! Every document carries a `"kind"` tag. Integers are written as decimal
//! strings and rationals as `"p/q"` in lowest terms; on input, plain JSON
//! integers are accepted as well. Object keys are emitted in sorted order, so
//! [`to_canonical_string`] is stable and [`digest`] can be used for diffing.

use crate::arith::{format_rational, parse_int, parse_rational};
use crate::model::{Assignment, JobSizes, JobType, MachineModel, Objective, ScheduleInstance, Size};
use crate::reductions::{
    BalancedBinPackingInstance, BinPackingInstance, CuttingStockInstance, Family, JobRole, RankTwo,
    ReductionCertificate, SumWcTerms,
};
use crate::solvers::{CuttingStockSolution, PackedBin};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Schedule(ScheduleInstance),
    BinPacking(BinPackingInstance),
    BalancedBinPacking(BalancedBinPackingInstance),
    CuttingStock(CuttingStockInstance),
    Assignment(Assignment),
    CuttingStockSolution(CuttingStockSolution),
    Certificate(ReductionCertificate),
    Reduction {
        instance: Box<Document>,
        certificate: ReductionCertificate,
    },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Schedule(_) => "schedule",
            Document::BinPacking(_) => "bin_packing",
            Document::BalancedBinPacking(_) => "balanced_bin_packing",
            Document::CuttingStock(_) => "cutting_stock",
            Document::Assignment(_) => "assignment",
            Document::CuttingStockSolution(_) => "cutting_stock_solution",
            Document::Certificate(_) => "certificate",
            Document::Reduction { .. } => "reduction",
        }
    }
}

fn s<T: ToString>(v: T) -> Value {
    Value::String(v.to_string())
}

fn ints<T: std::fmt::Display>(v: &[T]) -> Value {
    Value::Array(v.iter().map(s).collect())
}

fn rat(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

fn schedule_to_json(inst: &ScheduleInstance) -> Value {
    let machines = match inst.model {
        MachineModel::Uniform => Value::Array(inst.speeds.iter().map(|sp| json!({ "speed": rat(sp) })).collect()),
        _ => s(inst.machines),
    };
    let jobs: Vec<Value> = inst
        .jobs
        .iter()
        .map(|job| {
            let mut o = Map::new();
            match &job.sizes {
                JobSizes::Common(p) => {
                    o.insert("size".into(), s(p));
                }
                JobSizes::PerMachine(list) => {
                    let sizes = list
                        .iter()
                        .map(|sz| match sz {
                            Size::Finite(p) => s(p),
                            Size::Infinite => s("inf"),
                        })
                        .collect();
                    o.insert("sizes".into(), Value::Array(sizes));
                }
            }
            o.insert("multiplicity".into(), s(&job.multiplicity));
            if let Some(w) = &job.weight {
                o.insert("weight".into(), s(w));
            }
            Value::Object(o)
        })
        .collect();
    let mut o = Map::new();
    o.insert("kind".into(), s("schedule"));
    o.insert("model".into(), s(inst.model.tag()));
    o.insert("objective".into(), s(inst.objective.tag()));
    o.insert("machines".into(), machines);
    o.insert("jobs".into(), Value::Array(jobs));
    if let Some(t) = &inst.target {
        o.insert("target".into(), rat(t));
    }
    Value::Object(o)
}

fn certificate_to_json(c: &ReductionCertificate) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), s("certificate"));
    o.insert("family".into(), s(c.family.tag()));
    o.insert(
        "roles".into(),
        Value::Array(c.roles.iter().map(|r| s(r.label())).collect()),
    );
    o.insert("items".into(), ints(&c.items));
    o.insert("bins".into(), s(c.bins));
    o.insert("capacity".into(), s(c.capacity));
    o.insert("A".into(), s(&c.total));
    o.insert("horizon".into(), s(&c.horizon));
    o.insert("a_max".into(), s(c.a_max));
    o.insert("target".into(), rat(&c.target));
    if let Some(r) = &c.rank2 {
        let rows = |m: &[[BigInt; 2]]| Value::Array(m.iter().map(|row| ints(row)).collect());
        o.insert("rank2".into(), json!({ "C": rows(&r.c), "D": rows(&r.d) }));
    }
    if let Some((k1, k2)) = &c.radix {
        o.insert("radix".into(), json!({ "K1": s(k1), "K2": s(k2) }));
    }
    if let Some(t) = &c.sumwc {
        o.insert(
            "sumwc".into(),
            json!({
                "load_term": rat(&t.load_term),
                "gamma": rat(&t.gamma),
                "delta_linear": rat(&t.delta_linear),
                "delta_quadr": rat(&t.delta_quadr),
            }),
        );
    }
    if !c.derived.is_empty() {
        o.insert("derived".into(), Value::Array(c.derived.iter().map(s).collect()));
    }
    Value::Object(o)
}

pub fn to_json(doc: &Document) -> Value {
    match doc {
        Document::Schedule(inst) => schedule_to_json(inst),
        Document::BinPacking(bp) => json!({
            "kind": "bin_packing", "items": ints(&bp.items), "bins": s(bp.bins), "capacity": s(bp.capacity),
        }),
        Document::BalancedBinPacking(bp) => json!({
            "kind": "balanced_bin_packing", "items": ints(&bp.items), "bins": s(bp.bins), "capacity": s(bp.capacity),
        }),
        Document::CuttingStock(cs) => {
            let items: Vec<Value> = cs
                .item_sizes
                .iter()
                .zip(&cs.item_counts)
                .map(|(p, n)| json!({ "size": s(p), "count": s(n) }))
                .collect();
            let bins: Vec<Value> = cs
                .bin_sizes
                .iter()
                .zip(&cs.bin_costs)
                .map(|(sz, c)| json!({ "size": s(sz), "cost": s(c) }))
                .collect();
            let mut o = json!({ "kind": "cutting_stock", "items": items, "bins": bins });
            if let Some(b) = &cs.budget {
                o["budget"] = s(b);
            }
            o
        }
        Document::Assignment(a) => json!({
            "kind": "assignment",
            "counts": Value::Array(a.counts.iter().map(|row| ints(row)).collect()),
        }),
        Document::CuttingStockSolution(sol) => json!({
            "kind": "cutting_stock_solution",
            "purchases": ints(&sol.purchases),
            "bins": Value::Array(sol.bins.iter().map(|b| json!({ "type": s(b.bin_type), "counts": ints(&b.counts) })).collect()),
            "cost": s(&sol.cost),
        }),
        Document::Certificate(c) => certificate_to_json(c),
        Document::Reduction { instance, certificate } => json!({
            "kind": "reduction",
            "instance": to_json(instance),
            "certificate": certificate_to_json(certificate),
        }),
    }
}

/// Compact JSON with sorted keys.
pub fn to_canonical_string(doc: &Document) -> String {
    serde_json::to_string(&to_json(doc)).expect("documents serialize")
}

pub fn to_pretty_string(doc: &Document) -> String {
    let mut out = serde_json::to_string_pretty(&to_json(doc)).expect("documents serialize");
    out.push('\n');
    out
}

/// Hex SHA-256 of the canonical form.
pub fn digest(doc: &Document) -> String {
    hex::encode(Sha256::digest(to_canonical_string(doc).as_bytes()))
}

struct Ctx<'a> {
    path: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, field: &str, msg: impl Into<String>) -> Result<T, DocError> {
        Err(DocError::Schema {
            path: if field.is_empty() {
                self.path.to_string()
            } else {
                format!("{}.{field}", self.path)
            },
            msg: msg.into(),
        })
    }

    fn field<'v>(&self, v: &'v Value, name: &str) -> Result<&'v Value, DocError> {
        match v.get(name) {
            Some(x) => Ok(x),
            None => self.err(name, "missing field"),
        }
    }

    fn int(&self, v: &Value, name: &str) -> Result<BigInt, DocError> {
        match v {
            Value::String(t) => parse_int(t).or_else(|e| self.err(name, e.to_string())),
            Value::Number(n) if n.is_i64() || n.is_u64() => {
                parse_int(&n.to_string()).or_else(|e| self.err(name, e.to_string()))
            }
            _ => self.err(name, "expected an integer"),
        }
    }

    fn u64(&self, v: &Value, name: &str) -> Result<u64, DocError> {
        self.int(v, name)?
            .to_u64()
            .map_or_else(|| self.err(name, "expected a nonnegative 64-bit integer"), Ok)
    }

    fn usize(&self, v: &Value, name: &str) -> Result<usize, DocError> {
        self.int(v, name)?
            .to_usize()
            .map_or_else(|| self.err(name, "expected a nonnegative count"), Ok)
    }

    fn rational(&self, v: &Value, name: &str) -> Result<BigRational, DocError> {
        match v {
            Value::String(t) => parse_rational(t).or_else(|e| self.err(name, e.to_string())),
            Value::Number(_) => Ok(BigRational::from_integer(self.int(v, name)?)),
            _ => self.err(name, "expected a rational \"p/q\""),
        }
    }

    fn array<'v>(&self, v: &'v Value, name: &str) -> Result<&'v Vec<Value>, DocError> {
        v.as_array().map_or_else(|| self.err(name, "expected an array"), Ok)
    }

    fn str<'v>(&self, v: &'v Value, name: &str) -> Result<&'v str, DocError> {
        v.as_str().map_or_else(|| self.err(name, "expected a string"), Ok)
    }
}

fn parse_schedule(v: &Value, cx: &Ctx) -> Result<ScheduleInstance, DocError> {
    let model_tag = cx.str(cx.field(v, "model")?, "model")?;
    let model = MachineModel::from_tag(model_tag)
        .map_or_else(|| cx.err("model", "expected identical, uniform or unrelated"), Ok)?;
    let objective = match v.get("objective") {
        None => Objective::Cmax,
        Some(o) => {
            let tag = cx.str(o, "objective")?;
            Objective::from_tag(tag).map_or_else(|| cx.err("objective", "expected cmax, l2sq or sumwc"), Ok)?
        }
    };
    let machines_v = cx.field(v, "machines")?;
    let (machines, speeds) = match machines_v {
        Value::Array(list) => {
            let speeds = list
                .iter()
                .map(|m| cx.rational(cx.field(m, "speed")?, "machines.speed"))
                .collect::<Result<Vec<_>, _>>()?;
            (speeds.len(), speeds)
        }
        other => (cx.usize(other, "machines")?, Vec::new()),
    };
    if model == MachineModel::Uniform && !matches!(machines_v, Value::Array(_)) {
        return cx.err("machines", "uniform model needs a list of {\"speed\": \"p/q\"}");
    }
    if model != MachineModel::Uniform && matches!(machines_v, Value::Array(_)) {
        return cx.err("machines", "speeds are only allowed for the uniform model");
    }
    let mut jobs = Vec::new();
    for (j, job) in cx.array(cx.field(v, "jobs")?, "jobs")?.iter().enumerate() {
        let name = format!("jobs[{j}]");
        let sizes = match (job.get("size"), job.get("sizes")) {
            (Some(p), None) => JobSizes::Common(cx.int(p, &name)?),
            (None, Some(list)) => JobSizes::PerMachine(
                cx.array(list, &name)?
                    .iter()
                    .map(|e| match e.as_str() {
                        Some("inf") => Ok(Size::Infinite),
                        _ => cx.int(e, &name).map(Size::Finite),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            _ => return cx.err(&name, "expected exactly one of \"size\" or \"sizes\""),
        };
        let multiplicity = cx.int(cx.field(job, "multiplicity")?, &name)?;
        let weight = job.get("weight").map(|w| cx.int(w, &name)).transpose()?;
        jobs.push(JobType {
            sizes,
            multiplicity,
            weight,
        });
    }
    let target = v.get("target").map(|t| cx.rational(t, "target")).transpose()?;
    Ok(ScheduleInstance {
        model,
        machines,
        speeds,
        jobs,
        objective,
        target,
    })
}

fn parse_packing(v: &Value, cx: &Ctx) -> Result<(Vec<u64>, usize, u64), DocError> {
    let items = cx
        .array(cx.field(v, "items")?, "items")?
        .iter()
        .map(|x| cx.u64(x, "items"))
        .collect::<Result<_, _>>()?;
    let bins = cx.usize(cx.field(v, "bins")?, "bins")?;
    let capacity = cx.u64(cx.field(v, "capacity")?, "capacity")?;
    Ok((items, bins, capacity))
}

fn parse_counts(v: &Value, cx: &Ctx, name: &str) -> Result<Vec<u64>, DocError> {
    cx.array(v, name)?.iter().map(|x| cx.u64(x, name)).collect()
}

fn parse_certificate(v: &Value, cx: &Ctx) -> Result<ReductionCertificate, DocError> {
    let tag = cx.str(cx.field(v, "family")?, "family")?;
    let family = Family::from_tag(tag).map_or_else(|| cx.err("family", format!("unknown family `{tag}`")), Ok)?;
    let roles = cx
        .array(cx.field(v, "roles")?, "roles")?
        .iter()
        .map(|r| {
            let label = cx.str(r, "roles")?;
            JobRole::from_label(label).map_or_else(|| cx.err("roles", format!("unknown role `{label}`")), Ok)
        })
        .collect::<Result<_, _>>()?;
    let rank2 = match v.get("rank2") {
        None => None,
        Some(r) => {
            let rows = |name: &str| -> Result<Vec<[BigInt; 2]>, DocError> {
                cx.array(cx.field(r, name)?, name)?
                    .iter()
                    .map(|row| {
                        let row = cx.array(row, name)?;
                        if row.len() != 2 {
                            return cx.err(name, "rows must have two entries");
                        }
                        Ok([cx.int(&row[0], name)?, cx.int(&row[1], name)?])
                    })
                    .collect()
            };
            Some(RankTwo {
                c: rows("C")?,
                d: rows("D")?,
            })
        }
    };
    let radix = match v.get("radix") {
        None => None,
        Some(r) => Some((
            cx.int(cx.field(r, "K1")?, "radix.K1")?,
            cx.int(cx.field(r, "K2")?, "radix.K2")?,
        )),
    };
    let sumwc = match v.get("sumwc") {
        None => None,
        Some(t) => {
            let get = |name: &str| cx.rational(cx.field(t, name)?, name);
            Some(SumWcTerms {
                load_term: get("load_term")?,
                gamma: get("gamma")?,
                delta_linear: get("delta_linear")?,
                delta_quadr: get("delta_quadr")?,
            })
        }
    };
    let derived = match v.get("derived") {
        None => Vec::new(),
        Some(d) => cx
            .array(d, "derived")?
            .iter()
            .map(|x| cx.str(x, "derived").map(String::from))
            .collect::<Result<_, _>>()?,
    };
    Ok(ReductionCertificate {
        family,
        roles,
        items: parse_counts(cx.field(v, "items")?, cx, "items")?,
        bins: cx.usize(cx.field(v, "bins")?, "bins")?,
        capacity: cx.u64(cx.field(v, "capacity")?, "capacity")?,
        total: cx.int(cx.field(v, "A")?, "A")?,
        horizon: cx.int(cx.field(v, "horizon")?, "horizon")?,
        a_max: cx.u64(cx.field(v, "a_max")?, "a_max")?,
        rank2,
        target: cx.rational(cx.field(v, "target")?, "target")?,
        radix,
        sumwc,
        derived,
    })
}

pub fn from_json(v: &Value) -> Result<Document, DocError> {
    from_json_at(v, "$")
}

fn from_json_at(v: &Value, path: &str) -> Result<Document, DocError> {
    let cx = Ctx { path };
    let kind = cx.str(cx.field(v, "kind")?, "kind")?;
    Ok(match kind {
        "schedule" => Document::Schedule(parse_schedule(v, &cx)?),
        "bin_packing" => {
            let (items, bins, cap) = parse_packing(v, &cx)?;
            Document::BinPacking(BinPackingInstance::new(items, bins, cap).or_else(|e| cx.err("", e.to_string()))?)
        }
        "balanced_bin_packing" => {
            let (items, bins, cap) = parse_packing(v, &cx)?;
            Document::BalancedBinPacking(
                BalancedBinPackingInstance::new(items, bins, cap).or_else(|e| cx.err("", e.to_string()))?,
            )
        }
        "cutting_stock" => {
            let mut sizes = Vec::new();
            let mut counts = Vec::new();
            for item in cx.array(cx.field(v, "items")?, "items")? {
                sizes.push(cx.int(cx.field(item, "size")?, "items.size")?);
                counts.push(cx.u64(cx.field(item, "count")?, "items.count")?);
            }
            let mut bin_sizes = Vec::new();
            let mut costs = Vec::new();
            for bin in cx.array(cx.field(v, "bins")?, "bins")? {
                bin_sizes.push(cx.int(cx.field(bin, "size")?, "bins.size")?);
                costs.push(cx.int(cx.field(bin, "cost")?, "bins.cost")?);
            }
            let mut cs =
                CuttingStockInstance::new(sizes, counts, bin_sizes, costs).or_else(|e| cx.err("", e.to_string()))?;
            cs.budget = v.get("budget").map(|b| cx.int(b, "budget")).transpose()?;
            Document::CuttingStock(cs)
        }
        "assignment" => {
            let counts = cx
                .array(cx.field(v, "counts")?, "counts")?
                .iter()
                .map(|row| parse_counts(row, &cx, "counts"))
                .collect::<Result<_, _>>()?;
            Document::Assignment(Assignment::new(counts))
        }
        "cutting_stock_solution" => {
            let bins = cx
                .array(cx.field(v, "bins")?, "bins")?
                .iter()
                .map(|b| {
                    Ok(PackedBin {
                        bin_type: cx.usize(cx.field(b, "type")?, "bins.type")?,
                        counts: parse_counts(cx.field(b, "counts")?, &cx, "bins.counts")?,
                    })
                })
                .collect::<Result<_, DocError>>()?;
            Document::CuttingStockSolution(CuttingStockSolution {
                purchases: parse_counts(cx.field(v, "purchases")?, &cx, "purchases")?,
                bins,
                cost: cx.int(cx.field(v, "cost")?, "cost")?,
            })
        }
        "certificate" => Document::Certificate(parse_certificate(v, &cx)?),
        "reduction" => {
            let instance = from_json_at(cx.field(v, "instance")?, &format!("{path}.instance"))?;
            let cert_path = format!("{path}.certificate");
            let certificate = parse_certificate(cx.field(v, "certificate")?, &Ctx { path: &cert_path })?;
            Document::Reduction {
                instance: Box::new(instance),
                certificate,
            }
        }
        other => return cx.err("kind", format!("unknown kind `{other}`")),
    })
}

pub fn parse_document(text: &str) -> Result<Document, DocError> {
    from_json(&serde_json::from_str(text)?)
}

pub fn read_document(path: &Path) -> Result<Document, DocError> {
    parse_document(&std::fs::read_to_string(path)?)
}

pub fn write_document(doc: &Document, path: &Path) -> Result<(), DocError> {
    std::fs::write(path, to_pretty_string(doc))?;
    Ok(())
}
