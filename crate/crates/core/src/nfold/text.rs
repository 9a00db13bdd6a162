//! Line-oriented `.nfold` text format.
//!
//! ```text
//! NFOLD r s t N
//! VAR <t names>          (N lines, one per block)
//! BLOCK i                (N sections)
//! E1
//! <r rows of t integers>
//! E2
//! <s rows of t integers>
//! RHS <r + N·s integers>
//! SENSE <r + N·s of = or <=>
//! LB <N·t bounds>        (integer, inf or -inf)
//! UB <N·t bounds>
//! OBJ l2sq | OBJ sumwc   (optional)
//! SPEED <num> <den>      (l2sq: N lines)
//! WEIGHTS <r integers>   (sumwc)
//! END
//! ```
//!
//! Matrix rows are read by position, so a zero-width row is an empty line.

use super::model::{Block, Bound, NFoldModel, NFoldObjective, Sense};
use num_bigint::BigInt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn tagged(tag: &str, body: String) -> String {
    if body.is_empty() {
        tag.to_string()
    } else {
        format!("{tag} {body}")
    }
}

pub fn to_text(model: &NFoldModel) -> String {
    let mut out = String::new();
    writeln!(out, "NFOLD {} {} {} {}", model.r, model.s, model.t, model.n).unwrap();
    for i in 0..model.n {
        out.push_str(&tagged(
            "VAR",
            model.var_names[i * model.t..(i + 1) * model.t].join(" "),
        ));
        out.push('\n');
    }
    for (i, block) in model.blocks.iter().enumerate() {
        writeln!(out, "BLOCK {}", i + 1).unwrap();
        out.push_str("E1\n");
        for row in &block.e1 {
            writeln!(out, "{}", join(row)).unwrap();
        }
        out.push_str("E2\n");
        for row in &block.e2 {
            writeln!(out, "{}", join(row)).unwrap();
        }
    }
    let senses: Vec<&str> = model.sense.iter().map(|s| s.symbol()).collect();
    for line in [
        tagged("RHS", join(&model.rhs)),
        tagged("SENSE", senses.join(" ")),
        tagged("LB", join(&model.lb)),
        tagged("UB", join(&model.ub)),
    ] {
        out.push_str(&line);
        out.push('\n');
    }
    match &model.objective {
        None => {}
        Some(NFoldObjective::L2Sq { speeds }) => {
            out.push_str("OBJ l2sq\n");
            for (num, den) in speeds {
                writeln!(out, "SPEED {num} {den}").unwrap();
            }
        }
        Some(NFoldObjective::SumWc { weights }) => {
            out.push_str("OBJ sumwc\n");
            out.push_str(&tagged("WEIGHTS", join(weights)));
            out.push('\n');
        }
    }
    out.push_str("END\n");
    out
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormatError> {
        Err(FormatError::Parse {
            line: self.pos,
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Result<&'a str, FormatError> {
        match self.lines.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok(l)
            }
            None => self.err("unexpected end of input"),
        }
    }

    /// Next line, which must start with `tag`; returns the remaining tokens.
    fn tagged(&mut self, tag: &str) -> Result<Vec<&'a str>, FormatError> {
        let line = self.next()?;
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some(tag) {
            return self.err(format!("expected `{tag}`"));
        }
        Ok(tokens.collect())
    }

    fn ints(&self, tokens: &[&str], expected: usize) -> Result<Vec<BigInt>, FormatError> {
        if tokens.len() != expected {
            return self.err(format!("expected {expected} entries, found {}", tokens.len()));
        }
        tokens
            .iter()
            .map(|t| BigInt::from_str(t).or_else(|_| self.err(format!("bad integer `{t}`"))))
            .collect()
    }

    fn row(&mut self, width: usize) -> Result<Vec<BigInt>, FormatError> {
        let line = self.next()?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        self.ints(&tokens, width)
    }

    fn bounds(&mut self, tag: &str, expected: usize) -> Result<Vec<Bound>, FormatError> {
        let tokens = self.tagged(tag)?;
        if tokens.len() != expected {
            return self.err(format!("expected {expected} bounds, found {}", tokens.len()));
        }
        tokens
            .iter()
            .map(|t| match *t {
                "inf" => Ok(Bound::PosInf),
                "-inf" => Ok(Bound::NegInf),
                v => BigInt::from_str(v)
                    .map(Bound::Finite)
                    .or_else(|_| self.err(format!("bad bound `{v}`"))),
            })
            .collect()
    }
}

pub fn parse_text(text: &str) -> Result<NFoldModel, FormatError> {
    let mut p = Lines {
        lines: text.lines().collect(),
        pos: 0,
    };
    let header = p.tagged("NFOLD")?;
    if header.len() != 4 {
        return p.err("header needs r s t N");
    }
    let dims: Vec<usize> = header
        .iter()
        .map(|h| h.parse::<usize>().or_else(|_| p.err(format!("bad dimension `{h}`"))))
        .collect::<Result<_, _>>()?;
    let (r, s, t, n) = (dims[0], dims[1], dims[2], dims[3]);
    let mut var_names = Vec::with_capacity(n * t);
    for _ in 0..n {
        let names = p.tagged("VAR")?;
        if names.len() != t {
            return p.err(format!("expected {t} variable names"));
        }
        var_names.extend(names.into_iter().map(String::from));
    }
    let mut blocks = Vec::with_capacity(n);
    for i in 0..n {
        let idx = p.tagged("BLOCK")?;
        if idx != [(i + 1).to_string().as_str()] {
            return p.err(format!("expected block {}", i + 1));
        }
        p.tagged("E1")?;
        let e1 = (0..r).map(|_| p.row(t)).collect::<Result<_, _>>()?;
        p.tagged("E2")?;
        let e2 = (0..s).map(|_| p.row(t)).collect::<Result<_, _>>()?;
        blocks.push(Block { e1, e2 });
    }
    let rows = r + n * s;
    let rhs_tokens = p.tagged("RHS")?;
    let rhs = p.ints(&rhs_tokens, rows)?;
    let sense_tokens = p.tagged("SENSE")?;
    if sense_tokens.len() != rows {
        return p.err(format!("expected {rows} senses"));
    }
    let sense = sense_tokens
        .iter()
        .map(|s| match *s {
            "=" => Ok(Sense::Eq),
            "<=" => Ok(Sense::Le),
            other => p.err(format!("bad sense `{other}`")),
        })
        .collect::<Result<_, _>>()?;
    let lb = p.bounds("LB", n * t)?;
    let ub = p.bounds("UB", n * t)?;
    let mut objective = None;
    let line = p.next()?;
    let line = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["OBJ", "l2sq"] => {
            let mut speeds = Vec::with_capacity(n);
            for _ in 0..n {
                let tokens = p.tagged("SPEED")?;
                let v = p.ints(&tokens, 2)?;
                speeds.push((v[0].clone(), v[1].clone()));
            }
            objective = Some(NFoldObjective::L2Sq { speeds });
            p.next()?
        }
        ["OBJ", "sumwc"] => {
            let tokens = p.tagged("WEIGHTS")?;
            objective = Some(NFoldObjective::SumWc {
                weights: p.ints(&tokens, r)?,
            });
            p.next()?
        }
        ["OBJ", other] => return p.err(format!("unknown objective `{other}`")),
        _ => line,
    };
    if line.trim() != "END" {
        return p.err("expected `END`");
    }
    if p.lines[p.pos..].iter().any(|l| !l.trim().is_empty()) {
        return p.err("trailing content after END");
    }
    Ok(NFoldModel {
        r,
        s,
        t,
        n,
        var_names,
        blocks,
        rhs,
        sense,
        lb,
        ub,
        objective,
    })
}

pub fn export_model(model: &NFoldModel, path: &Path) -> Result<(), FormatError> {
    std::fs::write(path, to_text(model))?;
    Ok(())
}

pub fn import_model(path: &Path) -> Result<NFoldModel, FormatError> {
    parse_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::model::{JobType, Objective, ScheduleInstance};
    use crate::nfold::{build_nfold_cmax, build_nfold_objective};

    fn tiny() -> ScheduleInstance {
        ScheduleInstance::identical(
            2,
            vec![JobType::new(3, 2).with_weight(1), JobType::new(5, 1).with_weight(2)],
        )
    }

    #[test]
    fn tiny_text() {
        let model = build_nfold_cmax(&tiny(), &ratio(6, 1)).unwrap();
        let text = to_text(&model);
        assert_eq!(text.lines().filter(|l| l.starts_with("VAR")).count(), 2);
        let declared: usize = text
            .lines()
            .filter(|l| l.starts_with("VAR"))
            .map(|l| l.split_whitespace().count() - 1)
            .sum();
        assert_eq!(declared, 4);
        assert!(text.contains("E1\n1 0\n0 1\nE2\n3 5\n"));
        assert!(text.contains("RHS 2 1 6 6\n"));
        assert!(text.contains("SENSE = = <= <=\n"));
        assert_eq!(parse_text(&text).unwrap(), model);
    }

    #[test]
    fn round_trips() {
        let models = vec![
            build_nfold_cmax(&tiny(), &ratio(6, 1)).unwrap(),
            build_nfold_cmax(&tiny(), &ratio(6, 1)).unwrap().standard_form(),
            build_nfold_objective(&tiny().with_objective(Objective::L2Sq)).unwrap(),
            build_nfold_objective(&tiny().with_objective(Objective::SumWc)).unwrap(),
            build_nfold_cmax(&ScheduleInstance::identical(2, vec![]), &ratio(1, 1)).unwrap(),
        ];
        for m in models {
            let text = to_text(&m);
            let back = parse_text(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(to_text(&back), text);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.nfold");
        let model = build_nfold_cmax(&tiny(), &ratio(6, 1)).unwrap();
        export_model(&model, &path).unwrap();
        assert_eq!(import_model(&path).unwrap(), model);
    }

    #[test]
    fn malformed_input() {
        assert!(parse_text("NFOLD 1 1 1\n").is_err());
        let good = to_text(&build_nfold_cmax(&tiny(), &ratio(6, 1)).unwrap());
        assert!(parse_text(&good.replace("RHS 2 1 6 6", "RHS 2 1 6")).is_err());
        assert!(parse_text(&good.replace("END\n", "")).is_err());
        assert!(parse_text(&good.replace("<=", "<")).is_err());
    }
}
