//! JSON wire formats for the core types and the report envelope.
//!
//! Conventions: permutations are one-line arrays; set partitions are
//! arrays of blocks ordered by minimum; graphs are `{"n", "edges"}` with
//! barred vertices of doubled graphs written as negative labels; exact
//! rationals are `"p/q"` strings; floating values are rounded to 15
//! significant digits.

use anyhow::{anyhow, bail, Context, Result};
use ewens_core::elementary::ElementarySpec;
use ewens_core::graph::SimpleGraph;
use ewens_core::perm::Permutation;
use ewens_core::ratfun::{Degree, RatFun};
use ewens_core::setpart::SetPartition;
use ewens_core::stats::{
    BivincularPattern, Constraint, DashedPattern, Expr, LocalStatistic, Rel, Var,
};
use ewens_core::Rat;
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

/// Schema tag stamped on every report document.
pub const SCHEMA: &str = "ewens-report/1";

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| anyhow!("bad integer {s:?}: {e}"))
}

/// Rounds to 15 significant decimal digits; Monte-Carlo outputs use this
/// so reports are stable and readable.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(14 - magnitude);
    (x * factor).round() / factor
}

pub fn float(x: f64) -> Value {
    json!(round15(x))
}

/// `p/q` (or just `p` for integers).
pub fn rat_to_string(r: &Rat) -> String {
    format!("{r}")
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let d = parse_bigint(den)?;
        if d == BigInt::from(0) {
            bail!("zero denominator in {s:?}");
        }
        Ok(Rat::new(parse_bigint(num)?, d))
    } else {
        Ok(Rat::from_integer(parse_bigint(s)?))
    }
}

pub fn perm_to_value(sigma: &Permutation) -> Value {
    json!(sigma.one_line())
}

pub fn perm_from_value(v: &Value) -> Result<Permutation> {
    let arr = usize_vec(v).context("permutation must be an array of integers")?;
    Permutation::from_one_line(arr).map_err(|e| anyhow!("{e}"))
}

/// Comma-separated one-line word, e.g. `3,7,5,2,1,6,4`.
pub fn parse_perm_arg(s: &str) -> Result<Permutation> {
    let word = parse_usize_list(s)?;
    Permutation::from_one_line(word).map_err(|e| anyhow!("{e}"))
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| anyhow!("bad integer {t:?}: {e}"))
        })
        .collect()
}

pub fn partition_to_value(p: &SetPartition) -> Value {
    json!(p.blocks())
}

pub fn partition_from_value(n: usize, v: &Value) -> Result<SetPartition> {
    let arr = v
        .as_array()
        .ok_or_else(|| anyhow!("partition must be an array of blocks"))?;
    let blocks: Result<Vec<Vec<usize>>> = arr.iter().map(usize_vec).collect();
    SetPartition::from_blocks(n, &blocks?).map_err(|e| anyhow!("{e}"))
}

pub fn parse_partition_arg(n: usize, s: &str) -> Result<SetPartition> {
    let v: Value = serde_json::from_str(s).context("partition must be JSON like [[1,2],[3]]")?;
    partition_from_value(n, &v)
}

/// Plain graphs use labels `1..=n`; doubled graphs write the barred copy
/// of vertex `w` as `-w`.
pub fn graph_to_value(g: &SimpleGraph, doubled: bool) -> Value {
    if !doubled {
        let edges: Vec<Vec<i64>> = g
            .edges()
            .map(|(u, v)| vec![u as i64, v as i64])
            .collect();
        return json!({"n": g.num_vertices(), "edges": edges});
    }
    let m = g.num_vertices() / 2;
    let label = |v: usize| -> i64 {
        if v <= m {
            v as i64
        } else {
            -((v - m) as i64)
        }
    };
    let edges: Vec<Vec<i64>> = g.edges().map(|(u, v)| vec![label(u), label(v)]).collect();
    json!({"n": m, "edges": edges, "doubled": true})
}

pub fn graph_from_value(v: &Value) -> Result<SimpleGraph> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| anyhow!("graph needs an integer \"n\""))? as usize;
    let doubled = v["doubled"].as_bool().unwrap_or(false);
    let vertices = if doubled { 2 * n } else { n };
    let mut g = SimpleGraph::new(vertices).map_err(|e| anyhow!("{e}"))?;
    let edges = v["edges"]
        .as_array()
        .ok_or_else(|| anyhow!("graph needs an \"edges\" array"))?;
    for e in edges {
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| anyhow!("edge must be a pair"))?;
        let map = |x: &Value| -> Result<usize> {
            let raw = x.as_i64().ok_or_else(|| anyhow!("edge label must be an integer"))?;
            if raw > 0 {
                Ok(raw as usize)
            } else if raw < 0 && doubled {
                Ok((-raw) as usize + n)
            } else {
                bail!("bad vertex label {raw}")
            }
        };
        g.add_edge(map(&pair[0])?, map(&pair[1])?)
            .map_err(|e| anyhow!("{e}"))?;
    }
    Ok(g)
}

pub fn dashed_to_value(p: &DashedPattern) -> Value {
    json!({
        "tau": p.pattern().one_line(),
        "X": p.adjacent_positions().iter().collect::<Vec<_>>(),
    })
}

pub fn dashed_from_value(v: &Value) -> Result<DashedPattern> {
    let tau = usize_vec(&v["tau"]).context("pattern needs \"tau\"")?;
    let x = match &v["X"] {
        Value::Null => Vec::new(),
        other => usize_vec(other).context("\"X\" must be an integer array")?,
    };
    DashedPattern::from_word(tau, &x).map_err(|e| anyhow!("{e}"))
}

pub fn parse_dashed_arg(s: &str) -> Result<DashedPattern> {
    let v: Value =
        serde_json::from_str(s).context("pattern must be JSON like {\"tau\":[2,1],\"X\":[1]}")?;
    dashed_from_value(&v)
}

pub fn bivincular_from_value(v: &Value) -> Result<BivincularPattern> {
    let tau = usize_vec(&v["tau"]).context("pattern needs \"tau\"")?;
    let x = match &v["X"] {
        Value::Null => Vec::new(),
        other => usize_vec(other)?,
    };
    let y = match &v["Y"] {
        Value::Null => Vec::new(),
        other => usize_vec(other)?,
    };
    BivincularPattern::from_words(tau, &x, &y).map_err(|e| anyhow!("{e}"))
}

pub fn spec_to_value(spec: &ElementarySpec) -> Value {
    json!({
        "i": spec.sources(),
        "s": spec.targets(),
        "tau": spec.grouping().blocks(),
    })
}

pub fn spec_from_value(v: &Value) -> Result<ElementarySpec> {
    let i = usize_vec(&v["i"]).context("spec needs \"i\"")?;
    let s = usize_vec(&v["s"]).context("spec needs \"s\"")?;
    let tau = partition_from_value(i.len(), &v["tau"])?;
    ElementarySpec::new(i, s, tau).map_err(|e| anyhow!("{e}"))
}

fn expr_from_value(v: &Value) -> Result<Expr> {
    let var = match v["var"].as_str() {
        Some("i") => Var::Position,
        Some("s") => Var::Value,
        other => bail!("expression \"var\" must be \"i\" or \"s\", got {other:?}"),
    };
    let j = v["j"]
        .as_u64()
        .ok_or_else(|| anyhow!("expression needs integer \"j\""))? as usize;
    let d = v["d"].as_i64().unwrap_or(0);
    Ok(Expr { var, j, d })
}

fn rel_from_str(s: &str) -> Result<Rel> {
    Ok(match s {
        "=" | "==" => Rel::Eq,
        "<" => Rel::Lt,
        "<=" => Rel::Le,
        ">" => Rel::Gt,
        ">=" => Rel::Ge,
        other => bail!("unknown relation {other:?}"),
    })
}

/// `{"p": 2, "constraints": [{"lhs": {"var":"i","j":2,"d":0}, "rel": "=",
/// "rhs": {"var":"i","j":1,"d":1}}, ...]}`
pub fn local_stat_from_value(v: &Value) -> Result<LocalStatistic> {
    let p = v["p"]
        .as_u64()
        .ok_or_else(|| anyhow!("local statistic needs integer \"p\""))? as usize;
    let list = v["constraints"]
        .as_array()
        .ok_or_else(|| anyhow!("local statistic needs \"constraints\""))?;
    let mut constraints = Vec::new();
    for c in list {
        constraints.push(Constraint {
            lhs: expr_from_value(&c["lhs"])?,
            rel: rel_from_str(
                c["rel"]
                    .as_str()
                    .ok_or_else(|| anyhow!("constraint needs \"rel\""))?,
            )?,
            rhs: expr_from_value(&c["rhs"])?,
        });
    }
    LocalStatistic::new(p, constraints).map_err(|e| anyhow!("{e}"))
}

pub fn parse_local_arg(s: &str) -> Result<LocalStatistic> {
    let v: Value = serde_json::from_str(s).context("local statistic must be JSON")?;
    local_stat_from_value(&v)
}

pub fn degree_to_value(d: Degree) -> Value {
    match d {
        Degree::NegInf => json!("-inf"),
        Degree::Finite(k) => json!(k),
    }
}

pub fn ratfun_to_value(f: &RatFun) -> Value {
    json!({
        "coeffs": format!("{f}"),
        "pretty": f.to_factored_string().unwrap_or_else(|| format!("{f}")),
        "degree": degree_to_value(f.degree()),
    })
}

/// The report envelope every subcommand emits.
pub fn envelope(command: &str, config: Value, result: Value) -> Value {
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("command".into(), json!(command));
    doc.insert("config".into(), config);
    doc.insert("result".into(), result);
    Value::Object(doc)
}

fn usize_vec(v: &Value) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| anyhow!("expected an array"))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| anyhow!("expected a nonnegative integer, got {x}"))
        })
        .collect()
}
