//! Line-oriented text formats for posets, families and search problems.
//!
//! Comments start with `#`. Group literals join factors with `x` (`3`,
//! `2x4`); element literals join residues with `:` (`2`, `1:3`).
//!
//! ```text
//! group 3
//! gens 0 2
//! conv standard
//! elem 2 1
//! ```

use std::fmt::Write as _;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::family::{subset_indices, SubsetFamily, MAX_GROUND_SET};
use crate::group::{FiniteAbelianGroup, GeneratorSet, GroupElement};
use crate::poset::{CayleyPoset, Convention, PosetElement};
use crate::search::{Budget, SearchProblem};

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

/// Re-tags argument errors with a line number.
fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.or_else(|e| match e {
        Error::InvalidArgument(msg) => err(line, msg),
        other => Err(other),
    })
}

pub fn parse_group(lit: &str) -> Result<FiniteAbelianGroup> {
    if lit == "trivial" {
        return FiniteAbelianGroup::new(&[]);
    }
    let factors = lit
        .split('x')
        .map(|f| {
            f.parse::<i64>()
                .map_err(|_| Error::InvalidArgument(format!("bad group literal `{lit}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteAbelianGroup::from_signed(&factors)
}

/// Parses an element literal, reducing residues modulo the factors.
pub fn parse_element(group: &FiniteAbelianGroup, lit: &str) -> Result<GroupElement> {
    if lit == "()" {
        return group.reduce(&[]);
    }
    let values = lit
        .split(':')
        .map(|r| {
            r.parse::<i64>()
                .map_err(|_| Error::InvalidArgument(format!("bad element literal `{lit}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    group.reduce(&values)
}

pub fn parse_elements(group: &FiniteAbelianGroup, lits: &[&str]) -> Result<Vec<GroupElement>> {
    lits.iter().map(|l| parse_element(group, l)).collect()
}

/// Splits into `(line number, tokens)` with comments and blank lines removed.
fn statements(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

/// Reads a poset file. The `optimum …` summary line written by the search
/// is accepted and ignored.
pub fn parse_poset(text: &str) -> Result<CayleyPoset> {
    let mut group: Option<FiniteAbelianGroup> = None;
    let mut gens: Option<GeneratorSet> = None;
    let mut conv: Option<Convention> = None;
    let mut elems: Vec<(usize, PosetElement)> = Vec::new();
    let mut last_line = 0;
    for (line, tokens) in statements(text) {
        last_line = line;
        match tokens[0] {
            "group" => {
                if group.is_some() {
                    return err(line, "repeated `group`");
                }
                if tokens.len() != 2 {
                    return err(line, "`group` takes one literal");
                }
                group = Some(at(line, parse_group(tokens[1]))?);
            }
            "gens" => {
                let Some(g) = &group else {
                    return err(line, "`gens` before `group`");
                };
                if gens.is_some() {
                    return err(line, "repeated `gens`");
                }
                let h = at(line, parse_elements(g, &tokens[1..]))?;
                gens = Some(at(line, GeneratorSet::new(g, h))?);
            }
            "conv" => {
                if conv.is_some() {
                    return err(line, "repeated `conv`");
                }
                if tokens.len() != 2 {
                    return err(line, "`conv` takes `standard` or `mirror`");
                }
                conv = Some(tokens[1].parse().or_else(|m: String| err(line, m))?);
            }
            "elem" => {
                let Some(g) = &group else {
                    return err(line, "`elem` before `group`");
                };
                if tokens.len() != 3 {
                    return err(line, "`elem` takes an element literal and a level");
                }
                let gamma = at(line, parse_element(g, tokens[1]))?;
                let level: i64 = tokens[2]
                    .parse()
                    .or_else(|_| err(line, format!("bad level `{}`", tokens[2])))?;
                elems.push((line, PosetElement::new(gamma, level)));
            }
            "optimum" => {}
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }
    let Some(gens) = gens else {
        return err(last_line.max(1), "missing `gens`");
    };
    for (i, (line, e)) in elems.iter().enumerate() {
        if elems[..i].iter().any(|(_, f)| f == e) {
            return err(*line, format!("duplicate element {e}"));
        }
    }
    CayleyPoset::new(
        gens,
        conv.unwrap_or_default(),
        elems.into_iter().map(|(_, e)| e),
    )
}

/// Canonical text: `group`, `gens`, `conv`, then elements in canonical order.
pub fn emit_poset(poset: &CayleyPoset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "group {}", poset.group());
    let gens: Vec<String> = poset
        .gens()
        .elements()
        .iter()
        .map(|e| e.to_string())
        .collect();
    let _ = writeln!(out, "gens {}", gens.join(" "));
    let _ = writeln!(out, "conv {}", poset.convention().name());
    for e in poset.elements() {
        let _ = writeln!(out, "elem {} {}", e.gamma, e.level);
    }
    out
}

/// One member per line after the `n` header: ascending 1-based indices
/// joined by commas (`{}` for the empty set), or lowercase hex bitmasks.
pub fn emit_family(family: &SubsetFamily, hex: bool) -> String {
    let mut out = format!("n {}\n", family.n());
    for &s in family.members() {
        if hex {
            let _ = writeln!(out, "{s:x}");
        } else if s == 0 {
            out.push_str("{}\n");
        } else {
            let idx: Vec<String> = subset_indices(s).iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", idx.join(","));
        }
    }
    out
}

pub fn parse_family(text: &str, hex: bool) -> Result<SubsetFamily> {
    let mut n: Option<u32> = None;
    let mut members = Vec::new();
    for (line, tokens) in statements(text) {
        match n {
            None => {
                if tokens.len() != 2 || tokens[0] != "n" {
                    return err(line, "expected header `n <int>`");
                }
                let v: u32 = tokens[1]
                    .parse()
                    .or_else(|_| err(line, format!("bad ground set size `{}`", tokens[1])))?;
                if v > MAX_GROUND_SET {
                    return err(line, format!("n = {v} exceeds {MAX_GROUND_SET}"));
                }
                n = Some(v);
            }
            Some(n) => {
                if tokens.len() != 1 {
                    return err(line, "expected one member per line");
                }
                let tok = tokens[0];
                let s = if hex {
                    u64::from_str_radix(tok, 16)
                        .or_else(|_| err(line, format!("bad hex bitmask `{tok}`")))?
                } else if tok == "{}" {
                    0
                } else {
                    let mut s = 0u64;
                    for part in tok.split(',') {
                        let x: u32 = part
                            .parse()
                            .or_else(|_| err(line, format!("bad index `{part}`")))?;
                        if x == 0 || x > n {
                            return err(line, format!("index {x} outside [1, {n}]"));
                        }
                        s |= 1 << (x - 1);
                    }
                    s
                };
                if n < 64 && s >> n != 0 {
                    return err(line, format!("member {tok} exceeds n = {n}"));
                }
                members.push(s);
            }
        }
    }
    let Some(n) = n else {
        return err(1, "missing header `n <int>`");
    };
    SubsetFamily::new(n, members)
}

fn parse_count(line: usize, v: &str) -> Result<u64> {
    if let Ok(x) = v.parse::<u64>() {
        return Ok(x);
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x as u64),
        _ => err(line, format!("bad number `{v}`")),
    }
}

/// Search problem file: `group`, `gens`, `levels …`, optional
/// `budget nodes=<n> secs=<s>` and `conv`.
pub fn parse_search_problem(text: &str) -> Result<SearchProblem> {
    let mut group: Option<FiniteAbelianGroup> = None;
    let mut gens: Option<GeneratorSet> = None;
    let mut levels: Option<Vec<i64>> = None;
    let mut budget = Budget::default();
    let mut conv = Convention::Standard;
    let mut last_line = 0;
    for (line, tokens) in statements(text) {
        last_line = line;
        match tokens[0] {
            "group" => {
                if tokens.len() != 2 {
                    return err(line, "`group` takes one literal");
                }
                group = Some(at(line, parse_group(tokens[1]))?);
            }
            "gens" => {
                let Some(g) = &group else {
                    return err(line, "`gens` before `group`");
                };
                let h = at(line, parse_elements(g, &tokens[1..]))?;
                gens = Some(at(line, GeneratorSet::new(g, h))?);
            }
            "levels" => {
                let v = tokens[1..]
                    .iter()
                    .map(|t| {
                        t.parse::<i64>()
                            .or_else(|_| err(line, format!("bad level `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if v.is_empty() {
                    return err(line, "`levels` needs at least one level");
                }
                levels = Some(v);
            }
            "budget" => {
                for kv in &tokens[1..] {
                    match kv.split_once('=') {
                        Some(("nodes", v)) => budget.max_nodes = Some(parse_count(line, v)?),
                        Some(("secs", v)) => {
                            budget.max_time = Some(Duration::from_secs(parse_count(line, v)?))
                        }
                        _ => return err(line, format!("bad budget entry `{kv}`")),
                    }
                }
            }
            "conv" => {
                if tokens.len() != 2 {
                    return err(line, "`conv` takes `standard` or `mirror`");
                }
                conv = tokens[1].parse().or_else(|m: String| err(line, m))?;
            }
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }
    let (Some(gens), Some(levels)) = (gens, levels) else {
        return err(
            last_line.max(1),
            "search problem needs `group`, `gens` and `levels`",
        );
    };
    let mut p = SearchProblem::new(gens, levels);
    p.budget = budget;
    p.convention = conv;
    Ok(p)
}
