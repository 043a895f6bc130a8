//! Browser bindings. Every export takes plain numbers and strings and
//! returns a JSON string; failures come back as `{"error": "..."}`.

use cayley_diamond::markov::{equidistribution_report, render};
use cayley_diamond::search::Budget;
use cayley_diamond::*;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn gens_from(group: &str, gens: &str) -> Result<GeneratorSet> {
    let g = format::parse_group(group)?;
    let lits: Vec<&str> = gens.split_whitespace().collect();
    GeneratorSet::new(&g, format::parse_elements(&g, &lits)?)
}

/// Elements, cover edges (`i ≺ j` with nothing between) and the verdict.
fn poset_json(p: &CayleyPoset) -> Value {
    let e = p.elements();
    let below = |a: usize, b: usize| a != b && p.leq(&e[a], &e[b]);
    let mut edges = Vec::new();
    for a in 0..e.len() {
        for b in 0..e.len() {
            if below(a, b) && !(0..e.len()).any(|c| below(a, c) && below(c, b)) {
                edges.push(json!([a, b]));
            }
        }
    }
    let v = p.verify();
    json!({
        "group": p.group().to_string(),
        "order": p.group().order(),
        "gens": p.gens().elements().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "elements": e.iter().map(|x| json!({
            "gamma": x.gamma.to_string(),
            "index": p.group().index_of(&x.gamma),
            "level": x.level,
        })).collect::<Vec<_>>(),
        "edges": edges,
        "strongly_diamond_free": v.is_strongly_diamond_free(),
        "diamond": v.diamond.map(|d| format!("{} < {}, {} < {}", d.bottom, d.left, d.right, d.top)),
        "strong_chain": v.strong_chain.map(|c| format!("{} < {} < {} via {}", c.lower, c.middle, c.upper, c.shared_eta)),
        "period": p.gens().period().ok().map(|i| i.period_d),
    })
}

/// A catalogue construction; `0` leaves a parameter at its default.
#[wasm_bindgen]
pub fn example(kind: u32, m: u32, a: u32, b: u32, k: u32) -> String {
    let opt = |x: u32| (x > 0).then_some(x as u64);
    let params = KindParams {
        m: opt(m),
        a: opt(a),
        b: opt(b),
        k: opt(k),
        ..KindParams::default()
    };
    respond(
        Construction::from_kind(kind, &params)
            .and_then(|c| c.build())
            .map(|p| poset_json(&p)),
    )
}

/// Total variation and max deviation of the uniform walk on `gens`,
/// `k = 0..=k_max`.
#[wasm_bindgen]
pub fn tv_curve(group: &str, gens: &str, k_max: u32) -> String {
    respond(gens_from(group, gens).map(|h| {
        let r = equidistribution_report(&StepDistribution::uniform(&h), k_max as u64, None);
        json!({
            "tv": r.tv.iter().map(|(_, t)| t.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>(),
            "max_dev": r.max_dev.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>(),
            "last_tv": render(&r.tv.last().expect("k = 0 is always present").1, None),
        })
    }))
}

/// Largest strongly diamond-free poset on the given levels.
#[wasm_bindgen]
pub fn search_max(group: &str, gens: &str, levels: &str, max_nodes: u32) -> String {
    let levels: std::result::Result<Vec<i64>, _> =
        levels.split_whitespace().map(str::parse::<i64>).collect();
    let Ok(levels) = levels else {
        return json!({ "error": "levels must be integers" }).to_string();
    };
    respond(gens_from(group, gens).and_then(|h| {
        let mut p = SearchProblem::new(h, levels);
        p.threads = 1;
        p.budget = Budget {
            max_nodes: Some(max_nodes as u64),
            max_time: None,
        };
        let r = max_sdf_poset(&p)?;
        Ok(json!({
            "poset": poset_json(&r.best),
            "best_size": r.best_size,
            "upper_bound": r.upper_bound,
            "proven": r.proven_optimal,
            "nodes": r.nodes_expanded,
        }))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn z7_example_json() {
        let v = parse(&example(3, 0, 0, 0, 0));
        assert_eq!(v["elements"].as_array().unwrap().len(), 13);
        assert_eq!(v["strongly_diamond_free"], true);
        assert_eq!(v["period"], 1);
        assert!(!v["edges"].as_array().unwrap().is_empty());
    }

    #[test]
    fn covers_skip_implied_relations() {
        let v = parse(&example(1, 3, 1, 0, 0));
        // two full levels over Z_3 with H = {1}: each bottom element has one cover
        assert_eq!(v["edges"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn bad_input_reports_error() {
        assert!(parse(&example(9, 0, 0, 0, 0))["error"].is_string());
        assert!(parse(&tv_curve("3", "1 1", 4))["error"].is_string());
        assert!(parse(&search_max("3", "1 2", "a b", 10))["error"].is_string());
    }

    #[test]
    fn tv_curve_decreases() {
        let v = parse(&tv_curve("3", "1 2", 10));
        let tv: Vec<f64> = v["tv"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert_eq!(tv.len(), 11);
        assert!(tv.windows(2).all(|w| w[1] <= w[0]));
        // (2/3) 2^-k
        assert_eq!(v["last_tv"], "1/1536");
    }

    #[test]
    fn small_search() {
        let v = parse(&search_max("5", "1 2", "1 2 3", 1_000_000));
        assert_eq!(v["best_size"], 10);
        assert_eq!(v["proven"], true);
        assert_eq!(v["poset"]["strongly_diamond_free"], true);
    }
}
