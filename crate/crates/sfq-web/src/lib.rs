//! Browser bindings for three operations of the engine, on the same text
//! format as the command-line tool: canonical form of a graph, `∂^Hoch` and
//! `Π` of a vector, and the Monte-Carlo weight of a graph.
//!
//! Every function returns text; failures come back as a single line
//! starting with `error:` so the page can show them verbatim.

use sfq::graph::{fmt_q, Graph, GraphVector, Q};
use sfq::homology::{hoch, pi};
use sfq::io::{format_graph_vector, parse_graph_file, parse_graph_lines};
use sfq::weight::estimate_weight_edges;
use wasm_bindgen::prelude::*;

/// Largest sample count the page may request; keeps the tab responsive.
pub const MAX_SAMPLES: u32 = 2_000_000;

fn report(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}\n"))
}

/// Canonical form and sign of every line, or `ZERO` for a repeated edge.
#[wasm_bindgen]
pub fn canon(text: &str) -> String {
    report((|| {
        let mut out = String::new();
        for (n, gl) in parse_graph_lines(text).map_err(|e| e.to_string())? {
            let v = Graph::canonicalize(gl.nb, gl.nw, &gl.edges).map_err(|e| format!("line {n}: {e}"))?;
            let term = v.iter().next().map(|(g, c)| (g.clone(), c.clone()));
            match term {
                None => out.push_str("ZERO\n"),
                Some((g, sign)) => {
                    let line = format_graph_vector(&GraphVector::single(g, &sign * &gl.coeff, gl.color));
                    // the sign is ±1; `Q::default()` is zero
                    let sign = if sign < Q::default() { "-1" } else { "+1" };
                    out.push_str(&format!("{} sign={sign}\n", line.trim_end()));
                }
            }
        }
        Ok(out)
    })())
}

/// `∂^Hoch` of the vector, followed by `Π` of the vector.
#[wasm_bindgen]
pub fn hoch_pi(text: &str) -> String {
    report((|| {
        let v = parse_graph_file(text).map_err(|e| e.to_string())?;
        let d = hoch(&v).map_err(|e| e.to_string())?;
        Ok(format!("# hoch\n{}# pi\n{}", format_graph_vector(&d), format_graph_vector(&pi(&v))))
    })())
}

/// Weight estimate of a single graph line.
#[wasm_bindgen]
pub fn weight(text: &str, samples: u32, seed: u32) -> String {
    report((|| {
        let lines = parse_graph_lines(text).map_err(|e| e.to_string())?;
        let [(n, gl)] = lines.as_slice() else {
            return Err("expected exactly one graph line".into());
        };
        let samples = samples.clamp(1, MAX_SAMPLES) as u64;
        let w = estimate_weight_edges(gl.nb, gl.nw, &gl.edges, samples, seed as u64).map_err(|e| format!("line {n}: {e}"))?;
        Ok(format!(
            "mean={:.6e} stderr={:.6e} samples={} seed={} coeff={}\n",
            w.mean,
            w.stderr,
            w.samples,
            w.seed,
            fmt_q(&gl.coeff)
        ))
    })())
}
