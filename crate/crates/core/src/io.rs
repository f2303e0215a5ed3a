//! graph6 and whitespace edge-list text formats, plus measure JSON.

use crate::graph::Graph;
use crate::measure::{parse_rat, rat_string, Measure};
use crate::{Error, Result};

/// Encode a graph in graph6 format (bit-exact per the standard format).
pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = String::new();
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else if n <= 258047 {
        out.push('~');
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    } else {
        out.push('~');
        out.push('~');
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    }
    // Upper triangle, column by column: bit (i, j) for j in 1..n, i in 0..j.
    let mut bits: Vec<bool> = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for j in 1..n {
        for i in 0..j {
            bits.push(g.has_edge(i, j));
        }
    }
    for chunk in bits.chunks(6) {
        let mut v = 0u8;
        for (k, &b) in chunk.iter().enumerate() {
            if b {
                v |= 1 << (5 - k);
            }
        }
        out.push((v + 63) as char);
    }
    out
}

/// Decode a graph6 string.
pub fn from_graph6(s: &str) -> Result<Graph> {
    let s = s.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes: Vec<u8> = s.bytes().collect();
    if bytes.is_empty() {
        return Err(Error::Input("empty graph6 string".into()));
    }
    for &b in &bytes {
        if !(63..=126).contains(&b) {
            return Err(Error::Input(format!("invalid graph6 byte {b}")));
        }
    }
    let (n, mut pos) = if bytes[0] != b'~' {
        ((bytes[0] - 63) as usize, 1)
    } else if bytes.len() > 1 && bytes[1] != b'~' {
        if bytes.len() < 4 {
            return Err(Error::Input("truncated graph6 size".into()));
        }
        let n = ((bytes[1] - 63) as usize) << 12
            | ((bytes[2] - 63) as usize) << 6
            | (bytes[3] - 63) as usize;
        (n, 4)
    } else {
        if bytes.len() < 8 {
            return Err(Error::Input("truncated graph6 size".into()));
        }
        let mut n = 0usize;
        for &b in &bytes[2..8] {
            n = n << 6 | (b - 63) as usize;
        }
        (n, 8)
    };
    let need_bits = n * n.saturating_sub(1) / 2;
    let need_bytes = need_bits.div_ceil(6);
    if bytes.len() - pos < need_bytes {
        return Err(Error::Input(format!(
            "graph6 body too short: need {need_bytes} bytes, have {}",
            bytes.len() - pos
        )));
    }
    let mut g = Graph::new(n);
    let mut bit = 0usize;
    'outer: for j in 1..n {
        for i in 0..j {
            let byte = bytes[pos + bit / 6] - 63;
            if byte >> (5 - bit % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
            if bit >= need_bits {
                pos += need_bytes;
                let _ = pos;
                break 'outer;
            }
        }
    }
    Ok(g)
}

/// Parse a whitespace edge list. The first non-comment line may be a single
/// integer giving the vertex count; otherwise the count is one more than the
/// largest endpoint. Lines starting with `#` are comments.
pub fn from_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.len() {
            1 if n.is_none() && edges.is_empty() => {
                n = Some(
                    toks[0]
                        .parse()
                        .map_err(|_| Error::Input(format!("bad vertex count {:?}", toks[0])))?,
                );
            }
            2 => {
                let u: usize = toks[0]
                    .parse()
                    .map_err(|_| Error::Input(format!("bad vertex {:?}", toks[0])))?;
                let v: usize = toks[1]
                    .parse()
                    .map_err(|_| Error::Input(format!("bad vertex {:?}", toks[1])))?;
                if u == v {
                    return Err(Error::Input(format!("self-loop at {u}")));
                }
                edges.push((u, v));
            }
            _ => return Err(Error::Input(format!("unparseable line {line:?}"))),
        }
    }
    let max = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = n.unwrap_or(max);
    if max > n {
        return Err(Error::Input(format!(
            "edge endpoint {} exceeds declared vertex count {n}",
            max - 1
        )));
    }
    Ok(Graph::from_edges(n, &edges))
}

/// Load a graph from a file by extension: `.g6` for graph6, anything else as
/// an edge list.
pub fn load_graph(path: &std::path::Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    if path.extension().and_then(|e| e.to_str()) == Some("g6") {
        from_graph6(&text)
    } else {
        from_edge_list(&text)
    }
}

/// Measure JSON: `{"weights": ["1/6", "1/2", "1/3"]}` or the string
/// `"uniform"` resolved against an element count.
pub fn measure_from_json(text: &str, expected_len: usize) -> Result<Measure> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("measure json: {e}")))?;
    if v.as_str() == Some("uniform") {
        return Ok(Measure::uniform(expected_len));
    }
    let arr = v
        .get("weights")
        .and_then(|w| w.as_array())
        .ok_or_else(|| Error::Input("measure json needs a \"weights\" array".into()))?;
    let mut weights = Vec::with_capacity(arr.len());
    for item in arr {
        let r = match item {
            serde_json::Value::String(s) => parse_rat(s)?,
            serde_json::Value::Number(n) if n.is_u64() || n.is_i64() => {
                crate::measure::rat(n.as_i64().unwrap() as i128, 1)
            }
            other => return Err(Error::Input(format!("bad weight {other}"))),
        };
        weights.push(r);
    }
    if weights.len() != expected_len {
        return Err(Error::Input(format!(
            "measure has {} weights but the graph has {} elements",
            weights.len(),
            expected_len
        )));
    }
    Measure::from_weights(weights)
}

pub fn measure_to_json(mu: &Measure) -> String {
    let weights: Vec<String> = mu.weights().iter().map(rat_string).collect();
    serde_json::json!({ "weights": weights }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, NamedGraph};

    #[test]
    fn graph6_known_value() {
        // 5 vertices, edges (0,2) (0,4) (1,3) (3,4) encodes to "DQc".
        let g = Graph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]);
        assert_eq!(to_graph6(&g), "DQc");
        assert_eq!(from_graph6("DQc").unwrap(), g);
    }

    #[test]
    fn graph6_roundtrip_various() {
        for g in [
            Graph::new(0),
            Graph::new(1),
            build_named(NamedGraph::Clique(7)).unwrap(),
            build_named(NamedGraph::Cycle(63)).unwrap(),
            build_named(NamedGraph::DoubleHook(3)).unwrap(),
        ] {
            assert_eq!(from_graph6(&to_graph6(&g)).unwrap(), g);
        }
    }

    #[test]
    fn edge_list_parsing() {
        let g = from_edge_list("# a square\n4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(from_edge_list("0 0\n").is_err());
        let g = from_edge_list("5\n0 1\n").unwrap();
        assert_eq!(g.n(), 5);
    }

    #[test]
    fn measure_json_roundtrip() {
        let mu = Measure::from_weights(vec![
            crate::measure::rat(1, 2),
            crate::measure::rat(1, 3),
            crate::measure::rat(1, 6),
        ])
        .unwrap();
        let j = measure_to_json(&mu);
        let back = measure_from_json(&j, 3).unwrap();
        assert_eq!(mu, back);
        assert_eq!(measure_from_json("\"uniform\"", 4).unwrap(), Measure::uniform(4));
    }
}
