//! Class recognizers the pipelines dispatch on: claws, C5s, diamonds, odd
//! holes, flat edges, elementary graphs, and nine-clique partitions.

use crate::graph::Graph;
use crate::oracle;
use crate::{Error, Result};
use serde::Serialize;

/// Patterns [`find_pattern`] can locate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pattern {
    /// K_{1,3}; the embedding reports the center first.
    Claw,
    /// Induced five-cycle, reported in cycle order.
    C5,
    /// Induced odd cycle of length >= 5 (delegates to the Berge oracle).
    OddHole,
    /// Complement of an odd hole (delegates to the Berge oracle).
    OddAntihole,
    /// K4 minus one edge; reported as (degree-3, degree-3, degree-2, degree-2).
    Diamond,
}

/// Find an induced copy of `pat` in `g`. Claw, C5 and diamond are polynomial
/// scans with deterministic lowest-index order; the hole variants enumerate
/// and are capped at the Berge oracle's size.
pub fn find_pattern(g: &Graph, pat: Pattern) -> Result<Option<Vec<usize>>> {
    match pat {
        Pattern::Claw => Ok(find_claw(g)),
        Pattern::C5 => Ok(find_c5(g)),
        Pattern::Diamond => Ok(find_diamond(g)),
        Pattern::OddHole => find_hole_only(g),
        Pattern::OddAntihole => find_hole_only(&g.complement()),
    }
}

fn find_hole_only(g: &Graph) -> Result<Option<Vec<usize>>> {
    if g.n() > oracle::BERGE_CAP {
        return Err(Error::SizeCap(format!(
            "odd-hole search handles n <= {}, got {}",
            oracle::BERGE_CAP,
            g.n()
        )));
    }
    // Berge test on a graph whose complement is edge-free of odd holes is not
    // available directly; enumerate cycles in g alone.
    for mask in 0u64..(1u64 << g.n()) {
        let k = mask.count_ones();
        if k < 5 || k % 2 == 0 {
            continue;
        }
        let verts: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        if let Some(cycle) = cycle_order(g, &verts) {
            return Ok(Some(cycle));
        }
    }
    Ok(None)
}

fn cycle_order(g: &Graph, verts: &[usize]) -> Option<Vec<usize>> {
    let k = verts.len();
    for &v in verts {
        let d = verts.iter().filter(|&&w| w != v && g.has_edge(v, w)).count();
        if d != 2 {
            return None;
        }
    }
    let start = verts[0];
    let mut walk = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = verts
            .iter()
            .copied()
            .find(|&w| w != cur && w != prev && g.has_edge(cur, w))?;
        if next == start {
            break;
        }
        walk.push(next);
        prev = cur;
        cur = next;
        if walk.len() > k {
            return None;
        }
    }
    (walk.len() == k).then_some(walk)
}

fn find_claw(g: &Graph) -> Option<Vec<usize>> {
    for x in 0..g.n() {
        let nb: Vec<usize> = g.nbrs(x).iter().collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if g.has_edge(nb[i], nb[j]) {
                    continue;
                }
                for &c in &nb[j + 1..] {
                    if !g.has_edge(nb[i], c) && !g.has_edge(nb[j], c) {
                        return Some(vec![x, nb[i], nb[j], c]);
                    }
                }
            }
        }
    }
    None
}

fn find_c5(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    // v1 is the smallest vertex of the cycle; v2 < v5 kills the reflection.
    for v1 in 0..n {
        let nb1: Vec<usize> = g.nbrs(v1).iter().filter(|&v| v > v1).collect();
        for (i, &v2) in nb1.iter().enumerate() {
            for &v5 in &nb1[i + 1..] {
                if g.has_edge(v2, v5) {
                    continue;
                }
                for v3 in g.nbrs(v2).iter() {
                    if v3 <= v1 || v3 == v5 || g.has_edge(v3, v1) || g.has_edge(v3, v5) {
                        continue;
                    }
                    for v4 in g.nbrs(v3).iter() {
                        if v4 <= v1 || v4 == v2 || v4 == v5 {
                            continue;
                        }
                        if g.has_edge(v4, v5) && !g.has_edge(v4, v1) && !g.has_edge(v4, v2) {
                            return Some(vec![v1, v2, v3, v4, v5]);
                        }
                    }
                }
            }
        }
    }
    None
}

fn find_diamond(g: &Graph) -> Option<Vec<usize>> {
    // Two adjacent degree-3 vertices u, v with two common nonadjacent nbrs.
    for u in 0..g.n() {
        for v in g.nbrs(u).iter() {
            if v <= u {
                continue;
            }
            let common: Vec<usize> = g.nbrs(u).intersection(g.nbrs(v)).iter().collect();
            for i in 0..common.len() {
                for j in i + 1..common.len() {
                    if !g.has_edge(common[i], common[j]) {
                        return Some(vec![u, v, common[i], common[j]]);
                    }
                }
            }
        }
    }
    None
}

/// Exactly the edges `uv` with no common neighbor (edges in no triangle).
pub fn flat_edges(g: &Graph) -> Vec<(usize, usize)> {
    g.edges()
        .into_iter()
        .filter(|&(u, v)| g.nbrs(u).intersection_len(g.nbrs(v)) == 0)
        .collect()
}

/// Result of the elementary test: either a proper 2-coloring of the edges
/// (consecutive edges `xy`, `yz` differ whenever `xz` is a non-edge), or an
/// odd cycle in the conflict graph refuting it. Edges are indexed by their
/// position in `Graph::edges()`.
#[derive(Clone, Debug, Serialize)]
pub enum ElementaryOutcome {
    Coloring(Vec<u8>),
    OddConflictCycle(Vec<usize>),
}

impl ElementaryOutcome {
    pub fn is_elementary(&self) -> bool {
        matches!(self, ElementaryOutcome::Coloring(_))
    }
}

/// Build the conflict graph on `E(g)` (edges `xy`, `yz` conflict whenever
/// `xz` is a non-edge) and 2-color it, or return an odd conflict cycle.
pub fn is_elementary(g: &Graph) -> ElementaryOutcome {
    let edges = g.edges();
    let m = edges.len();
    let mut conflict: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            let shared = if a == c || a == d {
                Some((a, if a == c { (b, d) } else { (b, c) }))
            } else if b == c || b == d {
                Some((b, if b == c { (a, d) } else { (a, c) }))
            } else {
                None
            };
            if let Some((_y, (x, z))) = shared {
                if !g.has_edge(x, z) {
                    conflict[i].push(j);
                    conflict[j].push(i);
                }
            }
        }
    }
    // BFS 2-coloring with parent tracking for the odd-cycle certificate.
    let mut color = vec![u8::MAX; m];
    let mut parent = vec![usize::MAX; m];
    for s in 0..m {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(e) = queue.pop_front() {
            for &f in &conflict[e] {
                if color[f] == u8::MAX {
                    color[f] = 1 - color[e];
                    parent[f] = e;
                    queue.push_back(f);
                } else if color[f] == color[e] {
                    return ElementaryOutcome::OddConflictCycle(odd_cycle(&parent, e, f));
                }
            }
        }
    }
    ElementaryOutcome::Coloring(color)
}

fn odd_cycle(parent: &[usize], e: usize, f: usize) -> Vec<usize> {
    let path_to_root = |mut v: usize| {
        let mut p = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            p.push(v);
        }
        p
    };
    let pe = path_to_root(e);
    let pf = path_to_root(f);
    // Trim the shared suffix down to the lowest common ancestor.
    let mut i = pe.len();
    let mut j = pf.len();
    while i > 1 && j > 1 && pe[i - 2] == pf[j - 2] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<usize> = pe[..i].to_vec();
    let mut back: Vec<usize> = pf[..j - 1].to_vec();
    back.reverse();
    cycle.extend(back);
    cycle
}

/// Verify a claimed elementary outcome against the definition, edge pair by
/// edge pair.
pub fn verify_elementary_outcome(g: &Graph, out: &ElementaryOutcome) -> Result<()> {
    let edges = g.edges();
    match out {
        ElementaryOutcome::Coloring(colors) => {
            if colors.len() != edges.len() {
                return Err(Error::Validation("coloring length mismatch".into()));
            }
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    let (a, b) = edges[i];
                    let (c, d) = edges[j];
                    let ends = [a, b, c, d];
                    let shared: Vec<usize> =
                        ends.iter().copied().filter(|&v| (v == a || v == b) && (v == c || v == d)).collect();
                    if shared.len() != 1 {
                        continue;
                    }
                    let y = shared[0];
                    let x = if a == y { b } else { a };
                    let z = if c == y { d } else { c };
                    if !g.has_edge(x, z) && colors[i] == colors[j] {
                        return Err(Error::Validation(format!(
                            "edges {i} and {j} share {y} with nonadjacent ends but same color"
                        )));
                    }
                }
            }
            Ok(())
        }
        ElementaryOutcome::OddConflictCycle(cycle) => {
            if cycle.len() % 2 == 0 || cycle.len() < 3 {
                return Err(Error::Validation("conflict cycle is not odd".into()));
            }
            for k in 0..cycle.len() {
                let i = cycle[k];
                let j = cycle[(k + 1) % cycle.len()];
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                let y = if a == c || a == d {
                    a
                } else if b == c || b == d {
                    b
                } else {
                    return Err(Error::Validation(format!(
                        "consecutive conflict-cycle edges {i}, {j} share no vertex"
                    )));
                };
                let x = if a == y { b } else { a };
                let z = if c == y { d } else { c };
                if g.has_edge(x, z) {
                    return Err(Error::Validation(format!(
                        "edges {i}, {j} do not genuinely conflict"
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Exact clique-cover cap for [`nine_clique_partition`].
pub const NINE_CLIQUE_EXACT_CAP: usize = 18;

/// Try to partition `V(g)` into at most nine cliques. Exact (backtracking on
/// the complement coloring) up to [`NINE_CLIQUE_EXACT_CAP`] vertices; beyond
/// that a greedy clique-stripping heuristic runs, and its failure is an
/// honest "unknown" rather than a negative.
pub fn nine_clique_partition(g: &Graph) -> Result<Option<Vec<crate::VertexSet>>> {
    let n = g.n();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    if n <= NINE_CLIQUE_EXACT_CAP {
        Ok(exact_clique_cover(g, 9))
    } else {
        match greedy_clique_cover(g, 9) {
            Some(parts) => Ok(Some(parts)),
            None => Err(Error::SizeCap(format!(
                "n = {n} exceeds the exact cap {NINE_CLIQUE_EXACT_CAP} and the greedy \
                 heuristic needed more than nine cliques; result unknown"
            ))),
        }
    }
}

fn exact_clique_cover(g: &Graph, max_parts: usize) -> Option<Vec<crate::VertexSet>> {
    // Clique cover of g = proper coloring of the complement.
    let comp = g.complement();
    let n = g.n();
    let mut assign = vec![usize::MAX; n];
    for k in 1..=max_parts.min(n) {
        if color_rec(&comp, &mut assign, 0, k) {
            let mut parts = vec![crate::VertexSet::new(n); k];
            for v in 0..n {
                parts[assign[v]].insert(v);
            }
            parts.retain(|p| !p.is_empty());
            for p in &parts {
                debug_assert!(g.is_clique(p));
            }
            return Some(parts);
        }
        assign.fill(usize::MAX);
    }
    None
}

fn color_rec(comp: &Graph, assign: &mut Vec<usize>, v: usize, k: usize) -> bool {
    if v == comp.n() {
        return true;
    }
    let used_bound = assign[..v].iter().filter(|&&c| c != usize::MAX).map(|&c| c + 1).max().unwrap_or(0);
    for c in 0..k.min(used_bound + 1) {
        if comp.nbrs(v).iter().take_while(|&w| w < v).all(|w| assign[w] != c) {
            assign[v] = c;
            if color_rec(comp, assign, v + 1, k) {
                return true;
            }
            assign[v] = usize::MAX;
        }
    }
    false
}

fn greedy_clique_cover(g: &Graph, max_parts: usize) -> Option<Vec<crate::VertexSet>> {
    let mut remaining = crate::VertexSet::full(g.n());
    let mut parts = Vec::new();
    while !remaining.is_empty() {
        if parts.len() == max_parts {
            return None;
        }
        // Greedily grow a clique from the lowest remaining vertex.
        let mut clique = crate::VertexSet::new(g.n());
        let seed = remaining.min_elem().unwrap();
        clique.insert(seed);
        let mut cands = g.nbrs(seed).intersection(&remaining);
        while let Some(v) = cands.min_elem() {
            clique.insert(v);
            cands.intersect_with(g.nbrs(v));
        }
        remaining.subtract(&clique);
        parts.push(clique);
    }
    Some(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, NamedGraph};

    #[test]
    fn claw_detection() {
        let claw = build_named(NamedGraph::Claw).unwrap();
        let e = find_pattern(&claw, Pattern::Claw).unwrap().unwrap();
        assert_eq!(e[0], 0); // center first
        let c4 = build_named(NamedGraph::Cycle(4)).unwrap();
        assert!(find_pattern(&c4, Pattern::Claw).unwrap().is_none());
    }

    #[test]
    fn c5_detection() {
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        let e = find_pattern(&c5, Pattern::C5).unwrap().unwrap();
        assert_eq!(e.len(), 5);
        let c6 = build_named(NamedGraph::Cycle(6)).unwrap();
        assert!(find_pattern(&c6, Pattern::C5).unwrap().is_none());
        // C7 contains no induced C5 either.
        let c7 = build_named(NamedGraph::Cycle(7)).unwrap();
        assert!(find_pattern(&c7, Pattern::C5).unwrap().is_none());
    }

    #[test]
    fn diamond_detection() {
        let mut k4e = build_named(NamedGraph::Clique(4)).unwrap();
        k4e.remove_edge(2, 3);
        let e = find_pattern(&k4e, Pattern::Diamond).unwrap().unwrap();
        assert_eq!(e.len(), 4);
        let k4 = build_named(NamedGraph::Clique(4)).unwrap();
        assert!(find_pattern(&k4, Pattern::Diamond).unwrap().is_none());
    }

    #[test]
    fn flat_edge_cases() {
        let p3 = build_named(NamedGraph::Path(3)).unwrap();
        assert_eq!(flat_edges(&p3).len(), 2);
        let k3 = build_named(NamedGraph::Clique(3)).unwrap();
        assert!(flat_edges(&k3).is_empty());
        let c4 = build_named(NamedGraph::Cycle(4)).unwrap();
        assert_eq!(flat_edges(&c4).len(), 4);
    }

    #[test]
    fn elementary_cases() {
        // A single edge is elementary.
        let k2 = build_named(NamedGraph::Clique(2)).unwrap();
        assert!(is_elementary(&k2).is_elementary());
        // P3: conflict graph is K2, 2-colorable.
        let p3 = build_named(NamedGraph::Path(3)).unwrap();
        let out = is_elementary(&p3);
        assert!(out.is_elementary());
        verify_elementary_outcome(&p3, &out).unwrap();
        if let ElementaryOutcome::Coloring(c) = out {
            assert_ne!(c[0], c[1]);
        }
        // The claw's three edges pairwise conflict: a conflict triangle.
        let claw = build_named(NamedGraph::Claw).unwrap();
        let out = is_elementary(&claw);
        assert!(!out.is_elementary());
        verify_elementary_outcome(&claw, &out).unwrap();
        if let ElementaryOutcome::OddConflictCycle(cyc) = out {
            assert_eq!(cyc.len(), 3);
        }
    }

    #[test]
    fn elementary_even_cycles() {
        for k in [4usize, 6, 8] {
            let c = build_named(NamedGraph::Cycle(k)).unwrap();
            let out = is_elementary(&c);
            assert!(out.is_elementary(), "C{k} should be elementary");
            verify_elementary_outcome(&c, &out).unwrap();
        }
        // C5's conflict graph is an odd cycle.
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        let out = is_elementary(&c5);
        assert!(!out.is_elementary());
        verify_elementary_outcome(&c5, &out).unwrap();
    }

    #[test]
    fn nine_clique_cases() {
        let k5 = build_named(NamedGraph::Clique(5)).unwrap();
        assert_eq!(nine_clique_partition(&k5).unwrap().unwrap().len(), 1);
        let edgeless10 = Graph::new(10);
        assert!(nine_clique_partition(&edgeless10).unwrap().is_none());
        let c9 = build_named(NamedGraph::Cycle(9)).unwrap();
        let parts = nine_clique_partition(&c9).unwrap().unwrap();
        assert!(parts.len() <= 9);
        assert_eq!(parts.len(), 5); // exact clique cover number of C9
        let mut covered = crate::VertexSet::new(9);
        for p in &parts {
            assert!(c9.is_clique(p));
            assert!(p.is_disjoint_from(&covered));
            covered.union_with(p);
        }
        assert_eq!(covered.len(), 9);
    }
}
