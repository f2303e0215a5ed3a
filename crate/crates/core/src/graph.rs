//! Core graph and multigraph types, named-graph constructors, components,
//! modules and quotients, and the large-component-or-split primitive.

use crate::bits::VertexSet;
use crate::measure::{rat_string, Measure, Rat};
use crate::{Error, Result};
use serde::Serialize;

/// A simple undirected graph on dense vertex indices `0..n`.
///
/// Adjacency is symmetric and irreflexive by construction; `add_edge` is
/// idempotent and rejects self-loops.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: (0..n).map(|_| VertexSet::new(n)).collect(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].remove(v);
        self.adj[v].remove(u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].contains(v)
    }

    /// Open neighborhood of `v` as a set.
    pub fn nbrs(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Open neighborhood of a set: vertices outside `s` adjacent to `s`.
    pub fn nbrs_of_set(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n);
        for v in s.iter() {
            out.union_with(&self.adj[v]);
        }
        out.subtract(s);
        out
    }

    /// Closed neighborhood `s ∪ N(s)`.
    pub fn closed_nbrs_of_set(&self, s: &VertexSet) -> VertexSet {
        let mut out = self.nbrs_of_set(s);
        out.union_with(s);
        out
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Induced subgraph on `keep`, plus the map new index -> old index
    /// (ascending, so relabeling is order-preserving and deterministic).
    pub fn induced(&self, keep: &VertexSet) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = keep.iter().collect();
        let mut inv = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            inv[v] = i;
        }
        let mut g = Graph::new(map.len());
        for (i, &v) in map.iter().enumerate() {
            for w in self.adj[v].iter() {
                if w > v && keep.contains(w) {
                    g.add_edge(i, inv[w]);
                }
            }
        }
        (g, map)
    }

    /// Connected components of `G[within]`, ordered by their smallest vertex.
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new(self.n);
        let mut out = Vec::new();
        for start in within.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::new(self.n);
            let mut stack = vec![start];
            seen.insert(start);
            comp.insert(start);
            while let Some(v) = stack.pop() {
                for w in self.adj[v].iter() {
                    if within.contains(w) && !seen.contains(w) {
                        seen.insert(w);
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&VertexSet::full(self.n))
    }

    pub fn is_connected_within(&self, within: &VertexSet) -> bool {
        let k = within.len();
        if k == 0 {
            return false;
        }
        self.components_within(within)[0].len() == k
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.is_connected_within(&VertexSet::full(self.n))
    }

    /// True when `s` induces a complete subgraph.
    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let vs = s.to_vec();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_independent(&self, s: &VertexSet) -> bool {
        s.iter().all(|u| self.adj[u].is_disjoint_from(s))
    }

    /// Number of edges with both endpoints in `s`.
    pub fn edges_within(&self, s: &VertexSet) -> usize {
        s.iter().map(|u| self.adj[u].intersection_len(s)).sum::<usize>() / 2
    }

    /// True when no edge joins `p` and `q` (sets assumed disjoint).
    pub fn is_anti_adjacent(&self, p: &VertexSet, q: &VertexSet) -> bool {
        p.iter().all(|u| self.adj[u].is_disjoint_from(q))
    }

    /// True when every `p`-`q` pair is an edge (sets assumed disjoint).
    pub fn is_fully_adjacent(&self, p: &VertexSet, q: &VertexSet) -> bool {
        let qn = q.len();
        p.iter().all(|u| self.adj[u].intersection_len(q) == qn)
    }

    /// BFS shortest path from any vertex of `from` to any vertex of `to`,
    /// moving only through `allowed` for intermediate vertices. Endpoints need
    /// not lie in `allowed`. Lowest-index expansion order, so the result is
    /// deterministic. Returns the full vertex path.
    pub fn shortest_path_between_sets(
        &self,
        from: &VertexSet,
        to: &VertexSet,
        allowed: &VertexSet,
    ) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n];
        let mut seen = VertexSet::new(self.n);
        let mut queue = std::collections::VecDeque::new();
        for v in from.iter() {
            seen.insert(v);
            queue.push_back(v);
            if to.contains(v) {
                return Some(vec![v]);
            }
        }
        while let Some(v) = queue.pop_front() {
            for w in self.adj[v].iter() {
                if seen.contains(w) {
                    continue;
                }
                if to.contains(w) {
                    let mut path = vec![w, v];
                    let mut cur = v;
                    while prev[cur] != usize::MAX {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if allowed.contains(w) {
                    seen.insert(w);
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// A multigraph: parallel edges allowed, self-loops not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut h = Multigraph::new(n);
        for &(u, v) in edges {
            h.add_edge(u, v)?;
        }
        Ok(h)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Parameter(format!("edge ({u},{v}) out of range")));
        }
        if u == v {
            return Err(Error::Parameter("self-loops are not allowed".into()));
        }
        self.edges.push((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge list with multiplicity; index order is the line-graph vertex order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for s in 0..self.n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        stack.push(w);
                    } else if color[w] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Line graph: one vertex per edge of `h` (multi-edges give distinct
/// vertices), adjacent iff the edges share an endpoint.
pub fn line_graph(h: &Multigraph) -> Result<Graph> {
    let m = h.edge_count();
    if m == 0 {
        return Err(Error::Precondition("line graph of an edgeless multigraph".into()));
    }
    let mut g = Graph::new(m);
    let es = h.edges();
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = es[i];
            let (c, d) = es[j];
            if a == c || a == d || b == c || b == d {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Named-graph constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NamedGraph {
    /// `k`-vertex path, `k >= 1`.
    Path(usize),
    /// `k`-vertex cycle, `k >= 3`.
    Cycle(usize),
    /// Complete graph on `k >= 1` vertices.
    Clique(usize),
    /// The star on four vertices.
    Claw,
    /// `k`-hook: a `(k+3)`-vertex path `v1..v_{k+3}` plus the pendant edge
    /// `v_{k+1} v_{k+4}`; the active vertex is `v1` (index 0).
    Hook(usize),
    /// Double `k`-hook: a `(k+6)`-vertex path `v1..v_{k+6}` plus pendant
    /// edges `v3 v_{k+7}` and `v_{k+4} v_{k+8}`.
    DoubleHook(usize),
}

/// Build a named graph with the standard vertex ordering. Hooks carry their
/// active vertex at index 0 (for the 0-hook this is an interior vertex of the
/// resulting four-vertex path; the two interior choices are isomorphic).
pub fn build_named(kind: NamedGraph) -> Result<Graph> {
    match kind {
        NamedGraph::Path(k) => {
            if k < 1 {
                return Err(Error::Parameter("path needs k >= 1".into()));
            }
            let mut g = Graph::new(k);
            for i in 0..k.saturating_sub(1) {
                g.add_edge(i, i + 1);
            }
            Ok(g)
        }
        NamedGraph::Cycle(k) => {
            if k < 3 {
                return Err(Error::Parameter("cycle needs k >= 3".into()));
            }
            let mut g = Graph::new(k);
            for i in 0..k {
                g.add_edge(i, (i + 1) % k);
            }
            Ok(g)
        }
        NamedGraph::Clique(k) => {
            if k < 1 {
                return Err(Error::Parameter("clique needs k >= 1".into()));
            }
            let mut g = Graph::new(k);
            for u in 0..k {
                for v in u + 1..k {
                    g.add_edge(u, v);
                }
            }
            Ok(g)
        }
        NamedGraph::Claw => {
            let mut g = Graph::new(4);
            g.add_edge(0, 1);
            g.add_edge(0, 2);
            g.add_edge(0, 3);
            Ok(g)
        }
        NamedGraph::Hook(k) => {
            let mut g = Graph::new(k + 4);
            for i in 0..k + 2 {
                g.add_edge(i, i + 1);
            }
            g.add_edge(k, k + 3);
            Ok(g)
        }
        NamedGraph::DoubleHook(k) => {
            let mut g = Graph::new(k + 8);
            for i in 0..k + 5 {
                g.add_edge(i, i + 1);
            }
            g.add_edge(2, k + 6);
            g.add_edge(k + 3, k + 7);
            Ok(g)
        }
    }
}

/// The active vertex index of `build_named(Hook(k))`.
pub const HOOK_ACTIVE: usize = 0;

/// A partition of a host set into nonempty, pairwise disjoint parts, each a
/// module of the induced subgraph on the host set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePartition {
    pub host: VertexSet,
    pub parts: Vec<VertexSet>,
}

impl ModulePartition {
    pub fn singletons(host: &VertexSet) -> Self {
        ModulePartition {
            host: host.clone(),
            parts: host.iter().map(|v| VertexSet::from_iter(host.capacity(), [v])).collect(),
        }
    }

    /// Check disjointness, coverage, nonemptiness, and that each part is a
    /// module of `G[host]` (all members see the same host-neighbors outside
    /// the part).
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut seen = VertexSet::new(self.host.capacity());
        for (i, part) in self.parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::Validation(format!("part {i} is empty")));
            }
            if !part.is_disjoint_from(&seen) {
                return Err(Error::Validation(format!("part {i} overlaps an earlier part")));
            }
            if !part.is_subset_of(&self.host) {
                return Err(Error::Validation(format!("part {i} leaves the host set")));
            }
            seen.union_with(part);
        }
        if seen != self.host {
            return Err(Error::Validation("parts do not cover the host set".into()));
        }
        for (i, part) in self.parts.iter().enumerate() {
            let mut sig: Option<VertexSet> = None;
            for v in part.iter() {
                let mut outside = g.nbrs(v).intersection(&self.host);
                outside.subtract(part);
                match &sig {
                    None => sig = Some(outside),
                    Some(s) if *s == outside => {}
                    Some(_) => {
                        return Err(Error::Validation(format!(
                            "part {i} is not a module: vertex {v} differs"
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

/// Quotient graph of a module partition: one vertex per part, adjacent iff
/// the parts are fully adjacent. Validates modules and that adjacency between
/// any two parts is all-or-nothing, and self-checks isomorphism against the
/// representative-induced subgraph.
pub fn quotient(g: &Graph, parts: &ModulePartition) -> Result<Graph> {
    parts.validate(g)?;
    let r = parts.parts.len();
    let mut q = Graph::new(r);
    for i in 0..r {
        for j in i + 1..r {
            let full = g.is_fully_adjacent(&parts.parts[i], &parts.parts[j]);
            let anti = g.is_anti_adjacent(&parts.parts[i], &parts.parts[j]);
            match (full, anti) {
                (true, false) => q.add_edge(i, j),
                (false, true) => {}
                _ => {
                    return Err(Error::Validation(format!(
                        "mixed adjacency between parts {i} and {j}"
                    )))
                }
            }
        }
    }
    // One representative per part must induce exactly the quotient.
    let reps: Vec<usize> = parts.parts.iter().map(|p| p.min_elem().unwrap()).collect();
    for i in 0..r {
        for j in i + 1..r {
            if q.has_edge(i, j) != g.has_edge(reps[i], reps[j]) {
                return Err(Error::Invariant(format!(
                    "quotient disagrees with representatives {} and {}",
                    reps[i], reps[j]
                )));
            }
        }
    }
    Ok(q)
}

/// Outcome of the large-component-or-split primitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitOutcome {
    /// `(p, rest)` is an anti-adjacent pair inside the queried set with
    /// `mu(p), mu(rest) > delta`.
    AntiPair(VertexSet, VertexSet),
    /// A component of the induced subgraph with `mu >= mu(x) - delta`.
    BigComponent(VertexSet),
}

/// Either split `x` into an anti-adjacent pair of mass `> delta` each, or
/// certify a single component carrying almost all of `x`'s mass.
///
/// Deterministic: components are scanned in ascending order of their smallest
/// vertex, both for the maximal component (ties to the earlier one) and for
/// the greedy accumulation.
pub fn largest_component_or_split(
    g: &Graph,
    mu: &Measure,
    x: &VertexSet,
    delta: Rat,
) -> Result<SplitOutcome> {
    let mx = mu.mass(x);
    let three_delta = delta * Rat::from_integer(3);
    if mx <= three_delta {
        return Err(Error::Precondition(format!(
            "mu(x) = {} is not greater than 3*delta = {}",
            rat_string(&mx),
            rat_string(&three_delta)
        )));
    }
    let comps = g.components_within(x);
    let mut best = 0;
    let mut best_mass = mu.mass(&comps[0]);
    for (i, c) in comps.iter().enumerate().skip(1) {
        let m = mu.mass(c);
        if m > best_mass {
            best = i;
            best_mass = m;
        }
    }
    if best_mass >= mx - delta {
        return Ok(SplitOutcome::BigComponent(comps[best].clone()));
    }
    if best_mass > delta {
        let p = comps[best].clone();
        let rest = x.difference(&p);
        return Ok(SplitOutcome::AntiPair(p, rest));
    }
    // All components have mass <= delta: accumulate until the pile exceeds it.
    let mut p = VertexSet::new(x.capacity());
    let mut acc = Rat::from_integer(0);
    for c in &comps {
        p.union_with(c);
        acc += mu.mass(c);
        if acc > delta {
            break;
        }
    }
    debug_assert!(acc > delta && acc <= delta * Rat::from_integer(2));
    let rest = x.difference(&p);
    Ok(SplitOutcome::AntiPair(p, rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::rat;

    #[test]
    fn named_graph_shapes() {
        let h0 = build_named(NamedGraph::Hook(0)).unwrap();
        assert_eq!(h0.n(), 4);
        assert_eq!(h0.edge_count(), 3);
        // P4 in path order 3-0-1-2; the active vertex 0 is interior.
        assert_eq!(h0.degree(HOOK_ACTIVE), 2);
        let degs: Vec<usize> = (0..4).map(|v| h0.degree(v)).collect();
        assert_eq!(degs.iter().filter(|&&d| d == 1).count(), 2);

        let dh1 = build_named(NamedGraph::DoubleHook(1)).unwrap();
        assert_eq!(dh1.n(), 9);
        assert_eq!(dh1.edge_count(), 8);
        assert!(dh1.is_connected()); // 9 vertices, 8 edges, connected => tree

        let claw = build_named(NamedGraph::Claw).unwrap();
        assert_eq!(claw.n(), 4);
        assert_eq!(claw.edge_count(), 3);
        assert_eq!((0..4).filter(|&v| claw.degree(v) == 3).count(), 1);

        assert!(build_named(NamedGraph::Path(0)).is_err());
        assert!(build_named(NamedGraph::Cycle(2)).is_err());
    }

    #[test]
    fn hooks_are_trees() {
        for k in 0..6 {
            let h = build_named(NamedGraph::Hook(k)).unwrap();
            assert_eq!(h.edge_count(), h.n() - 1);
            assert!(h.is_connected());
            let d = build_named(NamedGraph::DoubleHook(k)).unwrap();
            assert_eq!(d.n(), k + 8);
            assert_eq!(d.edge_count(), d.n() - 1);
            assert!(d.is_connected());
        }
    }

    #[test]
    fn line_graph_small_cases() {
        // Path P4 as a multigraph has line graph P3.
        let p4 = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let l = line_graph(&p4).unwrap();
        assert_eq!(l.n(), 3);
        assert_eq!(l.edges(), vec![(0, 1), (1, 2)]);
        // Triangle maps to a triangle.
        let k3 = Multigraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let l = line_graph(&k3).unwrap();
        assert_eq!(l.edge_count(), 3);
        // Both copies of a double edge share both endpoints: line graph K2.
        let dbl = Multigraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let l = line_graph(&dbl).unwrap();
        assert_eq!(l.n(), 2);
        assert!(l.has_edge(0, 1));
        assert!(line_graph(&Multigraph::new(3)).is_err());
    }

    #[test]
    fn complement_involution() {
        let g = build_named(NamedGraph::Cycle(6)).unwrap();
        assert_eq!(g.complement().complement(), g);
    }

    #[test]
    fn split_single_component() {
        let g = build_named(NamedGraph::Path(5)).unwrap();
        let mu = Measure::uniform(5);
        let x = VertexSet::full(5);
        match largest_component_or_split(&g, &mu, &x, rat(1, 5)).unwrap() {
            SplitOutcome::BigComponent(c) => assert_eq!(c.len(), 5),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn split_two_halves() {
        // Two components, mass 1/2 each, delta = 1/10.
        let mut g = Graph::new(6);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(3, 4);
        g.add_edge(4, 5);
        let mu = Measure::uniform(6);
        let x = VertexSet::full(6);
        match largest_component_or_split(&g, &mu, &x, rat(1, 10)).unwrap() {
            SplitOutcome::AntiPair(p, q) => {
                assert!(g.is_anti_adjacent(&p, &q));
                assert_eq!(mu.mass(&p), rat(1, 2));
                assert_eq!(mu.mass(&q), rat(1, 2));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn split_rejects_small_mass() {
        let g = Graph::new(4);
        let mu = Measure::uniform(4);
        let x = VertexSet::from_iter(4, [0]);
        assert!(largest_component_or_split(&g, &mu, &x, rat(1, 10)).is_err());
    }

    #[test]
    fn quotient_singletons_identity() {
        let g = build_named(NamedGraph::Cycle(6)).unwrap();
        let parts = ModulePartition::singletons(&VertexSet::full(6));
        let q = quotient(&g, &parts).unwrap();
        assert_eq!(q, g);
    }

    #[test]
    fn quotient_rejects_non_modules() {
        // In C6, {v0, v3} is not a module.
        let g = build_named(NamedGraph::Cycle(6)).unwrap();
        let host = VertexSet::full(6);
        let mut parts = vec![VertexSet::from_iter(6, [0, 3])];
        for v in [1, 2, 4, 5] {
            parts.push(VertexSet::from_iter(6, [v]));
        }
        let mp = ModulePartition { host, parts };
        assert!(quotient(&g, &mp).is_err());
    }

    #[test]
    fn quotient_whole_set_is_k1() {
        let g = build_named(NamedGraph::Clique(4)).unwrap();
        let host = VertexSet::full(4);
        let mp = ModulePartition { host: host.clone(), parts: vec![host] };
        let q = quotient(&g, &mp).unwrap();
        assert_eq!(q.n(), 1);
    }
}
