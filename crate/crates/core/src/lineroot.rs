//! Root-graph reconstruction for line graphs of multigraphs.
//!
//! Strategy: collapse classes of true twins (adjacent vertices with equal
//! closed neighborhoods) — parallel root edges appear in a line graph exactly
//! as such classes — then search for a Krausz partition of the twin-free
//! quotient: a family of cliques covering every edge exactly once with every
//! vertex in at most two cliques. Each clique becomes a root vertex, each
//! quotient vertex a root edge (with the twin-class size as multiplicity),
//! and the result is verified by rebuilding the line graph vertex-for-vertex.

use crate::graph::{line_graph, Graph, Multigraph};
use crate::Result;

/// True-twin classes (u ~ v iff adjacent with N[u] = N[v]), each a clique,
/// ordered by smallest member.
pub fn twin_classes(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let mut closed_v = g.nbrs(v).clone();
        closed_v.insert(v);
        let mut class = vec![v];
        for w in g.nbrs(v).iter() {
            if w < v || class_of[w] != usize::MAX {
                continue;
            }
            let mut closed_w = g.nbrs(w).clone();
            closed_w.insert(w);
            if closed_w == closed_v {
                class.push(w);
            }
        }
        let id = classes.len();
        for &u in &class {
            class_of[u] = id;
        }
        classes.push(class);
    }
    classes
}

struct KrauszSearch<'a> {
    g: &'a Graph,
    edges: Vec<(usize, usize)>,
    /// cell index -> member vertices
    cells: Vec<Vec<usize>>,
    /// vertex -> cells containing it (at most two)
    vertex_cells: Vec<Vec<usize>>,
    covered: Vec<bool>,
    edge_id: std::collections::HashMap<(usize, usize), usize>,
}

impl<'a> KrauszSearch<'a> {
    fn new(g: &'a Graph) -> Self {
        let edges = g.edges();
        let edge_id = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        KrauszSearch {
            g,
            covered: vec![false; edges.len()],
            edges,
            cells: Vec::new(),
            vertex_cells: vec![Vec::new(); g.n()],
            edge_id,
        }
    }

    fn eid(&self, u: usize, v: usize) -> usize {
        self.edge_id[&(u.min(v), u.max(v))]
    }

    /// Can `v` join cell `c`? All members adjacent to `v`, the joining edges
    /// still uncovered, `v` has cell capacity left, and no other cell of `v`
    /// shares a vertex with `c`.
    fn can_join(&self, v: usize, c: usize) -> bool {
        if self.vertex_cells[v].len() >= 2 || self.vertex_cells[v].contains(&c) {
            return false;
        }
        for &m in &self.cells[c] {
            if !self.g.has_edge(v, m) || self.covered[self.eid(v, m)] {
                return false;
            }
        }
        for &other in &self.vertex_cells[v] {
            if self.cells[other].iter().any(|m| self.cells[c].contains(m)) {
                return false;
            }
        }
        true
    }

    fn join(&mut self, v: usize, c: usize) {
        for i in 0..self.cells[c].len() {
            let m = self.cells[c][i];
            let id = self.eid(v, m);
            self.covered[id] = true;
        }
        self.cells[c].push(v);
        self.vertex_cells[v].push(c);
    }

    fn unjoin(&mut self, v: usize, c: usize) {
        self.cells[c].pop();
        self.vertex_cells[v].pop();
        for i in 0..self.cells[c].len() {
            let m = self.cells[c][i];
            let id = self.eid(v, m);
            self.covered[id] = false;
        }
    }

    /// Enumerate complete Krausz partitions; `accept` returns true to stop.
    fn search(&mut self, accept: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
        let next = (0..self.edges.len()).find(|&i| !self.covered[i]);
        let Some(next) = next else {
            return accept(&self.cells);
        };
        let (u, v) = self.edges[next];
        // Extend an existing cell of u with v, or of v with u.
        for (a, b) in [(u, v), (v, u)] {
            for ci in 0..self.vertex_cells[a].len() {
                let c = self.vertex_cells[a][ci];
                if self.can_join(b, c) {
                    self.join(b, c);
                    if self.search(accept) {
                        return true;
                    }
                    self.unjoin(b, c);
                }
            }
        }
        // Open a fresh cell {u, v}.
        if self.vertex_cells[u].len() < 2 && self.vertex_cells[v].len() < 2 {
            let c = self.cells.len();
            self.cells.push(vec![u]);
            self.vertex_cells[u].push(c);
            self.join(v, c);
            if self.search(accept) {
                return true;
            }
            self.unjoin(v, c);
            self.cells.pop();
            self.vertex_cells[u].pop();
        }
        false
    }
}

/// Build the root multigraph from a Krausz partition of the twin-free
/// quotient. Root edge `i` corresponds to vertex `i` of the original graph.
fn root_from_partition(
    g_n: usize,
    classes: &[Vec<usize>],
    cells: &[Vec<usize>],
    quotient_n: usize,
) -> Multigraph {
    let mut q_cells: Vec<Vec<usize>> = vec![Vec::new(); quotient_n];
    for (ci, cell) in cells.iter().enumerate() {
        for &v in cell {
            q_cells[v].push(ci);
        }
    }
    let mut next_vertex = cells.len();
    let mut endpoints: Vec<(usize, usize)> = Vec::with_capacity(quotient_n);
    for v in 0..quotient_n {
        let e = match q_cells[v].as_slice() {
            [a, b] => (*a, *b),
            [a] => {
                let p = next_vertex;
                next_vertex += 1;
                (*a, p)
            }
            [] => {
                let p = next_vertex;
                next_vertex += 2;
                (p, p + 1)
            }
            _ => unreachable!("vertex in more than two cells"),
        };
        endpoints.push(e);
    }
    let mut h = Multigraph::new(next_vertex);
    // One parallel copy per original vertex, in original vertex order.
    let mut class_of = vec![usize::MAX; g_n];
    for (qi, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = qi;
        }
    }
    for gv in 0..g_n {
        let (a, b) = endpoints[class_of[gv]];
        h.add_edge(a, b).expect("root edge in range");
    }
    h
}

/// Reconstruct a multigraph `h` with `line_graph(h)` equal to `g` under the
/// identity correspondence (root edge `i` is vertex `i` of `g`), or `None`
/// if no such multigraph exists. With `bipartite_required`, only bipartite
/// roots are accepted and the Krausz enumeration continues until one is found.
pub fn reconstruct_line_root(g: &Graph, bipartite_required: bool) -> Result<Option<Multigraph>> {
    if g.n() == 0 {
        return Ok(Some(Multigraph::new(0)));
    }
    let classes = twin_classes(g);
    let qn = classes.len();
    let mut q = Graph::new(qn);
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    for i in 0..qn {
        for j in i + 1..qn {
            if g.has_edge(reps[i], reps[j]) {
                q.add_edge(i, j);
            }
        }
    }
    // The quotient must see classes uniformly; true twins guarantee it.
    let mut search = KrauszSearch::new(&q);
    let mut found: Option<Multigraph> = None;
    let g_n = g.n();
    search.search(&mut |cells| {
        let h = root_from_partition(g_n, &classes, cells, qn);
        if bipartite_required && !h.is_bipartite() {
            return false;
        }
        found = Some(h);
        true
    });
    let Some(h) = found else { return Ok(None) };
    // Re-expansion check: the line graph of the root must be g exactly.
    let back = line_graph(&h)?;
    if back != *g {
        return Err(crate::Error::Invariant(
            "reconstructed root does not re-expand to the input graph".into(),
        ));
    }
    Ok(Some(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, NamedGraph};

    #[test]
    fn p3_root_is_p4() {
        let p3 = build_named(NamedGraph::Path(3)).unwrap();
        let h = reconstruct_line_root(&p3, true).unwrap().expect("P3 is a line graph");
        assert_eq!(h.edge_count(), 3);
        assert!(h.is_bipartite());
        assert_eq!(line_graph(&h).unwrap(), p3);
    }

    #[test]
    fn k3_has_both_roots() {
        let k3 = build_named(NamedGraph::Clique(3)).unwrap();
        let any = reconstruct_line_root(&k3, false).unwrap().expect("K3 is a line graph");
        assert_eq!(line_graph(&any).unwrap(), k3);
        // With the bipartite requirement the claw (or a multi-edge) root is found.
        let bip = reconstruct_line_root(&k3, true).unwrap().expect("K3 has a bipartite root");
        assert!(bip.is_bipartite());
        assert_eq!(line_graph(&bip).unwrap(), k3);
    }

    #[test]
    fn claw_is_not_a_line_graph() {
        let claw = build_named(NamedGraph::Claw).unwrap();
        assert!(reconstruct_line_root(&claw, false).unwrap().is_none());
    }

    #[test]
    fn cycles_are_their_own_roots() {
        for k in [4usize, 5, 6, 8] {
            let c = build_named(NamedGraph::Cycle(k)).unwrap();
            let h = reconstruct_line_root(&c, false).unwrap().expect("cycle");
            assert_eq!(h.edge_count(), k);
            assert_eq!(line_graph(&h).unwrap(), c);
            if k % 2 == 0 {
                let hb = reconstruct_line_root(&c, true).unwrap().expect("even cycle");
                assert!(hb.is_bipartite());
            } else {
                // Odd cycles of length >= 5 have a unique root, the cycle itself.
                assert!(reconstruct_line_root(&c, true).unwrap().is_none());
            }
        }
    }

    #[test]
    fn multi_edge_roots_via_twins() {
        // K2 = line graph of a double edge (or of P3); both are bipartite.
        let k2 = build_named(NamedGraph::Clique(2)).unwrap();
        let h = reconstruct_line_root(&k2, true).unwrap().unwrap();
        assert_eq!(line_graph(&h).unwrap(), k2);
        // K4 collapses to a single twin class; the root is a parallel bundle.
        let k4 = build_named(NamedGraph::Clique(4)).unwrap();
        let h = reconstruct_line_root(&k4, false).unwrap().expect("K4 roots as a multi-edge");
        assert_eq!(line_graph(&h).unwrap(), k4);
        // Diamond = L(triangle with a pendant edge), and also has a root with
        // a doubled edge; either way it re-expands.
        let mut diamond = build_named(NamedGraph::Clique(4)).unwrap();
        diamond.remove_edge(2, 3);
        let h = reconstruct_line_root(&diamond, false).unwrap().expect("diamond");
        assert_eq!(line_graph(&h).unwrap(), diamond);
    }

    #[test]
    fn edgeless_roots_as_matchings() {
        let g = Graph::new(4);
        let h = reconstruct_line_root(&g, true).unwrap().unwrap();
        assert_eq!(h.edge_count(), 4);
        assert_eq!(line_graph(&h).unwrap(), g);
    }
}
