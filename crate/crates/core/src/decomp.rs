//! Clique-separator tree decompositions and the central-bag argument.

use crate::bits::VertexSet;
use crate::graph::{largest_component_or_split, Graph, SplitOutcome};
use crate::measure::{rat, rat_string, Measure, Rat};
use crate::{Error, Result};
use serde::Serialize;

/// A tree decomposition: a tree on `bags.len()` nodes with one vertex bag per
/// node.
#[derive(Clone, Debug, Serialize)]
pub struct TreeDecomposition {
    /// Tree edges between node ids.
    pub tree_edges: Vec<(usize, usize)>,
    pub bags: Vec<VertexSet>,
}

impl TreeDecomposition {
    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    fn tree_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Check the three axioms: bags cover V, every edge lies inside some bag,
    /// and each vertex's bag set induces a connected subtree. Also checks that
    /// the tree really is a tree.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let t = self.node_count();
        if t == 0 {
            return if g.n() == 0 {
                Ok(())
            } else {
                Err(Error::Validation("no bags for a nonempty graph".into()))
            };
        }
        if self.tree_edges.len() != t - 1 {
            return Err(Error::Validation(format!(
                "{} tree edges on {t} nodes is not a tree",
                self.tree_edges.len()
            )));
        }
        let adj = self.tree_adj();
        let mut seen = vec![false; t];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != t {
            return Err(Error::Validation("decomposition tree is disconnected".into()));
        }
        let mut cover = VertexSet::new(g.n());
        for b in &self.bags {
            cover.union_with(b);
        }
        if cover != VertexSet::full(g.n()) {
            return Err(Error::Validation("bags do not cover the vertex set".into()));
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
                return Err(Error::Validation(format!("edge ({u},{v}) is in no bag")));
            }
        }
        for v in 0..g.n() {
            let holding: Vec<usize> =
                (0..t).filter(|&i| self.bags[i].contains(v)).collect();
            if holding.is_empty() {
                return Err(Error::Validation(format!("vertex {v} is in no bag")));
            }
            let inset: std::collections::HashSet<usize> = holding.iter().copied().collect();
            let mut seen = std::collections::HashSet::from([holding[0]]);
            let mut stack = vec![holding[0]];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if inset.contains(&y) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != holding.len() {
                return Err(Error::Validation(format!(
                    "bag set of vertex {v} is not connected in the tree"
                )));
            }
        }
        Ok(())
    }
}

/// Find a minimum-size clique separator of `G[within]`, or `None` when the
/// induced subgraph has no clique separator. Candidate cliques are
/// enumerated by size, then lexicographically, so the result is
/// deterministic. Exponential only in the separator size.
pub fn min_clique_separator(g: &Graph, within: &VertexSet) -> Option<VertexSet> {
    let verts: Vec<usize> = within.iter().collect();
    let k = verts.len();
    if k < 2 {
        return None;
    }
    for size in 0..k.saturating_sub(1) {
        let mut chosen: Vec<usize> = Vec::with_capacity(size);
        if let Some(sep) = clique_sep_rec(g, within, &verts, size, 0, &mut chosen) {
            return Some(sep);
        }
    }
    None
}

fn clique_sep_rec(
    g: &Graph,
    within: &VertexSet,
    verts: &[usize],
    size: usize,
    from: usize,
    chosen: &mut Vec<usize>,
) -> Option<VertexSet> {
    if chosen.len() == size {
        let sep = VertexSet::from_iter(within.capacity(), chosen.iter().copied());
        let rest = within.difference(&sep);
        let comps = g.components_within(&rest);
        if comps.len() >= 2 {
            return Some(sep);
        }
        return None;
    }
    for i in from..verts.len() {
        let v = verts[i];
        if chosen.iter().all(|&u| g.has_edge(u, v)) {
            chosen.push(v);
            if let Some(sep) = clique_sep_rec(g, within, verts, size, i + 1, chosen) {
                return Some(sep);
            }
            chosen.pop();
        }
    }
    None
}

/// Recursive clique-separator decomposition of a connected graph: every bag
/// induces a subgraph without clique separators. Disconnected graphs are
/// decomposed per component and the trees joined by arbitrary (lowest-id)
/// links, which keeps all three axioms intact because component bags share
/// no vertices.
pub fn clique_separator_decomposition(g: &Graph) -> Result<TreeDecomposition> {
    if g.n() == 0 {
        return Ok(TreeDecomposition { tree_edges: vec![], bags: vec![] });
    }
    let comps = g.components();
    let mut bags: Vec<VertexSet> = Vec::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    let mut first_of_comp: Vec<usize> = Vec::new();
    for comp in &comps {
        let offset = bags.len();
        first_of_comp.push(offset);
        decompose_connected(g, comp, &mut bags, &mut tree_edges)?;
    }
    for w in first_of_comp.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    let td = TreeDecomposition { tree_edges, bags };
    td.validate(g)?;
    Ok(td)
}

/// Decompose `G[within]` (connected), appending bags and tree edges; returns
/// the id of one bag containing each vertex subset is not needed beyond the
/// gluing step, which searches bags directly.
fn decompose_connected(
    g: &Graph,
    within: &VertexSet,
    bags: &mut Vec<VertexSet>,
    tree_edges: &mut Vec<(usize, usize)>,
) -> Result<()> {
    let Some(sep) = min_clique_separator(g, within) else {
        bags.push(within.clone());
        return Ok(());
    };
    let rest = within.difference(&sep);
    let comps = g.components_within(&rest);
    // Minimality gives a component whose neighborhood is the whole separator.
    let a = comps
        .iter()
        .find(|c| g.nbrs_of_set(c).intersection(within) == sep)
        .ok_or_else(|| {
            Error::Invariant("no component sees the whole minimum clique separator".into())
        })?;
    let g1 = a.union(&sep);
    let g2 = within.difference(a);
    let start1 = bags.len();
    decompose_connected(g, &g1, bags, tree_edges)?;
    let start2 = bags.len();
    decompose_connected(g, &g2, bags, tree_edges)?;
    let t1 = (start1..start2)
        .find(|&i| sep.is_subset_of(&bags[i]))
        .ok_or_else(|| Error::Invariant("separator missing from first side's bags".into()))?;
    let t2 = (start2..bags.len())
        .find(|&i| sep.is_subset_of(&bags[i]))
        .ok_or_else(|| Error::Invariant("separator missing from second side's bags".into()))?;
    tree_edges.push((t1, t2));
    Ok(())
}

/// Exhaustively confirm that `G[bag]` has no clique separator. Intended for
/// desk-scale verification of produced decompositions.
pub fn bag_has_no_clique_separator(g: &Graph, bag: &VertexSet) -> bool {
    min_clique_separator(g, bag).is_none()
}

/// Outcome of the central-bag argument.
#[derive(Clone, Debug, Serialize)]
pub enum CentralBagOutcome {
    /// Anti-adjacent pair with both masses above delta.
    AntiPair(VertexSet, VertexSet),
    /// A bag of mass at least 1/2 - delta (node id, bag).
    Bag(usize, VertexSet),
}

/// Orient every tree edge toward the heavier side (ties toward the higher
/// node id) and inspect a sink node. Either its bag carries mass at least
/// `1/2 - delta`, or splitting the rest yields an anti-adjacent pair; the
/// big-component branch of the split is impossible here and raises an
/// invariant error.
pub fn central_bag(
    g: &Graph,
    mu: &Measure,
    td: &TreeDecomposition,
    delta: Rat,
) -> Result<CentralBagOutcome> {
    if delta <= rat(0, 1) || delta > rat(1, 4) {
        return Err(Error::Parameter(format!(
            "delta = {} outside (0, 1/4]",
            rat_string(&delta)
        )));
    }
    td.validate(g)?;
    let t = td.node_count();
    if t == 0 {
        return Err(Error::Precondition("empty decomposition".into()));
    }
    let adj = td.tree_adj();
    // Mass of the union of bags on each side of every edge, by rooted scans.
    // side_mass(a, b) = mass of bags in the component of T - ab containing b.
    let mut out_deg = vec![0usize; t];
    for &(a, b) in &td.tree_edges {
        let a_side = side_union_mass(td, &adj, mu, b, a);
        let b_side = side_union_mass(td, &adj, mu, a, b);
        // Orient toward the heavier side; ties toward the higher node id.
        let toward_b = a_side < b_side || (a_side == b_side && b > a);
        if toward_b {
            out_deg[a] += 1;
        } else {
            out_deg[b] += 1;
        }
    }
    let sink = (0..t)
        .find(|&i| out_deg[i] == 0)
        .ok_or_else(|| Error::Invariant("orientation of a tree has no sink".into()))?;
    // Every component of G - bag(sink) lies in one adjacent subtree, each of
    // mass at most 1/2.
    for &nb in &adj[sink] {
        let m = side_union_mass(td, &adj, mu, sink, nb);
        if m > rat(1, 2) {
            return Err(Error::Invariant(format!(
                "subtree at sink has mass {} > 1/2",
                rat_string(&m)
            )));
        }
    }
    let bag = &td.bags[sink];
    let half_minus = rat(1, 2) - delta;
    if mu.mass(bag) >= half_minus {
        return Ok(CentralBagOutcome::Bag(sink, bag.clone()));
    }
    let outside = bag.complement();
    match largest_component_or_split(g, mu, &outside, delta)? {
        SplitOutcome::AntiPair(p, q) => Ok(CentralBagOutcome::AntiPair(p, q)),
        SplitOutcome::BigComponent(c) => Err(Error::Invariant(format!(
            "component of mass {} outside a light central bag",
            rat_string(&mu.mass(&c))
        ))),
    }
}

/// Mass of the union of bags in the subtree of `T - {from-to}` on the `to`
/// side.
fn side_union_mass(
    td: &TreeDecomposition,
    adj: &[Vec<usize>],
    mu: &Measure,
    from: usize,
    to: usize,
) -> Rat {
    let mut nodes = vec![to];
    let mut seen = vec![false; td.node_count()];
    seen[from] = true;
    seen[to] = true;
    let mut union = td.bags[to].clone();
    while let Some(x) = nodes.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                union.union_with(&td.bags[y]);
                nodes.push(y);
            }
        }
    }
    mu.mass(&union)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, NamedGraph};

    #[test]
    fn p3_decomposes_into_two_edges() {
        let p3 = build_named(NamedGraph::Path(3)).unwrap();
        let td = clique_separator_decomposition(&p3).unwrap();
        assert_eq!(td.node_count(), 2);
        let mut bags: Vec<Vec<usize>> = td.bags.iter().map(|b| b.to_vec()).collect();
        bags.sort();
        assert_eq!(bags, vec![vec![0, 1], vec![1, 2]]);
        for b in &td.bags {
            assert!(bag_has_no_clique_separator(&p3, b));
        }
    }

    #[test]
    fn complete_graph_single_bag() {
        let k5 = build_named(NamedGraph::Clique(5)).unwrap();
        let td = clique_separator_decomposition(&k5).unwrap();
        assert_eq!(td.node_count(), 1);
    }

    #[test]
    fn c4_has_no_clique_separator() {
        let c4 = build_named(NamedGraph::Cycle(4)).unwrap();
        assert!(min_clique_separator(&c4, &VertexSet::full(4)).is_none());
        let td = clique_separator_decomposition(&c4).unwrap();
        assert_eq!(td.node_count(), 1);
    }

    #[test]
    fn path_decomposition_validates() {
        let p = build_named(NamedGraph::Path(9)).unwrap();
        let td = clique_separator_decomposition(&p).unwrap();
        td.validate(&p).unwrap();
        assert_eq!(td.node_count(), 8);
        for b in &td.bags {
            assert_eq!(b.len(), 2);
        }
    }

    #[test]
    fn disconnected_graphs_join_cleanly() {
        let mut g = Graph::new(7);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(4, 5);
        let td = clique_separator_decomposition(&g).unwrap();
        td.validate(&g).unwrap();
    }

    #[test]
    fn central_bag_single_bag() {
        let k4 = build_named(NamedGraph::Clique(4)).unwrap();
        let td = clique_separator_decomposition(&k4).unwrap();
        let mu = Measure::uniform(4);
        match central_bag(&k4, &mu, &td, rat(1, 10)).unwrap() {
            CentralBagOutcome::Bag(_, b) => assert_eq!(b.len(), 4),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn central_bag_mass_concentrated() {
        // Two bags sharing one vertex; all mass on bag 0's private part.
        let p3 = build_named(NamedGraph::Path(3)).unwrap();
        let td = clique_separator_decomposition(&p3).unwrap();
        let mu = Measure::from_weights(vec![rat(9, 10), rat(1, 10), rat(0, 1)]).unwrap();
        match central_bag(&p3, &mu, &td, rat(1, 10)).unwrap() {
            CentralBagOutcome::Bag(_, b) => {
                assert!(mu.mass(&b) >= rat(2, 5));
                assert!(b.contains(0));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn central_bag_long_path_gives_anti_pair() {
        let p = build_named(NamedGraph::Path(20)).unwrap();
        let td = clique_separator_decomposition(&p).unwrap();
        let mu = Measure::uniform(20);
        match central_bag(&p, &mu, &td, rat(1, 10)).unwrap() {
            CentralBagOutcome::AntiPair(a, b) => {
                assert!(p.is_anti_adjacent(&a, &b));
                assert!(mu.mass(&a) > rat(1, 10));
                assert!(mu.mass(&b) > rat(1, 10));
            }
            o => panic!("unexpected {o:?}"),
        }
    }
}
