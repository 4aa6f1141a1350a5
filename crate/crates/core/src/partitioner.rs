//! Recursive division into `k` pieces: repeatedly split the undivided piece
//! of smallest expansion along its best cut, recording the hierarchy.

use crate::error::{Error, Result};
use crate::expansion::{expansion_exact, Caps, CutWitness};
use crate::graph::{Graph, KPartition, VertexSet};
use crate::ratio::Ratio;
use crate::spectral::fiedler_vector;

/// How cuts are found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutOracleMode {
    /// Exhaustive `h` of the piece, subject to the subset cap.
    Exact(Caps),
    /// Fiedler sweep of the piece; no optimality guarantee.
    Sweep,
}

impl CutOracleMode {
    pub fn name(&self) -> &'static str {
        match self {
            CutOracleMode::Exact(_) => "exact",
            CutOracleMode::Sweep => "sweep",
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CutOracleMode::Exact(_))
    }
}

/// Best cut of the induced subgraph `G[H]`, in original vertex ids.
///
/// The boundary is counted inside `G[H]`, and `|F| <= ⌊|H|/2⌋`.
pub fn best_cut(g: &Graph, piece: &VertexSet, mode: CutOracleMode) -> Result<CutWitness> {
    if piece.len() < 2 {
        return Err(Error::Unsplittable(format!("{:?}", piece.to_vec())));
    }
    let (sub, map) = g.induced_subgraph(piece)?;
    let local = match mode {
        CutOracleMode::Exact(caps) => expansion_exact(&sub, &caps)?.witness.expect("|H| >= 2 has a witness"),
        CutOracleMode::Sweep => sweep_cut(&sub)?,
    };
    let set = VertexSet::new(g.n(), local.set.iter().map(|v| map[v]))?;
    Ok(CutWitness { set, boundary: local.boundary, ratio: local.ratio })
}

/// Fiedler sweep: order vertices by `(fiedler value, index)` and take the best
/// threshold cut, measuring each threshold by its smaller side.
///
/// Disconnected graphs return their smallest component (ties to the one with
/// the least vertex) with ratio 0.
pub fn sweep_cut(g: &Graph) -> Result<CutWitness> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Unsplittable(format!("graph on {n} vertices")));
    }
    if !g.is_connected() {
        let components = g.connected_components();
        let smallest = components.iter().min_by_key(|c| c.len()).expect("n >= 2");
        return Ok(CutWitness::new(smallest.clone(), 0));
    }

    let f = fiedler_vector(g)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f.values()[a].total_cmp(&f.values()[b]).then(a.cmp(&b)));

    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    // cut[t] = edges between the first t vertices of the order and the rest.
    let mut cut = vec![0u64; n + 1];
    for t in 1..=n {
        let v = order[t - 1];
        let (earlier, later) = g.neighbors(v).iter().fold((0u64, 0u64), |(e, l), &w| {
            if position[w] < t - 1 {
                (e + 1, l)
            } else {
                (e, l + 1)
            }
        });
        cut[t] = cut[t - 1] + later - earlier;
    }

    // Candidates: prefix of size s, or suffix of size s, for s <= ⌊n/2⌋.
    let mut best: Option<(Ratio, usize, bool)> = None;
    for s in 1..=n / 2 {
        for suffix in [false, true] {
            let boundary = if suffix { cut[n - s] } else { cut[s] };
            let ratio = Ratio::new(boundary, s as u64);
            if best.is_none_or(|(r, _, _)| ratio < r) {
                best = Some((ratio, s, suffix));
            }
        }
    }
    let (_, s, suffix) = best.expect("n >= 2");
    let members = if suffix { &order[n - s..] } else { &order[..s] };
    let set = VertexSet::new(n, members.iter().copied())?;
    let boundary = g.boundary_count(&set)? as u64;
    Ok(CutWitness::new(set, boundary))
}

/// One piece `H^{a_1…a_m}` of the hierarchy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    /// Binary address; the root is `""`, its children `"0"` and `"1"`.
    pub address: String,
    pub vertices: VertexSet,
    /// Index of the parent node in [`PartitionTrace::nodes`].
    pub parent: Option<usize>,
    /// Indices of child-0 (the cut set) and child-1 (its complement).
    pub children: Option<(usize, usize)>,
    /// Expansion of `G[vertices]` as seen by the oracle, `∞` for one vertex.
    pub h: Ratio,
    /// Cut the oracle proposed for this piece, if it has two or more vertices.
    pub cut: Option<CutWitness>,
}

impl TraceNode {
    pub fn depth(&self) -> usize {
        self.address.len()
    }
}

/// The `i`-th division: which node was split and by which cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    /// 1-based step number.
    pub step: usize,
    pub node: usize,
    pub witness: CutWitness,
    pub h: Ratio,
}

/// Hierarchy and division order recorded by [`recursive_partition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTrace {
    pub mode: &'static str,
    /// All nodes in creation order; node 0 is the whole graph.
    pub nodes: Vec<TraceNode>,
    pub divisions: Vec<Division>,
    /// Undivided nodes in creation order; these are the final blocks.
    pub leaves: Vec<usize>,
}

impl PartitionTrace {
    /// Node indices from the root down to `node`.
    pub fn chain(&self, node: usize) -> Result<Vec<usize>> {
        let mut chain = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes.get(cur).ok_or_else(|| Error::MalformedTrace(format!("no node {cur}")))?.parent {
            if chain.len() > self.nodes.len() {
                return Err(Error::MalformedTrace("parent cycle".into()));
            }
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        Ok(chain)
    }
}

fn oracle_node(g: &Graph, address: String, vertices: VertexSet, parent: Option<usize>, mode: CutOracleMode) -> Result<TraceNode> {
    let (h, cut) = if vertices.len() < 2 {
        (Ratio::INFINITY, None)
    } else {
        let cut = best_cut(g, &vertices, mode)?;
        (cut.ratio, Some(cut))
    };
    Ok(TraceNode { address, vertices, parent, children: None, h, cut })
}

/// Splits `G` into `k` pieces by repeatedly dividing the undivided piece of
/// least expansion (ties to the earliest created) along its oracle cut.
///
/// `k = 1` returns the whole vertex set and a trace without divisions.
pub fn recursive_partition(g: &Graph, k: usize, mode: CutOracleMode) -> Result<(KPartition, PartitionTrace)> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut trace = PartitionTrace { mode: mode.name(), nodes: Vec::new(), divisions: Vec::new(), leaves: Vec::new() };
    if k == 1 {
        let root = TraceNode { address: String::new(), vertices: g.vertices(), parent: None, children: None, h: Ratio::INFINITY, cut: None };
        trace.nodes.push(root);
        trace.leaves.push(0);
        return Ok((KPartition::new(n, vec![g.vertices()])?, trace));
    }
    trace.nodes.push(oracle_node(g, String::new(), g.vertices(), None, mode)?);

    for step in 1..k {
        let undivided = (0..trace.nodes.len()).filter(|&i| trace.nodes[i].children.is_none());
        let chosen = undivided.min_by_key(|&i| (trace.nodes[i].h, i)).expect("at least one piece");
        let node = &trace.nodes[chosen];
        let Some(witness) = node.cut.clone() else {
            return Err(Error::Unsplittable(format!("H^{} = {:?}", display_address(&node.address), node.vertices.to_vec())));
        };
        let h = node.h;
        let rest = node.vertices.difference(&witness.set);
        let address = node.address.clone();

        let first = trace.nodes.len();
        let child0 = oracle_node(g, format!("{address}0"), witness.set.clone(), Some(chosen), mode)?;
        let child1 = oracle_node(g, format!("{address}1"), rest, Some(chosen), mode)?;
        trace.nodes.push(child0);
        trace.nodes.push(child1);
        trace.nodes[chosen].children = Some((first, first + 1));
        trace.divisions.push(Division { step, node: chosen, witness, h });
    }
    trace.leaves = (0..trace.nodes.len()).filter(|&i| trace.nodes[i].children.is_none()).collect();
    let blocks = trace.leaves.iter().map(|&i| trace.nodes[i].vertices.clone()).collect();
    Ok((KPartition::new(n, blocks)?, trace))
}

/// `"G"` for the root, otherwise the binary address.
pub fn display_address(address: &str) -> &str {
    if address.is_empty() {
        "G"
    } else {
        address
    }
}

/// One instance of the nested-boundary inequality
/// `|∂_(p,s)| − |∂_(q,s)| <= 2|∂_(q,s)| + 2 h(H^(p)) |V_s|`, where
/// `∂_(p,s)` is the boundary of `H^(s)` inside `H^(p)` and `q = p + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingEntry {
    /// Node index of `H^(s)`.
    pub node: usize,
    pub p: usize,
    pub q: usize,
    pub s: usize,
    pub lhs: u64,
    pub rhs: Ratio,
    pub ok: bool,
}

/// Evaluates the nested-boundary inequality for every node at depth `s >= 2`
/// and every ancestor depth `p <= s − 2`, in exact arithmetic.
pub fn nested_boundary_check(g: &Graph, trace: &PartitionTrace) -> Result<Vec<NestingEntry>> {
    validate_trace(g, trace)?;
    let mut entries = Vec::new();
    for node in 0..trace.nodes.len() {
        let chain = trace.chain(node)?;
        let s = chain.len() - 1;
        if s < 2 {
            continue;
        }
        let target = &trace.nodes[node].vertices;
        for p in 0..=s - 2 {
            let q = p + 1;
            let outer_p = &trace.nodes[chain[p]].vertices;
            let outer_q = &trace.nodes[chain[q]].vertices;
            let dp = g.relative_boundary(target, outer_p)? as u64;
            let dq = g.relative_boundary(target, outer_q)? as u64;
            let lhs = dp.checked_sub(dq).ok_or_else(|| Error::MalformedTrace("nested boundary grew".into()))?;
            let h_p = trace.nodes[chain[p]].h;
            let rhs = Ratio::integer(2 * dq) + h_p.mul_int(2 * target.len() as u64);
            entries.push(NestingEntry { node, p, q, s, lhs, rhs, ok: Ratio::integer(lhs) <= rhs });
        }
    }
    Ok(entries)
}

fn validate_trace(g: &Graph, trace: &PartitionTrace) -> Result<()> {
    let bad = |msg: String| Err(Error::MalformedTrace(msg));
    let Some(root) = trace.nodes.first() else {
        return bad("no nodes".into());
    };
    if root.parent.is_some() || root.vertices != g.vertices() {
        return bad("node 0 must be the whole graph".into());
    }
    for (i, node) in trace.nodes.iter().enumerate() {
        if node.vertices.host_size() != g.n() {
            return bad(format!("node {i} lives on the wrong vertex count"));
        }
        if let Some(p) = node.parent {
            if p >= i {
                return bad(format!("node {i} precedes its parent"));
            }
        }
        if let Some((a, b)) = node.children {
            let (Some(ca), Some(cb)) = (trace.nodes.get(a), trace.nodes.get(b)) else {
                return bad(format!("node {i} has missing children"));
            };
            if ca.parent != Some(i) || cb.parent != Some(i) || !ca.vertices.is_disjoint(&cb.vertices) || ca.vertices.union(&cb.vertices) != node.vertices {
                return bad(format!("children of node {i} do not partition it"));
            }
        }
    }
    Ok(())
}
