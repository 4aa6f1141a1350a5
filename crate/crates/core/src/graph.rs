//! Simple undirected graphs on dense vertex ids `0..n`, vertex sets,
//! k-partitions, boundary operators and the path metric.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Largest host size for which [`VertexSet`] uses a single-word bitmask.
pub const MASK_LIMIT: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Members {
    Mask(u64),
    List(Vec<usize>),
}

/// A subset of the vertices of a graph on `n` vertices.
///
/// Hosts with `n <= 64` store a bitmask; larger hosts store a sorted list.
/// The representation is chosen by `n` alone, so derived equality is
/// set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    members: Members,
}

impl VertexSet {
    pub fn empty(n: usize) -> VertexSet {
        let members = if n <= MASK_LIMIT { Members::Mask(0) } else { Members::List(Vec::new()) };
        VertexSet { n, members }
    }

    pub fn full(n: usize) -> VertexSet {
        if n <= MASK_LIMIT {
            VertexSet { n, members: Members::Mask(full_mask(n)) }
        } else {
            VertexSet { n, members: Members::List((0..n).collect()) }
        }
    }

    /// Builds a set from arbitrary (possibly repeated) vertex ids.
    pub fn new<I: IntoIterator<Item = usize>>(n: usize, vertices: I) -> Result<VertexSet> {
        let mut list: Vec<usize> = vertices.into_iter().collect();
        if let Some(&v) = list.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if n <= MASK_LIMIT {
            let mask = list.iter().fold(0u64, |m, &v| m | (1u64 << v));
            return Ok(VertexSet { n, members: Members::Mask(mask) });
        }
        list.sort_unstable();
        list.dedup();
        Ok(VertexSet { n, members: Members::List(list) })
    }

    /// Builds a set from a bitmask; requires `n <= 64` and no bits at or above `n`.
    pub fn from_mask(n: usize, mask: u64) -> Result<VertexSet> {
        if n > MASK_LIMIT {
            return Err(Error::InvalidSet(format!("bitmask sets need n <= {MASK_LIMIT}, got {n}")));
        }
        if mask & !full_mask(n) != 0 {
            let v = 63 - (mask & !full_mask(n)).leading_zeros() as usize;
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        Ok(VertexSet { n, members: Members::Mask(mask) })
    }

    pub fn host_size(&self) -> usize {
        self.n
    }

    /// The bitmask form, when the host has at most 64 vertices.
    pub fn mask(&self) -> Option<u64> {
        match self.members {
            Members::Mask(m) => Some(m),
            Members::List(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Mask(m) => m.count_ones() as usize,
            Members::List(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        match &self.members {
            Members::Mask(m) => v < self.n && (m >> v) & 1 == 1,
            Members::List(l) => l.binary_search(&v).is_ok(),
        }
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let (mask, list) = match &self.members {
            Members::Mask(m) => (Some(*m), None),
            Members::List(l) => (None, Some(l.iter().copied())),
        };
        MaskIter(mask.unwrap_or(0)).chain(list.into_iter().flatten())
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn complement(&self) -> VertexSet {
        match &self.members {
            Members::Mask(m) => VertexSet { n: self.n, members: Members::Mask(!m & full_mask(self.n)) },
            Members::List(_) => {
                VertexSet { n: self.n, members: Members::List((0..self.n).filter(|&v| !self.contains(v)).collect()) }
            }
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        match (&self.members, &other.members) {
            (Members::Mask(a), Members::Mask(b)) => a & !b == 0,
            _ => self.iter().all(|v| other.contains(v)),
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        match (&self.members, &other.members) {
            (Members::Mask(a), Members::Mask(b)) => a & b == 0,
            _ => self.iter().all(|v| !other.contains(v)),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        match (&self.members, &other.members) {
            (Members::Mask(a), Members::Mask(b)) => VertexSet { n: self.n, members: Members::Mask(a & !b) },
            _ => VertexSet::new(self.n, self.iter().filter(|&v| !other.contains(v))).expect("subset of host"),
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        match (&self.members, &other.members) {
            (Members::Mask(a), Members::Mask(b)) => VertexSet { n: self.n, members: Members::Mask(a | b) },
            _ => VertexSet::new(self.n, self.iter().chain(other.iter())).expect("subset of host"),
        }
    }

    fn check_host(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::InvalidSet(format!("set lives on {} vertices, graph has {n}", self.n)));
        }
        Ok(())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

struct MaskIter(u64);

impl Iterator for MaskIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    // Neighbor bitmasks, present only when n <= 64.
    adj_mask: Vec<u64>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and out-of-range endpoints.
    /// Endpoint order within a pair does not matter.
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Graph> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidEdge(format!("loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidEdge(format!("duplicate edge {} {}", w[0].0, w[0].1)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let adj_mask = if n <= MASK_LIMIT {
            adj.iter().map(|l| l.iter().fold(0u64, |m, &v| m | (1u64 << v))).collect()
        } else {
            Vec::new()
        };
        Ok(Graph { n, edges: normalized, adj, adj_mask })
    }

    pub fn edgeless(n: usize) -> Graph {
        Graph::new(n, std::iter::empty()).expect("edgeless graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Neighbor bitmask of `v` (only for `n <= 64`).
    pub(crate) fn adj_mask(&self, v: usize) -> u64 {
        self.adj_mask[v]
    }

    /// Boundary size of a bitmask-encoded set.
    pub(crate) fn boundary_of_mask(&self, mask: u64) -> u64 {
        MaskIter(mask).map(|v| (self.adj_mask[v] & !mask).count_ones() as u64).sum()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Edges with exactly one endpoint in `set`, as `(inside, outside)` pairs.
    pub fn boundary_edges(&self, set: &VertexSet) -> Result<Vec<(usize, usize)>> {
        set.check_host(self.n)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| set.contains(u) != set.contains(v))
            .map(|&(u, v)| if set.contains(u) { (u, v) } else { (v, u) })
            .collect())
    }

    /// `|∂F|`.
    pub fn boundary_count(&self, set: &VertexSet) -> Result<usize> {
        set.check_host(self.n)?;
        if let Some(mask) = set.mask() {
            return Ok(self.boundary_of_mask(mask) as usize);
        }
        Ok(set.iter().map(|u| self.adj[u].iter().filter(|&&v| !set.contains(v)).count()).sum())
    }

    /// Number of edges of the induced graph `G[outer]` joining `inner` to `outer − inner`.
    pub fn relative_boundary(&self, inner: &VertexSet, outer: &VertexSet) -> Result<usize> {
        inner.check_host(self.n)?;
        outer.check_host(self.n)?;
        if !inner.is_subset(outer) {
            return Err(Error::InvalidNesting);
        }
        if let (Some(a), Some(b)) = (inner.mask(), outer.mask()) {
            let rest = b & !a;
            return Ok(MaskIter(a).map(|v| (self.adj_mask[v] & rest).count_ones() as usize).sum());
        }
        Ok(inner
            .iter()
            .map(|u| self.adj[u].iter().filter(|&&v| outer.contains(v) && !inner.contains(v)).count())
            .sum())
    }

    /// The induced subgraph `G[S]` and the map from its vertex ids to ours.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        set.check_host(self.n)?;
        if set.is_empty() {
            return Err(Error::InvalidSet("induced subgraph of the empty set".into()));
        }
        let map = set.to_vec();
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| set.contains(u) && set.contains(v))
            .map(|&(u, v)| (index[u], index[v]));
        Ok((Graph::new(map.len(), edges)?, map))
    }

    /// The complement subgraph `G − G[S]`.
    pub fn complement_subgraph(&self, set: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        set.check_host(self.n)?;
        let rest = set.complement();
        if rest.is_empty() {
            return Err(Error::EmptyComplement);
        }
        self.induced_subgraph(&rest)
    }

    /// Connected components, sorted by least vertex.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut label = vec![usize::MAX; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            components.push(VertexSet::new(self.n, members).expect("in range"));
        }
        components
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_count() == 1
    }

    /// Path-metric distances from `src`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(src)?;
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices are reached");
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// All-pairs distances by repeated BFS.
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.n).map(|s| self.bfs_distances(s).expect("valid source")).collect()
    }

    /// Parses the edge-list text format: a header `n m`, then `m` lines `u v`
    /// with `0 <= u < v < n`.
    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: String| Error::Parse { pos: line, msg };
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
        let nums = parse_pair(header).ok_or_else(|| parse_err(hline, format!("bad header {header:?}")))?;
        let (n, m) = nums;
        let mut edges = Vec::with_capacity(m);
        let mut seen = std::collections::HashSet::with_capacity(m);
        for (line, l) in lines.by_ref().take(m) {
            let (u, v) = parse_pair(l).ok_or_else(|| parse_err(line, format!("bad edge line {l:?}")))?;
            if u == v {
                return Err(parse_err(line, format!("loop {u} {v}")));
            }
            if u > v || v >= n {
                return Err(parse_err(line, format!("edge {u} {v} must satisfy 0 <= u < v < {n}")));
            }
            if !seen.insert((u, v)) {
                return Err(parse_err(line, format!("duplicate edge {u} {v}")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(parse_err(0, format!("header announced {m} edges, found {}", edges.len())));
        }
        if let Some((line, l)) = lines.next() {
            return Err(parse_err(line, format!("trailing content {l:?}")));
        }
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges).finish()
    }
}

/// An ordered list of `k >= 1` nonempty, pairwise disjoint blocks covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPartition {
    blocks: Vec<VertexSet>,
}

impl KPartition {
    pub fn new(n: usize, blocks: Vec<VertexSet>) -> Result<KPartition> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let mut covered = VertexSet::empty(n);
        for (i, b) in blocks.iter().enumerate() {
            if b.host_size() != n {
                return Err(Error::InvalidPartition(format!("block {i} lives on {} vertices", b.host_size())));
            }
            if b.is_empty() {
                return Err(Error::InvalidPartition(format!("block {i} is empty")));
            }
            if !b.is_disjoint(&covered) {
                return Err(Error::InvalidPartition(format!("block {i} overlaps an earlier block")));
            }
            covered = covered.union(b);
        }
        if covered.len() != n {
            return Err(Error::InvalidPartition(format!("blocks cover {} of {n} vertices", covered.len())));
        }
        Ok(KPartition { blocks })
    }

    /// Builds blocks from per-vertex labels; block `i` holds the vertices labelled `i`.
    pub fn from_labels(labels: &[usize]) -> Result<KPartition> {
        let n = labels.len();
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            members[l].push(v);
        }
        let blocks = members.into_iter().map(|m| VertexSet::new(n, m)).collect::<Result<Vec<_>>>()?;
        KPartition::new(n, blocks)
    }

    pub fn from_lists(n: usize, lists: &[Vec<usize>]) -> Result<KPartition> {
        let blocks = lists.iter().map(|l| VertexSet::new(n, l.iter().copied())).collect::<Result<Vec<_>>>()?;
        KPartition::new(n, blocks)
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.blocks[0].host_size()
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n()];
        for (i, b) in self.blocks.iter().enumerate() {
            for v in b.iter() {
                labels[v] = i;
            }
        }
        labels
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(VertexSet::to_vec).collect()
    }

    pub(crate) fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::InvalidPartition(format!("partition covers {} vertices, graph has {}", self.n(), g.n())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::new(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(matches!(Graph::new(3, [(1, 1)]), Err(Error::InvalidEdge(_))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(Error::InvalidEdge(_))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(Error::VertexOutOfRange { vertex: 3, n: 3 })));
    }

    #[test]
    fn boundary_examples() {
        let c4 = cycle(4);
        assert_eq!(c4.boundary_edges(&set(4, &[0, 1])).unwrap().len(), 2);
        assert_eq!(c4.boundary_count(&VertexSet::full(4)).unwrap(), 0);
        assert_eq!(complete(4).boundary_count(&set(4, &[0])).unwrap(), 3);
        let wrong_host = set(5, &[0]);
        assert!(c4.boundary_edges(&wrong_host).is_err());
        assert!(matches!(VertexSet::new(4, [7]), Err(Error::VertexOutOfRange { vertex: 7, .. })));
    }

    #[test]
    fn relative_boundary_examples() {
        let k4 = complete(4);
        assert_eq!(k4.relative_boundary(&set(4, &[0]), &set(4, &[0, 1, 2])).unwrap(), 2);
        let s = set(4, &[1, 2]);
        assert_eq!(k4.relative_boundary(&s, &s).unwrap(), 0);
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.relative_boundary(&set(3, &[0]), &set(3, &[0, 2])).unwrap(), 0);
        assert_eq!(k4.relative_boundary(&set(4, &[3]), &set(4, &[0, 1])), Err(Error::InvalidNesting));
    }

    #[test]
    fn induced_and_complement_examples() {
        let (k3, map) = complete(4).induced_subgraph(&set(4, &[0, 1, 2])).unwrap();
        assert_eq!(k3, complete(3));
        assert_eq!(map, vec![0, 1, 2]);

        let (p, _) = cycle(6).induced_subgraph(&set(6, &[0, 1, 2])).unwrap();
        assert_eq!(p.edges(), &[(0, 1), (1, 2)]);

        let c6 = cycle(6);
        let (copy, map) = c6.induced_subgraph(&VertexSet::full(6)).unwrap();
        assert_eq!(copy, c6);
        assert_eq!(map, (0..6).collect::<Vec<_>>());
        assert!(c6.induced_subgraph(&VertexSet::empty(6)).is_err());

        let (tri, map) = two_triangles().complement_subgraph(&set(6, &[0, 1, 2])).unwrap();
        assert_eq!(tri, complete(3));
        assert_eq!(map, vec![3, 4, 5]);

        let (p3, _) = cycle(4).complement_subgraph(&set(4, &[0])).unwrap();
        assert_eq!(p3.edge_count(), 2);
        assert!(p3.is_connected());

        let (edge, _) = complete(4).complement_subgraph(&set(4, &[0, 1])).unwrap();
        assert_eq!(edge.edges(), &[(0, 1)]);

        assert_eq!(complete(4).complement_subgraph(&VertexSet::full(4)).unwrap_err(), Error::EmptyComplement);
    }

    #[test]
    fn component_examples() {
        let comps = two_triangles().connected_components();
        assert_eq!(comps, vec![set(6, &[0, 1, 2]), set(6, &[3, 4, 5])]);
        assert_eq!(cycle(6).component_count(), 1);
        let singletons = Graph::edgeless(4).connected_components();
        assert_eq!(singletons.len(), 4);
        assert!(singletons.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn bfs_examples() {
        let d: Vec<_> = cycle(6).bfs_distances(0).unwrap().into_iter().map(Option::unwrap).collect();
        assert_eq!(d, vec![0, 1, 2, 3, 2, 1]);
        let d: Vec<_> = complete(4).bfs_distances(0).unwrap().into_iter().map(Option::unwrap).collect();
        assert_eq!(d, vec![0, 1, 1, 1]);
        assert_eq!(two_triangles().bfs_distances(1).unwrap()[4], None);
        assert!(cycle(3).bfs_distances(3).is_err());
    }

    #[test]
    fn max_degree_examples() {
        assert_eq!(complete(4).max_degree(), 3);
        assert_eq!(cycle(7).max_degree(), 2);
        let star = Graph::new(5, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(star.max_degree(), 4);
        assert_eq!(Graph::edgeless(3).max_degree(), 0);
    }

    #[test]
    fn edge_list_round_trip_and_rejections() {
        let g = two_triangles();
        let text = g.to_edge_list();
        assert!(text.starts_with("6 6\n"));
        assert_eq!(Graph::from_edge_list(&text).unwrap(), g);
        assert!(Graph::from_edge_list("3 1\n1 1\n").is_err());
        assert!(Graph::from_edge_list("3 2\n0 1\n0 1\n").is_err());
        assert!(Graph::from_edge_list("3 1\n2 1\n").is_err());
        assert!(Graph::from_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::from_edge_list("3 1\n0 3\n").is_err());
    }

    #[test]
    fn large_hosts_use_lists() {
        let n = 70;
        let g = Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        let s = VertexSet::new(n, [0, 1, 2, 69]).unwrap();
        assert!(s.mask().is_none());
        assert_eq!(g.boundary_count(&s).unwrap(), 2);
        assert_eq!(s.complement().len(), 66);
        let (sub, map) = g.induced_subgraph(&s).unwrap();
        assert_eq!(sub.edge_count(), 3);
        assert_eq!(map, vec![0, 1, 2, 69]);
    }

    #[test]
    fn partition_validation() {
        assert!(KPartition::from_lists(4, &[vec![0, 1], vec![2, 3]]).is_ok());
        assert!(KPartition::from_lists(4, &[vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(KPartition::from_lists(4, &[vec![0, 1], vec![2]]).is_err());
        assert!(KPartition::from_lists(4, &[vec![0, 1, 2, 3], vec![]]).is_err());
        let p = KPartition::from_labels(&[0, 0, 1, 2, 1]).unwrap();
        assert_eq!(p.to_lists(), vec![vec![0, 1], vec![2, 4], vec![3]]);
        assert_eq!(p.labels(), vec![0, 0, 1, 2, 1]);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let len = pairs.len();
            proptest::collection::vec(any::<bool>(), len)
                .prop_map(move |keep| Graph::new(n, pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e)).unwrap())
        })
    }

    fn arb_graph_and_mask(max_n: usize) -> impl Strategy<Value = (Graph, u64)> {
        arb_graph(max_n).prop_flat_map(|g| {
            let full = full_mask(g.n());
            (Just(g), any::<u64>().prop_map(move |m| m & full))
        })
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric_and_degree_sum_matches(g in arb_graph(10)) {
            let degree_sum: usize = (0..g.n()).map(|v| g.degree(v)).sum();
            prop_assert_eq!(degree_sum, 2 * g.edge_count());
            for u in 0..g.n() {
                for &v in g.neighbors(u) {
                    prop_assert!(g.neighbors(v).contains(&u));
                    prop_assert!(u != v);
                }
            }
        }

        #[test]
        fn boundary_is_symmetric_under_complement((g, mask) in arb_graph_and_mask(10)) {
            let f = VertexSet::from_mask(g.n(), mask).unwrap();
            let mut a: Vec<_> = g.boundary_edges(&f).unwrap().into_iter().map(|(x, y)| (x.min(y), x.max(y))).collect();
            let mut b: Vec<_> = g.boundary_edges(&f.complement()).unwrap().into_iter().map(|(x, y)| (x.min(y), x.max(y))).collect();
            a.sort();
            b.sort();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(g.boundary_count(&f).unwrap(), a.len());
            prop_assert_eq!(g.relative_boundary(&f, &VertexSet::full(g.n())).unwrap(), a.len());
        }

        #[test]
        fn induced_subgraphs_compose((g, mask) in arb_graph_and_mask(9), sub in any::<u64>()) {
            prop_assume!(mask != 0);
            let s = VertexSet::from_mask(g.n(), mask).unwrap();
            let (gs, map_s) = g.induced_subgraph(&s).unwrap();
            let t_local = sub & full_mask(gs.n());
            prop_assume!(t_local != 0);
            let t_prime = VertexSet::from_mask(gs.n(), t_local).unwrap();
            let (gst, map_st) = gs.induced_subgraph(&t_prime).unwrap();
            let t = VertexSet::new(g.n(), t_prime.iter().map(|i| map_s[i])).unwrap();
            let (gt, map_t) = g.induced_subgraph(&t).unwrap();
            prop_assert_eq!(&gst, &gt);
            let composed: Vec<_> = map_st.iter().map(|&i| map_s[i]).collect();
            prop_assert_eq!(composed, map_t);
        }

        #[test]
        fn edge_list_round_trip(g in arb_graph(12)) {
            prop_assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        }
    }

    #[test]
    fn bfs_is_a_metric_on_all_graphs_up_to_six_vertices() {
        // Exhaustive over every labelled graph with n <= 6.
        for n in 1..=6usize {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for bits in 0u32..(1 << pairs.len()) {
                let g = Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e)).unwrap();
                assert_metric(&g);
            }
        }
    }

    #[test]
    fn bfs_is_a_metric_on_sampled_graphs_up_to_eight_vertices() {
        // Deterministic sweep over edge subsets of graphs with 7 and 8 vertices.
        for n in 7..=8usize {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let mut state = 0x2545_f491_4f6c_dd1du64 ^ n as u64;
            for _ in 0..300 {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let g = Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| (state >> (i % 64)) & 1 == 1).map(|(_, &e)| e)).unwrap();
                assert_metric(&g);
            }
        }
    }

    fn assert_metric(g: &Graph) {
        let d = g.distance_matrix();
        let comps = g.connected_components();
        for comp in &comps {
            for x in comp.iter() {
                assert_eq!(d[x][x], Some(0));
                for y in comp.iter() {
                    assert_eq!(d[x][y], d[y][x]);
                    assert!(d[x][y].is_some());
                    for z in comp.iter() {
                        assert!(d[x][z].unwrap() <= d[x][y].unwrap() + d[y][z].unwrap());
                    }
                }
            }
        }
    }
}
