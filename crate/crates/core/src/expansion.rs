//! Exact expansion constants by exhaustive enumeration.
//!
//! `h(G)` enumerates every vertex set `F` with `1 <= |F| <= ⌊n/2⌋`;
//! `h_k(G)` enumerates every partition of `V` into exactly `k` nonempty
//! blocks as restricted-growth strings. Both return witnesses and both
//! refuse to run above their configured size caps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{full_mask, Graph, KPartition, VertexSet, MASK_LIMIT};
use crate::ratio::Ratio;

pub const DEFAULT_SUBSET_CAP: usize = 24;
pub const DEFAULT_PARTITION_CAP: usize = 14;

/// Size limits for the exhaustive enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n` for which `h(G)` is enumerated (at most 64).
    pub subset: usize,
    /// Largest `n` for which `h_k(G)` is enumerated.
    pub partition: usize,
    /// Testing hook for negative controls: lifts the `|F| <= ⌊n/2⌋`
    /// restriction in [`expansion_exact`], which makes the result wrong.
    #[doc(hidden)]
    pub unbounded_cut_size: bool,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { subset: DEFAULT_SUBSET_CAP, partition: DEFAULT_PARTITION_CAP, unbounded_cut_size: false }
    }
}

impl Caps {
    pub fn check_subset(&self, n: usize) -> Result<()> {
        let limit = self.subset.min(MASK_LIMIT);
        if n > limit {
            return Err(Error::CapExceeded { cap: "cap-subset", limit, n });
        }
        Ok(())
    }

    pub fn check_partition(&self, n: usize) -> Result<()> {
        let limit = self.partition.min(MASK_LIMIT);
        if n > limit {
            return Err(Error::CapExceeded { cap: "cap-partition", limit, n });
        }
        Ok(())
    }
}

/// A vertex set with its boundary size and expansion ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutWitness {
    pub set: VertexSet,
    pub boundary: u64,
    pub ratio: Ratio,
}

impl CutWitness {
    pub fn new(set: VertexSet, boundary: u64) -> CutWitness {
        let ratio = Ratio::new(boundary, set.len() as u64);
        CutWitness { set, boundary, ratio }
    }
}

/// `h(G)` together with a minimizing set; graphs with fewer than two
/// vertices have no admissible set and `h = ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub value: Ratio,
    pub witness: Option<CutWitness>,
}

/// `h_k(G)` with the minimizing partition and its per-block ratios.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KwayWitness {
    pub partition: KPartition,
    pub block_ratios: Vec<Ratio>,
    pub value: Ratio,
}

/// Exact expansion constant `h(G)`.
///
/// Ties are broken by smaller `|F|`, then by smaller bitmask value. When
/// `|F| = n/2` exactly only sets containing vertex 0 are visited, since a set
/// and its complement then have the same ratio.
pub fn expansion_exact(g: &Graph, caps: &Caps) -> Result<Expansion> {
    let n = g.n();
    if n < 2 {
        return Ok(Expansion { value: Ratio::INFINITY, witness: None });
    }
    caps.check_subset(n)?;
    let max_size = if caps.unbounded_cut_size { n - 1 } else { n / 2 };

    // Sizes are searched in parallel; reducing on (ratio, size) keeps the
    // sequential tie-break because each size reports its first minimum.
    let best = (1..=max_size)
        .into_par_iter()
        .map(|s| best_of_size(g, s, !caps.unbounded_cut_size && 2 * s == n))
        .reduce_with(|a, b| if (b.0, b.2.count_ones()) < (a.0, a.2.count_ones()) { b } else { a })
        .expect("at least one admissible size");
    let (ratio, boundary, mask) = best;
    let set = VertexSet::from_mask(n, mask)?;
    Ok(Expansion { value: ratio, witness: Some(CutWitness { set, boundary, ratio }) })
}

/// Best `(ratio, boundary, mask)` among sets of exactly `size` vertices, in
/// increasing mask order.
fn best_of_size(g: &Graph, size: usize, require_vertex_zero: bool) -> (Ratio, u64, u64) {
    let n = g.n();
    let mut best: Option<(Ratio, u64, u64)> = None;
    let mut consider = |mask: u64| {
        let boundary = g.boundary_of_mask(mask);
        let ratio = Ratio::new(boundary, size as u64);
        if best.is_none_or(|(r, _, _)| ratio < r) {
            best = Some((ratio, boundary, mask));
        }
    };
    if require_vertex_zero {
        for rest in SubsetsOfSize::new(n - 1, size - 1) {
            consider((rest << 1) | 1);
        }
    } else {
        for mask in SubsetsOfSize::new(n, size) {
            consider(mask);
        }
    }
    best.expect("nonempty size class")
}

/// Bitmasks over `n` bits with exactly `k` ones, in increasing numeric order
/// (Gosper's hack).
pub(crate) struct SubsetsOfSize {
    next: Option<u64>,
    limit: u128,
}

impl SubsetsOfSize {
    pub(crate) fn new(n: usize, k: usize) -> SubsetsOfSize {
        let next = if k > n { None } else { Some(full_mask(k)) };
        SubsetsOfSize { next, limit: 1u128 << n }
    }
}

impl Iterator for SubsetsOfSize {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur as u128 + c as u128;
            let nxt = (((r ^ cur as u128) >> 2) / c as u128) | r;
            (nxt < self.limit).then_some(nxt as u64)
        };
        Some(cur)
    }
}

/// `h(G[S])` with its witness expressed in the vertex ids of `g`.
pub fn expansion_of_subset(g: &Graph, set: &VertexSet, caps: &Caps) -> Result<Expansion> {
    let (sub, map) = g.induced_subgraph(set)?;
    let local = expansion_exact(&sub, caps)?;
    let witness = match local.witness {
        Some(w) => Some(CutWitness {
            set: VertexSet::new(g.n(), w.set.iter().map(|i| map[i]))?,
            boundary: w.boundary,
            ratio: w.ratio,
        }),
        None => None,
    };
    Ok(Expansion { value: local.value, witness })
}

/// Exact `k`-way expansion constant `h_k(G)`.
///
/// Partitions are enumerated as restricted-growth strings with exactly `k`
/// distinct labels, in lexicographic order; the first minimizer wins.
pub fn kway_expansion_exact(g: &Graph, k: usize, caps: &Caps) -> Result<KwayWitness> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    caps.check_partition(n)?;

    let mut search = RgsSearch {
        g,
        k,
        labels: vec![0; n],
        masks: vec![0; k],
        sizes: vec![0; k],
        boundaries: vec![0; k],
        fixed: vec![0; k],
        best: None,
    };
    search.descend(0, 0);
    let (value, labels) = search.best.expect("k <= n admits a partition");
    let partition = KPartition::from_labels(&labels)?;
    let (block_ratios, max) = boundary_ratio_profile(g, &partition)?;
    debug_assert_eq!(max, value);
    Ok(KwayWitness { partition, block_ratios, value })
}

struct RgsSearch<'a> {
    g: &'a Graph,
    k: usize,
    labels: Vec<usize>,
    masks: Vec<u64>,
    sizes: Vec<u64>,
    // Boundary of each block against everything outside it, including
    // vertices not yet assigned.
    boundaries: Vec<u64>,
    // Edges from each block to assigned vertices in other blocks; these stay
    // boundary edges in every completion.
    fixed: Vec<u64>,
    best: Option<(Ratio, Vec<usize>)>,
}

impl RgsSearch<'_> {
    fn descend(&mut self, v: usize, used: usize) {
        let n = self.g.n();
        if v == n {
            if used == self.k {
                self.visit_leaf();
            }
            return;
        }
        let remaining_after = n - v - 1;
        let top = used.min(self.k - 1);
        for label in 0..=top {
            let new_used = if label == used { used + 1 } else { used };
            if self.k - new_used > remaining_after {
                continue;
            }
            let adj = self.g.adj_mask(v);
            let inside = (adj & self.masks[label]).count_ones() as u64;
            let degree = adj.count_ones() as u64;
            let earlier = adj & ((1u64 << v) - 1);
            // Joining `label`: edges to members stop being boundary, the rest start.
            let saved = self.boundaries[label];
            self.boundaries[label] = saved + degree - 2 * inside;
            let mut cross = [0u64; MASK_LIMIT];
            for b in (0..self.k).filter(|&b| b != label) {
                cross[b] = (earlier & self.masks[b]).count_ones() as u64;
                self.fixed[b] += cross[b];
                self.fixed[label] += cross[b];
            }
            self.masks[label] |= 1u64 << v;
            self.sizes[label] += 1;
            self.labels[v] = label;

            if !self.hopeless(remaining_after as u64) {
                self.descend(v + 1, new_used);
            }

            self.labels[v] = 0;
            self.sizes[label] -= 1;
            self.masks[label] &= !(1u64 << v);
            self.boundaries[label] = saved;
            for b in 0..self.k {
                self.fixed[b] -= cross[b];
                self.fixed[label] -= cross[b];
            }
        }
    }

    /// True when some block's fixed boundary already forces a ratio at least
    /// the best found, however the remaining vertices are placed.
    fn hopeless(&self, remaining: u64) -> bool {
        let Some((best, _)) = &self.best else {
            return false;
        };
        (0..self.k).any(|b| self.fixed[b] > 0 && Ratio::new(self.fixed[b], self.sizes[b] + remaining) >= *best)
    }

    fn visit_leaf(&mut self) {
        let mut worst = Ratio::ZERO;
        for b in 0..self.k {
            let r = Ratio::new(self.boundaries[b], self.sizes[b]);
            if r > worst {
                worst = r;
            }
            if let Some((best, _)) = &self.best {
                if worst >= *best {
                    return;
                }
            }
        }
        self.best = Some((worst, self.labels.clone()));
    }
}

/// Per-block `|∂V^i| / |V^i|` in `g` and their maximum.
pub fn boundary_ratio_profile(g: &Graph, partition: &KPartition) -> Result<(Vec<Ratio>, Ratio)> {
    partition.check_graph(g)?;
    let ratios = partition
        .blocks()
        .iter()
        .map(|b| Ok(Ratio::new(g.boundary_count(b)? as u64, b.len() as u64)))
        .collect::<Result<Vec<_>>>()?;
    let max = ratios.iter().copied().max().expect("k >= 1");
    Ok((ratios, max))
}

/// Visits every partition of `0..n` into exactly `k` blocks, as
/// restricted-growth label vectors in lexicographic order.
pub fn for_each_k_partition<F: FnMut(&[usize])>(n: usize, k: usize, mut visit: F) {
    fn rec<F: FnMut(&[usize])>(labels: &mut Vec<usize>, n: usize, k: usize, used: usize, visit: &mut F) {
        let v = labels.len();
        if v == n {
            if used == k {
                visit(labels);
            }
            return;
        }
        for label in 0..=used.min(k - 1) {
            let new_used = if label == used { used + 1 } else { used };
            if k - new_used > n - v - 1 {
                continue;
            }
            labels.push(label);
            rec(labels, n, k, new_used, visit);
            labels.pop();
        }
    }
    if k == 0 || k > n {
        return;
    }
    rec(&mut Vec::with_capacity(n), n, k, 0, &mut visit);
}
