//! Machine checks of the expansion, partition and spectral inequalities,
//! run over single graphs or corpora and reported as [`CheckReport`]s.
//!
//! Exact checks compare [`Ratio`]s with no tolerance; spectral checks allow
//! [`TOL`]. A failed must-pass check always means a defect somewhere in the
//! library, since every asserted inequality is proved.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expansion::{boundary_ratio_profile, expansion_of_subset, for_each_k_partition, kway_expansion_exact, Caps};
use crate::families::{FamilySpec, SplitMix64};
use crate::graph::{Graph, KPartition, VertexSet};
use crate::partitioner::{nested_boundary_check, display_address, recursive_partition, sweep_cut, CutOracleMode, PartitionTrace};
use crate::ratio::Ratio;
use crate::spectral::{block_lambda2, block_spectral_certificate, chain_test_bound, spectrum, CHECK_TOL};

pub const TOL: f64 = CHECK_TOL;
pub const THREADS_ENV: &str = "MWC_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Exact,
    Spectral,
    Mixed,
}

/// One (graph, check) result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub graph: String,
    pub params: Map<String, Value>,
    pub quantities: Map<String, Value>,
    pub verdict: Verdict,
    pub category: Category,
    /// Whether a failure is a defect (proved inequality) rather than an
    /// observation (user-supplied constants).
    pub must_pass: bool,
    pub witness: Value,
}

impl CheckReport {
    pub fn is_failure(&self) -> bool {
        self.must_pass && self.verdict == Verdict::Fail
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// `{"exact": "p/q", "decimal": x}`, with `decimal: null` for infinity.
pub fn rational_json(r: Ratio) -> Value {
    let decimal = if r.is_infinite() { Value::Null } else { json!(r.to_f64()) };
    json!({ "exact": r.to_string(), "decimal": decimal })
}

fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn sets_json(sets: &[VertexSet]) -> Value {
    json!(sets.iter().map(VertexSet::to_vec).collect::<Vec<_>>())
}

/// Hierarchy, division order and leaves as a JSON document.
pub fn trace_json(trace: &PartitionTrace) -> Value {
    let nodes: Vec<Value> = trace
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            json!({
                "index": i,
                "address": display_address(&node.address),
                "vertices": node.vertices.to_vec(),
                "parent": node.parent,
                "children": node.children.map(|(a, b)| vec![a, b]),
                "h": rational_json(node.h),
            })
        })
        .collect();
    let divisions: Vec<Value> = trace
        .divisions
        .iter()
        .map(|d| {
            json!({
                "step": d.step,
                "divided": display_address(&trace.nodes[d.node].address),
                "cut": d.witness.set.to_vec(),
                "boundary": d.witness.boundary,
                "h": rational_json(d.h),
            })
        })
        .collect();
    let leaves: Vec<&str> = trace.leaves.iter().map(|&i| display_address(&trace.nodes[i].address)).collect();
    json!({ "mode": trace.mode, "nodes": nodes, "divisions": divisions, "leaves": leaves })
}

/// A graph under test with its descriptor and any designated blocks.
#[derive(Clone, Debug)]
pub struct Subject {
    pub name: String,
    pub graph: Graph,
    pub blocks: Option<Vec<VertexSet>>,
}

impl Subject {
    pub fn from_spec(spec: &FamilySpec) -> Result<Subject> {
        let built = spec.build()?;
        Ok(Subject { name: spec.to_string(), graph: built.graph, blocks: built.blocks })
    }

    pub fn new(name: impl Into<String>, graph: Graph) -> Subject {
        Subject { name: name.into(), graph, blocks: None }
    }
}

struct Report {
    check: &'static str,
    graph: String,
    params: Map<String, Value>,
    quantities: Map<String, Value>,
    category: Category,
    must_pass: bool,
}

impl Report {
    fn new(check: &'static str, graph: &str, category: Category) -> Report {
        Report { check, graph: graph.to_string(), params: Map::new(), quantities: Map::new(), category, must_pass: true }
    }

    fn param(mut self, key: &str, value: impl Into<Value>) -> Report {
        self.params.insert(key.into(), value.into());
        self
    }

    fn q(&mut self, key: &str, value: impl Into<Value>) {
        self.quantities.insert(key.into(), value.into());
    }

    fn finish(self, verdict: Verdict, witness: Value) -> CheckReport {
        CheckReport {
            check: self.check.into(),
            graph: self.graph,
            params: self.params,
            quantities: self.quantities,
            verdict,
            category: self.category,
            must_pass: self.must_pass,
            witness,
        }
    }

    fn not_applicable(self, reason: impl Into<String>) -> CheckReport {
        let reason = reason.into();
        self.finish(Verdict::NotApplicable, json!({ "unmet": reason }))
    }

    /// Cap overruns become not-applicable; anything else is a failure.
    fn errored(self, e: Error) -> CheckReport {
        match e {
            Error::CapExceeded { .. } => self.not_applicable(e.to_string()),
            other => self.finish(Verdict::Fail, json!({ "error": other.to_string() })),
        }
    }
}

/// Runs `body`, turning an error into a report.
fn guarded(report: Report, body: impl FnOnce(&mut Report) -> Result<(Verdict, Value)>) -> CheckReport {
    let mut report = report;
    match body(&mut report) {
        Ok((verdict, witness)) => report.finish(verdict, witness),
        Err(e) => report.errored(e),
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// `h(G[S])`, memoized by vertex set.
struct BlockExpansion<'a> {
    g: &'a Graph,
    caps: Caps,
    memo: HashMap<VertexSet, Ratio>,
}

impl<'a> BlockExpansion<'a> {
    fn new(g: &'a Graph, caps: Caps) -> Self {
        BlockExpansion { g, caps, memo: HashMap::new() }
    }

    fn h(&mut self, set: &VertexSet) -> Result<Ratio> {
        if let Some(r) = self.memo.get(set) {
            return Ok(*r);
        }
        let r = expansion_of_subset(self.g, set, &self.caps)?.value;
        self.memo.insert(set.clone(), r);
        Ok(r)
    }

    fn min_over(&mut self, p: &KPartition) -> Result<Ratio> {
        let mut m = Ratio::INFINITY;
        for b in p.blocks() {
            m = m.min(self.h(b)?);
        }
        Ok(m)
    }
}

/// `h_j(G)`: zero for `j = 1`, `h(G)` for `j = 2` (the worse block of a
/// 2-partition is the smaller side), enumeration otherwise.
fn kway_value(g: &Graph, j: usize, caps: &Caps) -> Result<Ratio> {
    match j {
        1 if g.n() >= 1 => Ok(Ratio::ZERO),
        2 if g.n() >= 2 => Ok(crate::expansion::expansion_exact(g, caps)?.value),
        _ => Ok(kway_expansion_exact(g, j, caps)?.value),
    }
}

fn pow3(e: usize) -> u64 {
    3u64.pow(e as u32)
}

/// Which `k`-partitions a partition-quantified check visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationPolicy {
    All,
    /// `count` uniformly drawn labelings with exactly `k` labels.
    Sample { count: usize, seed: u64 },
}

fn visit_partitions(n: usize, k: usize, policy: EnumerationPolicy, mut visit: impl FnMut(&[usize]) -> Result<bool>) -> Result<usize> {
    let mut seen = 0usize;
    let mut outcome = Ok(());
    match policy {
        EnumerationPolicy::All => for_each_k_partition(n, k, |labels| {
            if outcome.is_ok() {
                seen += 1;
                match visit(labels) {
                    Ok(true) => {}
                    Ok(false) => outcome = Err(None),
                    Err(e) => outcome = Err(Some(e)),
                }
            }
        }),
        EnumerationPolicy::Sample { count, seed } => {
            let mut rng = SplitMix64::new(seed);
            while seen < count && outcome.is_ok() {
                let raw: Vec<usize> = (0..n).map(|_| rng.below(k as u64) as usize).collect();
                let mut relabel = vec![usize::MAX; k];
                let mut next = 0;
                let labels: Vec<usize> = raw
                    .iter()
                    .map(|&l| {
                        if relabel[l] == usize::MAX {
                            relabel[l] = next;
                            next += 1;
                        }
                        relabel[l]
                    })
                    .collect();
                if next < k {
                    continue;
                }
                seen += 1;
                match visit(&labels) {
                    Ok(true) => {}
                    Ok(false) => outcome = Err(None),
                    Err(e) => outcome = Err(Some(e)),
                }
            }
        }
    }
    match outcome {
        Ok(()) | Err(None) => Ok(seen),
        Err(Some(e)) => Err(e),
    }
}

/// For every (or sampled) `k`-partition: `h_{k+1}(G) >= min_i h(G^i)`.
pub fn check_partition_lower_bound(s: &Subject, k: usize, policy: EnumerationPolicy, caps: &Caps) -> CheckReport {
    let policy_name = match policy {
        EnumerationPolicy::All => "all".to_string(),
        EnumerationPolicy::Sample { count, seed } => format!("sample(count={count},seed={seed})"),
    };
    let report = Report::new("lemma1", &s.name, Category::Exact).param("k", k).param("policy", policy_name);
    let g = &s.graph;
    if k == 0 || k + 1 > g.n() {
        return report.not_applicable(format!("needs 1 <= k and k + 1 <= n, have k = {k}, n = {}", g.n()));
    }
    guarded(report, |r| {
        let next = kway_value(g, k + 1, caps)?;
        r.q(&format!("h_{}", k + 1), rational_json(next));
        let mut blocks = BlockExpansion::new(g, *caps);
        let mut tightest = Ratio::ZERO;
        let mut counterexample = None;
        let checked = visit_partitions(g.n(), k, policy, |labels| {
            let p = KPartition::from_labels(labels)?;
            let m = blocks.min_over(&p)?;
            tightest = tightest.max(m);
            if m > next {
                counterexample = Some(json!({ "partition": p.to_lists(), "min_block_h": rational_json(m) }));
                return Ok(false);
            }
            Ok(true)
        })?;
        r.q("partitions_checked", checked);
        r.q("max_min_block_h", rational_json(tightest));
        Ok(match counterexample {
            Some(w) => (Verdict::Fail, w),
            None => (Verdict::Pass, Value::Null),
        })
    })
}

/// The recursive division under the gap hypothesis
/// `h_{k+1} > 3^{k+1} h_k`: block expansions stay at least `h_{k+1}/3^{k+1}`,
/// block boundary ratios at most `3^k h_k`, and every nested-boundary
/// inequality of the trace holds.
pub fn check_gap_partition(s: &Subject, k: usize, caps: &Caps) -> CheckReport {
    let report = Report::new("theorem2", &s.name, Category::Exact).param("k", k).param("mode", "exact");
    let g = &s.graph;
    if k == 0 || k + 1 > g.n() {
        return report.not_applicable(format!("needs 1 <= k and k + 1 <= n, have k = {k}, n = {}", g.n()));
    }
    guarded(report, |r| {
        let hk = kway_value(g, k, caps)?;
        let next = kway_value(g, k + 1, caps)?;
        r.q(&format!("h_{k}"), rational_json(hk));
        r.q(&format!("h_{}", k + 1), rational_json(next));
        let hypothesis = next > hk.mul_int(pow3(k + 1));
        r.q("hypothesis", hypothesis);
        if !hypothesis {
            return Ok((Verdict::NotApplicable, json!({ "unmet": format!("h_{} <= 3^{} h_{k}", k + 1, k + 1) })));
        }
        let (p, trace) = recursive_partition(g, k, CutOracleMode::Exact(*caps))?;
        let mut blocks = BlockExpansion::new(g, *caps);
        let min_h = blocks.min_over(&p)?;
        let (ratios, max_ratio) = boundary_ratio_profile(g, &p)?;
        let lower_ok = next.div_int(pow3(k + 1)) <= min_h;
        let upper_ok = max_ratio <= hk.mul_int(pow3(k));
        r.q("min_block_h", rational_json(min_h));
        r.q("lower_limit", rational_json(next.div_int(pow3(k + 1))));
        r.q("max_block_ratio", rational_json(max_ratio));
        r.q("upper_limit", rational_json(hk.mul_int(pow3(k))));
        r.q("block_ratios", Value::Array(ratios.into_iter().map(rational_json).collect()));
        r.q("lower_ok", lower_ok);
        r.q("upper_ok", upper_ok);

        // Each division cuts the least-expanding piece of an i-partition, so
        // h(D^i) <= h_{i+1}(G) <= h_k(G).
        let mut monotone = true;
        for d in &trace.divisions {
            let hi = kway_value(g, d.step + 1, caps)?;
            monotone &= d.h <= hi && hi <= hk.max(next);
        }
        r.q("divisions_monotone", monotone);

        let nesting = nested_boundary_check(g, &trace)?;
        let failed: Vec<Value> = nesting
            .iter()
            .filter(|c| !c.ok)
            .map(|c| json!({ "node": display_address(&trace.nodes[c.node].address), "p": c.p, "q": c.q, "s": c.s, "lhs": c.lhs, "rhs": rational_json(c.rhs) }))
            .collect();
        r.q("nesting_checked", nesting.len());
        r.q("nesting_failed", failed.len());
        let ok = lower_ok && upper_ok && monotone && failed.is_empty();
        Ok((verdict(ok), json!({ "blocks": p.to_lists(), "failed_nesting": failed, "trace": trace_json(&trace) })))
    })
}

/// `λ_2/2 <= h <= sqrt(2 deg λ_2)`, plus the same upper bound for the sweep
/// cut on connected graphs.
pub fn check_cheeger(s: &Subject, caps: &Caps) -> CheckReport {
    let report = Report::new("cheeger", &s.name, Category::Mixed);
    let g = &s.graph;
    if g.n() < 2 {
        return report.not_applicable("needs n >= 2");
    }
    guarded(report, |r| {
        let exp = crate::expansion::expansion_exact(g, caps)?;
        let h = exp.value.to_f64();
        let l2 = spectrum(g)?.lambda(2)?;
        let deg = g.max_degree() as f64;
        let lower = l2 / 2.0;
        let upper = (2.0 * deg * l2).sqrt();
        let mut ok = lower - TOL <= h && h <= upper + TOL;
        r.q("h", rational_json(exp.value));
        r.q("lambda_2", real(l2));
        r.q("deg", g.max_degree());
        r.q("lower", real(lower));
        r.q("upper", real(upper));
        if g.is_connected() {
            let sweep = sweep_cut(g)?;
            let sweep_ok = sweep.ratio.to_f64() <= upper + TOL;
            r.q("sweep_ratio", rational_json(sweep.ratio));
            r.q("sweep_ok", sweep_ok);
            ok &= sweep_ok;
        }
        Ok((verdict(ok), json!({ "h_witness": exp.witness.map(|w| w.set.to_vec()) })))
    })
}

/// `λ_k/(2 deg) <= h_k`; the ratio `h_k / (k² deg sqrt(λ_k))` is recorded
/// but never asserted.
pub fn check_higher_order_cheeger(s: &Subject, k: usize, caps: &Caps) -> CheckReport {
    let report = Report::new("lgt", &s.name, Category::Mixed).param("k", k);
    let g = &s.graph;
    if k == 0 || k > g.n() {
        return report.not_applicable(format!("needs 1 <= k <= n, have k = {k}, n = {}", g.n()));
    }
    if !g.is_connected() {
        return report.not_applicable("graph is disconnected");
    }
    if g.max_degree() == 0 {
        return report.not_applicable("deg(G) = 0");
    }
    guarded(report, |r| {
        let w = kway_expansion_exact(g, k, caps)?;
        let lk = spectrum(g)?.lambda(k)?;
        let deg = g.max_degree() as f64;
        let lower = lk / (2.0 * deg);
        let hk = w.value.to_f64();
        r.q(&format!("h_{k}"), rational_json(w.value));
        r.q(&format!("lambda_{k}"), real(lk));
        r.q("deg", g.max_degree());
        r.q("lower", real(lower));
        let upper_ratio = (lk > TOL).then(|| hk / ((k * k) as f64 * deg * lk.sqrt()));
        r.q("upper_ratio", upper_ratio.map_or(Value::Null, real));
        let ok = lower - TOL <= hk && upper_ratio.is_none_or(f64::is_finite);
        Ok((verdict(ok), json!({ "partition": w.partition.to_lists() })))
    })
}

/// With `c` components: `h_c = 0`, `h_{c+1} > 0` and `h_{c+1}` equals the
/// least component expansion.
pub fn check_components(s: &Subject, caps: &Caps) -> CheckReport {
    let report = Report::new("components", &s.name, Category::Exact);
    let g = &s.graph;
    guarded(report, |r| {
        let components = g.connected_components();
        let c = components.len();
        r.q("components", c);
        let n = g.n();
        let (hc, next, route) = if caps.check_partition(n).is_ok() {
            let hc = kway_expansion_exact(g, c, caps)?.value;
            let next = if c < n { Some(kway_expansion_exact(g, c + 1, caps)?.value) } else { None };
            (hc, next, "partition-enumeration")
        } else if c == 1 {
            (Ratio::ZERO, (n >= 2).then(|| crate::expansion::expansion_exact(g, caps).map(|e| e.value)).transpose()?, "subset-enumeration")
        } else {
            caps.check_partition(n)?;
            unreachable!()
        };
        r.q("route", route);
        r.q(&format!("h_{c}"), rational_json(hc));
        let mut ok = hc.is_zero();
        if let Some(next) = next {
            let mut least = Ratio::INFINITY;
            for comp in &components {
                least = least.min(expansion_of_subset(g, comp, caps)?.value);
            }
            r.q(&format!("h_{}", c + 1), rational_json(next));
            r.q("min_component_h", rational_json(least));
            ok &= !next.is_zero() && next == least;
        }
        Ok((verdict(ok), json!({ "components": sets_json(&components) })))
    })
}

/// `λ_{k+1}(G) >= min_i λ_2(G^i)` for one partition, single-vertex blocks
/// contributing 0, with the orthogonality of the certificate functions.
pub fn check_block_spectral_bound(s: &Subject, p: &KPartition) -> CheckReport {
    let k = p.k();
    let report = Report::new("lemma2", &s.name, Category::Spectral).param("k", k).param("partition", json!(p.to_lists()));
    let g = &s.graph;
    if k + 1 > g.n() {
        return report.not_applicable(format!("needs k + 1 <= n, have k = {k}, n = {}", g.n()));
    }
    guarded(report, |r| {
        let cert = block_spectral_certificate(g, p)?;
        let lk1 = spectrum(g)?.lambda(k + 1)?;
        r.q(&format!("lambda_{}", k + 1), real(lk1));
        r.q("block_lambda_2", json!(cert.block_lambda2.iter().map(|l| l.map_or(Value::Null, real)).collect::<Vec<_>>()));
        r.q("bound", real(cert.bound));
        r.q("orthogonal", cert.orthogonal);
        let ok = cert.orthogonal && lk1 >= cert.bound - TOL;
        Ok((verdict(ok), json!({ "psi": cert.psi })))
    })
}

/// [`check_block_spectral_bound`] over every `k`-partition, aggregated.
pub fn check_block_spectral_bound_all(s: &Subject, k: usize) -> CheckReport {
    let report = Report::new("lemma2", &s.name, Category::Spectral).param("k", k).param("policy", "all");
    let g = &s.graph;
    if k == 0 || k + 1 > g.n() {
        return report.not_applicable(format!("needs 1 <= k and k + 1 <= n, have k = {k}, n = {}", g.n()));
    }
    guarded(report, |r| {
        let lk1 = spectrum(g)?.lambda(k + 1)?;
        let mut memo: HashMap<VertexSet, f64> = HashMap::new();
        let mut tightest = 0.0f64;
        let mut counterexample = None;
        let checked = visit_partitions(g.n(), k, EnumerationPolicy::All, |labels| {
            let p = KPartition::from_labels(labels)?;
            let mut bound = f64::INFINITY;
            for b in p.blocks() {
                let l2 = match memo.get(b) {
                    Some(v) => *v,
                    None => {
                        let v = block_lambda2(g, b)?.unwrap_or(0.0);
                        memo.insert(b.clone(), v);
                        v
                    }
                };
                bound = bound.min(l2);
            }
            tightest = tightest.max(bound);
            let cert = certificate_orthogonality(&p);
            if lk1 < bound - TOL || !cert {
                counterexample = Some(json!({ "partition": p.to_lists(), "bound": real(bound), "orthogonal": cert }));
                return Ok(false);
            }
            Ok(true)
        })?;
        r.q(&format!("lambda_{}", k + 1), real(lk1));
        r.q("partitions_checked", checked);
        r.q("max_bound", real(tightest));
        Ok(match counterexample {
            Some(w) => (Verdict::Fail, w),
            None => (Verdict::Pass, Value::Null),
        })
    })
}

fn certificate_orthogonality(p: &KPartition) -> bool {
    block_spectral_certificate(&Graph::edgeless(p.n()), p).is_ok_and(|c| c.orthogonal)
}

/// Under `λ_{k+1} >= C k² 3^{k+2} deg² sqrt(λ_k)` with a caller-chosen `C`:
/// the recursive partition has boundary ratios at most `C k² deg sqrt(λ_k)`
/// and `λ_{k+1} <= 3^{k+2} deg^{3/2} sqrt(min_i λ_2(G^i))`.
///
/// The outcome depends on `C`, so these reports are not must-pass.
pub fn check_spectral_partition(s: &Subject, k: usize, c: f64, caps: &Caps) -> CheckReport {
    let mut report = Report::new("corollary4", &s.name, Category::Mixed).param("k", k).param("C", real(c));
    report.must_pass = false;
    let g = &s.graph;
    if !(c > 0.0 && c.is_finite()) {
        return report.errored(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if k == 0 || k + 1 > g.n() {
        return report.not_applicable(format!("needs 1 <= k and k + 1 <= n, have k = {k}, n = {}", g.n()));
    }
    guarded(report, |r| {
        let spec = spectrum(g)?;
        let (lk, lk1) = (spec.lambda(k)?, spec.lambda(k + 1)?);
        let deg = g.max_degree() as f64;
        let kk = (k * k) as f64;
        let threshold = c * kk * pow3(k + 2) as f64 * deg * deg * lk.sqrt();
        r.q(&format!("lambda_{k}"), real(lk));
        r.q(&format!("lambda_{}", k + 1), real(lk1));
        r.q("hypothesis_threshold", real(threshold));
        let hypothesis = lk1 >= threshold - TOL;
        r.q("hypothesis", hypothesis);
        if !hypothesis {
            return Ok((Verdict::NotApplicable, json!({ "unmet": format!("lambda_{} < C k^2 3^{} deg^2 sqrt(lambda_{k})", k + 1, k + 2) })));
        }
        let (p, _) = recursive_partition(g, k, CutOracleMode::Exact(*caps))?;
        let (_, max_ratio) = boundary_ratio_profile(g, &p)?;
        let ratio_limit = c * kk * deg * lk.sqrt();
        let mut min_l2 = f64::INFINITY;
        for b in p.blocks() {
            min_l2 = min_l2.min(block_lambda2(g, b)?.unwrap_or(0.0));
        }
        let spectral_limit = pow3(k + 2) as f64 * deg.powf(1.5) * min_l2.sqrt();
        let ratio_ok = max_ratio.to_f64() <= ratio_limit + TOL;
        let spectral_ok = lk1 <= spectral_limit + TOL;
        r.q("max_block_ratio", rational_json(max_ratio));
        r.q("ratio_limit", real(ratio_limit));
        r.q("min_block_lambda_2", real(min_l2));
        r.q("spectral_limit", real(spectral_limit));
        r.q("ratio_ok", ratio_ok);
        r.q("spectral_ok", spectral_ok);
        Ok((verdict(ratio_ok && spectral_ok), json!({ "blocks": p.to_lists() })))
    })
}

/// Splits each family member with `h_{k+1} >= c` into `k` pieces and checks
/// the pieces keep expansion at least `c / 3^{k+1}`.
///
/// The threshold defaults to the least `h_{k+1}` in the family. The block
/// bound is asserted for members meeting the gap hypothesis
/// `h_{k+1} > 3^{k+1} h_k` (always for `k = 1`); sweep mode only reports.
pub fn check_expander_split(name: &str, family: &[Subject], k: usize, mode: CutOracleMode, threshold: Option<Ratio>) -> CheckReport {
    let mut report = Report::new("expander-split", name, Category::Exact).param("k", k).param("mode", mode.name());
    report.must_pass = mode.is_exact();
    if let Some(t) = threshold {
        report = report.param("threshold", rational_json(t));
    }
    if k == 0 || family.is_empty() {
        return report.not_applicable("needs k >= 1 and a nonempty family");
    }
    guarded(report, |r| {
        let mut members = Vec::new();
        for s in family {
            let g = &s.graph;
            if k + 1 > g.n() {
                return Err(Error::InvalidK { k: k + 1, n: g.n() });
            }
            let (hk, next) = match mode {
                CutOracleMode::Exact(caps) => (kway_value(g, k, &caps)?, kway_value(g, k + 1, &caps)?),
                // Upper estimates from the sweep partitioner.
                CutOracleMode::Sweep => {
                    let est = |j: usize| -> Result<Ratio> {
                        let (p, _) = recursive_partition(g, j, CutOracleMode::Sweep)?;
                        Ok(boundary_ratio_profile(g, &p)?.1)
                    };
                    (est(k)?, est(k + 1)?)
                }
            };
            members.push((s, hk, next));
        }
        let c = threshold.unwrap_or_else(|| members.iter().map(|m| m.2).min().expect("nonempty"));
        r.q("threshold", rational_json(c));
        let limit = c.div_int(pow3(k + 1));
        r.q("block_limit", rational_json(limit));
        let mut rows = Vec::new();
        let mut ok = true;
        let mut applicable = 0;
        for (s, hk, next) in members {
            if next < c {
                rows.push(json!({ "graph": s.name, "selected": false, "h_next": rational_json(next) }));
                continue;
            }
            applicable += 1;
            let (p, _) = recursive_partition(&s.graph, k, mode)?;
            let caps = match mode {
                CutOracleMode::Exact(caps) => caps,
                CutOracleMode::Sweep => Caps::default(),
            };
            let min_h = if mode.is_exact() { Some(BlockExpansion::new(&s.graph, caps).min_over(&p)?) } else { None };
            let asserted = mode.is_exact() && (k == 1 || next > hk.mul_int(pow3(k + 1)));
            let holds = min_h.map(|m| m >= limit);
            if asserted {
                ok &= holds == Some(true);
            }
            let growth = if hk.is_zero() { Value::Null } else { real(1.0 / (pow3(k) as f64 * hk.to_f64())) };
            rows.push(json!({
                "graph": s.name,
                "selected": true,
                "h_k": rational_json(hk),
                "h_next": rational_json(next),
                "min_block_h": min_h.map_or(Value::Null, rational_json),
                "asserted": asserted,
                "holds": holds,
                "block_sizes": p.blocks().iter().map(VertexSet::len).collect::<Vec<_>>(),
                "size_growth_scale": growth,
                "blocks": p.to_lists(),
            }));
        }
        r.q("members", Value::Array(rows));
        if applicable == 0 {
            return Ok((Verdict::NotApplicable, json!({ "unmet": "no member meets the threshold" })));
        }
        Ok((verdict(ok), Value::Null))
    })
}

/// Ordered pairs `(x, y) ∈ H²` with `d_G(x, y) > r`, unreachable pairs
/// included, and their fraction of `|H|²`.
pub fn pair_spread(g: &Graph, h: &VertexSet, r: f64) -> Result<(u64, f64)> {
    if h.is_empty() {
        return Err(Error::InvalidSet("H is empty".into()));
    }
    let mut count = 0u64;
    for x in h.iter() {
        let dist = g.bfs_distances(x)?;
        count += h.iter().filter(|&y| dist[y].is_none_or(|d| d as f64 > r)).count() as u64;
    }
    let total = (h.len() * h.len()) as f64;
    Ok((count, count as f64 / total))
}

/// Exponent `e` with `base^e = x`, if one exists.
fn exact_log(base: u64, x: u64) -> Option<u32> {
    if base < 2 || x == 0 {
        return None;
    }
    let (mut p, mut e) = (1u64, 0u32);
    while p < x {
        p = p.checked_mul(base)?;
        e += 1;
    }
    (p == x).then_some(e)
}

/// `log_base(x)`, exact when `x` is a power of `base`.
fn log_in(base: u64, x: u64) -> f64 {
    match exact_log(base, x) {
        Some(e) => e as f64,
        None => (x as f64).ln() / (base as f64).ln(),
    }
}

/// `|{y : d(x, y) <= r}| <= Σ_{i=0}^{⌊r⌋} d^i` for maximum degree `d`;
/// zero for negative radius.
pub fn ball_volume(d: u64, r: f64) -> u128 {
    if r < 0.0 {
        return 0;
    }
    let top = r.floor() as u64;
    let mut total = 0u128;
    let mut term = 1u128;
    for _ in 0..=top {
        total = total.saturating_add(term);
        term = term.saturating_mul(d as u128);
        if total == u128::MAX {
            break;
        }
    }
    total
}

/// Pair-spread lower bound from ball volumes at radius
/// `r = log_d(|H|)/2 − 1`, `d = deg(G[H])`: at least
/// `|H| (|H| − vol(r))` ordered pairs of `H` are farther apart than `r`.
pub fn check_pair_spread_bound(s: &Subject, h: &VertexSet, label: &str) -> CheckReport {
    let report = Report::new("prop1", &s.name, Category::Exact).param("H", label);
    let g = &s.graph;
    guarded(report, |rep| {
        let (sub, _) = g.induced_subgraph(h)?;
        let d = sub.max_degree() as u64;
        rep.q("deg_H", d);
        if d < 2 {
            return Ok((Verdict::NotApplicable, json!({ "unmet": "deg(G[H]) < 2" })));
        }
        let size = h.len() as u64;
        let r = log_in(d, size) / 2.0 - 1.0;
        let vol = ball_volume(g.max_degree() as u64, r);
        let bound = (size as u128).saturating_mul((size as u128).saturating_sub(vol));
        let (count, fraction) = pair_spread(g, h, r)?;
        rep.q("r", real(r));
        rep.q("ball_volume", vol.min(u64::MAX as u128) as u64);
        rep.q("pair_bound", bound as u64);
        rep.q("pairs_beyond_r", count);
        rep.q("fraction", real(fraction));
        rep.q("at_least_half", 2 * count >= size * size);
        Ok((verdict(count as u128 >= bound), Value::Null))
    })
}

/// Boundary-shell quantities for `H ⊊ V` at radius `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellQuantities {
    /// Vertices of `H` with a neighbor outside `H`.
    pub frontier: VertexSet,
    /// Vertices of `H` farther than `r` from every frontier vertex (in `G`).
    pub far: VertexSet,
    /// The same set computed with distances inside `G[H]`.
    pub far_inside: VertexSet,
    /// `min_z |{w ∈ far : d_G(z, w) > r}|` over `z ∈ far`.
    pub min_far_pair: Option<usize>,
    /// Whether the per-`z` sets agree under `d_G` and `d_{G[H]}`.
    pub pair_sets_agree: bool,
    /// `−½ log_d((|∂H| + 1)/|H|)` for `d = deg(G[H]) >= 2`.
    pub r_formula: Option<f64>,
}

/// Frontier, far sets and the radius formula for `H` in `G`.
pub fn shell_quantities(g: &Graph, h: &VertexSet, r: f64) -> Result<ShellQuantities> {
    if h.host_size() != g.n() {
        return Err(Error::InvalidSet("H lives on a different vertex count".into()));
    }
    if *h == g.vertices() {
        return Err(Error::EmptyComplement);
    }
    let n = g.n();
    let frontier = VertexSet::new(n, h.iter().filter(|&x| g.neighbors(x).iter().any(|&y| !h.contains(y))))?;
    let (sub, map) = g.induced_subgraph(h)?;
    let mut local = vec![usize::MAX; n];
    for (i, &v) in map.iter().enumerate() {
        local[v] = i;
    }
    let beyond = |d: Option<usize>| d.is_none_or(|d| d as f64 > r);
    let ambient: HashMap<usize, Vec<Option<usize>>> = h.iter().map(|x| Ok((x, g.bfs_distances(x)?))).collect::<Result<_>>()?;
    let inside: HashMap<usize, Vec<Option<usize>>> = h.iter().map(|x| Ok((x, sub.bfs_distances(local[x])?))).collect::<Result<_>>()?;

    let far = VertexSet::new(n, h.iter().filter(|&x| frontier.iter().all(|y| beyond(ambient[&y][x]))))?;
    let far_inside = VertexSet::new(n, h.iter().filter(|&x| frontier.iter().all(|y| beyond(inside[&y][local[x]]))))?;

    let mut min_far_pair = None;
    let mut pair_sets_agree = true;
    for z in far.iter() {
        let by_g: Vec<usize> = far.iter().filter(|&w| beyond(ambient[&z][w])).collect();
        let by_h: Vec<usize> = far.iter().filter(|&w| beyond(inside[&z][local[w]])).collect();
        pair_sets_agree &= by_g == by_h;
        min_far_pair = Some(min_far_pair.map_or(by_g.len(), |m: usize| m.min(by_g.len())));
    }

    let d = sub.max_degree() as u64;
    let r_formula = (d >= 2).then(|| {
        let boundary = g.boundary_count(h).expect("H is valid") as u64;
        -0.5 * (log_in(d, boundary + 1) - log_in(d, h.len() as u64))
    });
    Ok(ShellQuantities { frontier, far, far_inside, min_far_pair, pair_sets_agree, r_formula })
}

/// Ball-volume bounds on the far sets and agreement of ambient and
/// intrinsic distances, at `r_formula` (when defined) and `r ∈ {0, 1, 2}`.
pub fn check_boundary_shell(s: &Subject, h: &VertexSet, label: &str) -> CheckReport {
    let report = Report::new("prop2", &s.name, Category::Exact).param("H", label);
    let g = &s.graph;
    if *h == g.vertices() {
        return report.not_applicable("H = V has no boundary");
    }
    guarded(report, |rep| {
        let base = shell_quantities(g, h, 0.0)?;
        rep.q("frontier", base.frontier.to_vec());
        rep.q("boundary", g.boundary_count(h)?);
        rep.q("r_formula", base.r_formula.map_or(Value::Null, real));
        let mut radii: Vec<f64> = base.r_formula.into_iter().collect();
        radii.extend([0.0, 1.0, 2.0]);
        let deg = g.max_degree() as u64;
        let size = h.len() as u128;
        let f = base.frontier.len() as u128;
        let mut rows = Vec::new();
        let mut ok = true;
        for r in radii {
            let q = shell_quantities(g, h, r)?;
            let vol = ball_volume(deg, r);
            let far_bound = size.saturating_sub(f.saturating_mul(vol));
            let pair_bound = size.saturating_sub((f + 1).saturating_mul(vol));
            let far_ok = q.far.len() as u128 >= far_bound;
            let pair_ok = q.min_far_pair.is_none_or(|m| m as u128 >= pair_bound);
            let same = q.far == q.far_inside && q.pair_sets_agree;
            ok &= far_ok && pair_ok && same;
            rows.push(json!({
                "r": real(r),
                "far": q.far.to_vec(),
                "far_bound": far_bound as u64,
                "min_far_pair": q.min_far_pair,
                "far_pair_bound": pair_bound as u64,
                "distances_agree": same,
                "ok": far_ok && pair_ok && same,
            }));
        }
        rep.q("radii", Value::Array(rows));
        Ok((verdict(ok), Value::Null))
    })
}

/// Chain of `block_count` copies of `K_{block_size}`: the test functions on
/// every second block bound `λ_{block_count/4}` by `2/|block|`.
pub fn check_chain_decay(block_count: usize, block_size: usize, seed: Option<u64>) -> CheckReport {
    let anchors = match seed {
        Some(s) => crate::families::Anchors::Seeded(s),
        None => crate::families::Anchors::Default,
    };
    let spec = FamilySpec::Chain { blocks: vec![FamilySpec::Complete(block_size); block_count], anchors };
    let report = Report::new("remark", &spec.to_string(), Category::Spectral).param("block_count", block_count).param("block_size", block_size);
    if block_count < 4 || !block_count.is_multiple_of(2) || block_size == 0 {
        return report.not_applicable("needs an even block count >= 4 and nonempty blocks");
    }
    guarded(report, |r| {
        let (g, blocks) = match spec.build()? {
            crate::families::Generated { graph, blocks: Some(b) } => (graph, b),
            _ => unreachable!("chains carry blocks"),
        };
        let m = block_count / 4;
        let bound = chain_test_bound(&g, &blocks, m)?;
        let lm = spectrum(&g)?.lambda(m)?;
        let limit = bound.limits.iter().copied().fold(0.0, f64::max);
        r.q("m_count", m);
        r.q(&format!("lambda_{m}"), real(lm));
        r.q("bound", real(bound.bound));
        r.q("limit", real(limit));
        r.q("energies", json!(bound.energies.iter().map(|&e| real(e)).collect::<Vec<_>>()));
        r.q("orthonormal", bound.orthonormal);
        r.q("supports_separated", bound.supports_separated);
        let ok = bound.orthonormal && bound.supports_separated && bound.within_limits && lm <= bound.bound + TOL && lm <= limit + TOL;
        Ok((verdict(ok), Value::Null))
    })
}

/// The chain bound shrinks strictly as the block size grows.
pub fn check_chain_decay_series(block_count: usize, sizes: &[usize]) -> CheckReport {
    let name = format!("chain(k{{{}}}*{block_count})", sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","));
    let report = Report::new("remark-decay", &name, Category::Spectral).param("block_count", block_count).param("sizes", json!(sizes));
    guarded(report, |r| {
        let mut bounds = Vec::new();
        for &size in sizes {
            let rep = check_chain_decay(block_count, size, None);
            if rep.verdict != Verdict::Pass {
                return Ok((Verdict::Fail, json!({ "failing_size": size, "report": rep.quantities })));
            }
            bounds.push(rep.quantities["bound"].as_f64().unwrap_or(f64::NAN));
        }
        let decreasing = bounds.windows(2).all(|w| w[1] < w[0]);
        r.q("bounds", json!(bounds));
        r.q("decreasing", decreasing);
        Ok((verdict(decreasing), Value::Null))
    })
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 12] =
    ["lemma1", "theorem2", "cheeger", "lgt", "components", "lemma2", "corollary4", "expander-split", "prop1", "prop2", "remark", "all"];

/// Corpus used when none is given.
pub fn default_corpus() -> Vec<FamilySpec> {
    let mut specs = Vec::new();
    specs.extend((2..=6).map(FamilySpec::Path));
    specs.extend((3..=8).map(FamilySpec::Cycle));
    specs.extend((2..=6).map(FamilySpec::Complete));
    specs.extend((2..=4).map(FamilySpec::Edgeless));
    specs.push(FamilySpec::Union(vec![FamilySpec::Complete(3); 2]));
    specs.push(FamilySpec::Union(vec![FamilySpec::Complete(3); 3]));
    specs.push(FamilySpec::Petersen);
    for n in [12, 16] {
        for seed in 1..=3 {
            specs.push(FamilySpec::RandomRegular { n, d: 3, seed });
        }
    }
    specs.push(FamilySpec::Chain { blocks: vec![FamilySpec::Complete(3); 8], anchors: crate::families::Anchors::Default });
    specs
}

/// Parameters shared by the suites.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub caps: Caps,
    /// Restricts partition-indexed suites to this `k`.
    pub k: Option<usize>,
    /// Constant for the `corollary4` suite.
    pub c: f64,
    pub seed: u64,
    /// Largest `n` for exhaustive partition sweeps (`lemma1`, `lemma2`).
    pub exhaustive_limit: usize,
    /// Largest `k` in the partition-indexed suites.
    pub max_k: usize,
    pub mode: CutOracleModeName,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutOracleModeName {
    Exact,
    Sweep,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { caps: Caps::default(), k: None, c: 1.0, seed: 1, exhaustive_limit: 8, max_k: 4, mode: CutOracleModeName::Exact }
    }
}

impl VerifyConfig {
    fn ks(&self, max: usize) -> Vec<usize> {
        match self.k {
            Some(k) => vec![k],
            None => (1..=max).collect(),
        }
    }

    fn mode(&self, caps: Caps) -> CutOracleMode {
        match self.mode {
            CutOracleModeName::Exact => CutOracleMode::Exact(caps),
            CutOracleModeName::Sweep => CutOracleMode::Sweep,
        }
    }
}

/// Thread count from `MWC_THREADS`, defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&t| t > 0).unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    })
}

type Task<'a> = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync + 'a>;

fn blocks_of(s: &Subject) -> Vec<(String, VertexSet)> {
    s.blocks.iter().flatten().enumerate().map(|(i, b)| (format!("block{i}"), b.clone())).collect()
}

fn suite_tasks<'a>(suite: &str, corpus: &'a [Subject], cfg: &'a VerifyConfig, custom_corpus: bool) -> Result<Vec<Task<'a>>> {
    let caps = cfg.caps;
    let mut tasks: Vec<Task<'a>> = Vec::new();
    match suite {
        "lemma1" => {
            for s in corpus {
                for k in cfg.ks(cfg.max_k) {
                    let policy = if s.graph.n() <= cfg.exhaustive_limit {
                        EnumerationPolicy::All
                    } else {
                        EnumerationPolicy::Sample { count: 200, seed: cfg.seed }
                    };
                    tasks.push(Box::new(move || vec![check_partition_lower_bound(s, k, policy, &caps)]));
                }
            }
        }
        "theorem2" => {
            for s in corpus {
                for k in cfg.ks(3) {
                    tasks.push(Box::new(move || vec![check_gap_partition(s, k, &caps)]));
                }
            }
        }
        "cheeger" => corpus.iter().for_each(|s| tasks.push(Box::new(move || vec![check_cheeger(s, &caps)]))),
        "lgt" => {
            for s in corpus {
                for k in cfg.ks(cfg.max_k) {
                    tasks.push(Box::new(move || vec![check_higher_order_cheeger(s, k, &caps)]));
                }
            }
        }
        "components" => corpus.iter().for_each(|s| tasks.push(Box::new(move || vec![check_components(s, &caps)]))),
        "lemma2" => {
            for s in corpus {
                if s.graph.n() <= cfg.exhaustive_limit {
                    for k in cfg.ks(3) {
                        tasks.push(Box::new(move || vec![check_block_spectral_bound_all(s, k)]));
                    }
                }
                if let Some(blocks) = &s.blocks {
                    let n = s.graph.n();
                    tasks.push(Box::new(move || match KPartition::new(n, blocks.clone()) {
                        Ok(p) => vec![check_block_spectral_bound(s, &p)],
                        Err(e) => vec![Report::new("lemma2", &s.name, Category::Spectral).errored(e)],
                    }));
                }
            }
        }
        "corollary4" => {
            for s in corpus {
                for k in cfg.ks(3) {
                    tasks.push(Box::new(move || vec![check_spectral_partition(s, k, cfg.c, &caps)]));
                }
            }
        }
        "expander-split" => {
            if custom_corpus {
                let k = cfg.k.unwrap_or(1);
                let name = format!("family({})", corpus.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(";"));
                tasks.push(Box::new(move || vec![check_expander_split(&name, corpus, k, cfg.mode(caps), None)]));
            } else {
                let families: Vec<(usize, Vec<FamilySpec>)> = vec![
                    (1, vec![FamilySpec::Petersen, FamilySpec::RandomRegular { n: 12, d: 3, seed: 1 }, FamilySpec::Complete(6)]),
                    (2, (3..=5).map(|m| FamilySpec::Union(vec![FamilySpec::Complete(m); 2])).collect()),
                    (3, (3..=5).map(|m| FamilySpec::Union(vec![FamilySpec::Complete(m); 3])).collect()),
                ];
                for (k, specs) in families {
                    if cfg.k.is_some_and(|want| want != k) {
                        continue;
                    }
                    tasks.push(Box::new(move || {
                        let name = format!("family({})", specs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";"));
                        let members: Result<Vec<Subject>> = specs.iter().map(Subject::from_spec).collect();
                        // The largest member, 3k5, has 15 vertices.
                        let largest = specs.iter().filter_map(|s| s.graph().ok()).map(|g| g.n()).max().unwrap_or(0);
                        let caps = Caps { partition: caps.partition.max(largest), ..caps };
                        match members {
                            Ok(m) => vec![check_expander_split(&name, &m, k, cfg.mode(caps), None)],
                            Err(e) => vec![Report::new("expander-split", &name, Category::Exact).errored(e)],
                        }
                    }));
                }
            }
        }
        "prop1" => {
            for s in corpus {
                tasks.push(Box::new(move || {
                    let mut out = vec![check_pair_spread_bound(s, &s.graph.vertices(), "V")];
                    out.extend(blocks_of(s).iter().map(|(label, b)| check_pair_spread_bound(s, b, label)));
                    out
                }));
            }
        }
        "prop2" => {
            for s in corpus {
                if s.blocks.is_some() {
                    tasks.push(Box::new(move || blocks_of(s).iter().map(|(label, b)| check_boundary_shell(s, b, label)).collect()));
                }
            }
            if !custom_corpus {
                for inner in [FamilySpec::Cycle(8), FamilySpec::Complete(3), FamilySpec::Petersen] {
                    tasks.push(Box::new(move || {
                        let spec = FamilySpec::Apex(Box::new(inner.clone()));
                        match spec.graph() {
                            Ok(g) => {
                                let h = VertexSet::new(g.n(), 0..g.n() - 1).expect("in range");
                                vec![check_boundary_shell(&Subject::new(spec.to_string(), g), &h, "base")]
                            }
                            Err(e) => vec![Report::new("prop2", &spec.to_string(), Category::Exact).errored(e)],
                        }
                    }));
                }
                for text in ["chain(k3*2)", "chain(k4*4,seed=3)", "chain(c6*3)"] {
                    tasks.push(Box::new(move || {
                        let spec: FamilySpec = text.parse().expect("literal spec");
                        match Subject::from_spec(&spec) {
                            Ok(s) => blocks_of(&s).iter().map(|(label, b)| check_boundary_shell(&s, b, label)).collect(),
                            Err(e) => vec![Report::new("prop2", text, Category::Exact).errored(e)],
                        }
                    }));
                }
            }
        }
        "remark" => {
            for (count, size) in [(8, 3), (8, 6), (8, 12), (4, 3), (4, 5)] {
                tasks.push(Box::new(move || vec![check_chain_decay(count, size, None)]));
            }
            tasks.push(Box::new(move || vec![check_chain_decay(8, 4, Some(cfg.seed))]));
            tasks.push(Box::new(|| vec![check_chain_decay_series(8, &[3, 6, 12])]));
        }
        "all" => {
            for name in SUITES.iter().filter(|s| **s != "all") {
                tasks.extend(suite_tasks(name, corpus, cfg, custom_corpus)?);
            }
            tasks.push(Box::new(move || vec![higher_order_summary(corpus, cfg)]));
        }
        other => return Err(Error::InvalidParameter(format!("unknown suite '{other}'; expected one of {}", SUITES.join(", ")))),
    }
    if suite == "lgt" {
        tasks.push(Box::new(move || vec![higher_order_summary(corpus, cfg)]));
    }
    Ok(tasks)
}

/// Largest observed `h_k / (k² deg sqrt(λ_k))` over the corpus.
fn higher_order_summary(corpus: &[Subject], cfg: &VerifyConfig) -> CheckReport {
    let mut report = Report::new("lgt-summary", "corpus", Category::Mixed);
    report.must_pass = false;
    let mut best: Option<(f64, String, usize)> = None;
    for s in corpus {
        for k in cfg.ks(cfg.max_k) {
            let rep = check_higher_order_cheeger(s, k, &cfg.caps);
            if let Some(x) = rep.quantities.get("upper_ratio").and_then(Value::as_f64) {
                if best.as_ref().is_none_or(|(b, _, _)| x > *b) {
                    best = Some((x, s.name.clone(), k));
                }
            }
        }
    }
    match best {
        Some((x, name, k)) => {
            report.q("max_upper_ratio", real(x));
            report.q("attained_by", json!({ "graph": name, "k": k }));
            report.finish(Verdict::Pass, Value::Null)
        }
        None => report.not_applicable("no connected graph with lambda_k > 0"),
    }
}

/// Runs a suite over `corpus` on a pool of [`thread_count`] threads.
///
/// Reports are sorted by check id, graph descriptor and parameters, so the
/// output does not depend on the thread count. `custom_corpus` disables the
/// built-in instances some suites add to the default corpus.
pub fn run_suite(suite: &str, corpus: &[Subject], cfg: &VerifyConfig, custom_corpus: bool) -> Result<Vec<CheckReport>> {
    run_suite_with_threads(suite, corpus, cfg, custom_corpus, thread_count())
}

pub fn run_suite_with_threads(suite: &str, corpus: &[Subject], cfg: &VerifyConfig, custom_corpus: bool, threads: usize) -> Result<Vec<CheckReport>> {
    let tasks = suite_tasks(suite, corpus, cfg, custom_corpus)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().map_err(|e| Error::Io(e.to_string()))?;
    let mut reports: Vec<CheckReport> = pool.install(|| tasks.par_iter().flat_map_iter(|t| t()).collect());
    reports.sort_by_cached_key(|r| (r.check.clone(), r.graph.clone(), Value::Object(r.params.clone()).to_string()));
    Ok(reports)
}

/// Builds subjects from the default corpus.
pub fn default_subjects() -> Result<Vec<Subject>> {
    default_corpus().iter().map(Subject::from_spec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{apex, chain, complete, cycle, petersen, Anchors};

    fn subject(text: &str) -> Subject {
        Subject::from_spec(&text.parse().unwrap()).unwrap()
    }

    fn q<'a>(r: &'a CheckReport, key: &str) -> &'a Value {
        r.quantities.get(key).unwrap_or_else(|| panic!("{key} missing in {r:?}"))
    }

    fn exact(r: &CheckReport, key: &str) -> String {
        q(r, key)["exact"].as_str().unwrap().to_string()
    }

    #[test]
    fn partition_lower_bound_examples() {
        let caps = Caps::default();
        let r = check_partition_lower_bound(&subject("2k3"), 2, EnumerationPolicy::All, &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(exact(&r, "h_3"), "2/1");
        assert_eq!(exact(&r, "max_min_block_h"), "2/1");
        let r = check_partition_lower_bound(&subject("c6"), 2, EnumerationPolicy::All, &caps);
        assert_eq!((r.verdict, q(&r, "partitions_checked").as_u64()), (Verdict::Pass, Some(31)));
        let r = check_partition_lower_bound(&subject("c6"), 1, EnumerationPolicy::All, &caps);
        assert_eq!(exact(&r, "h_2"), exact(&r, "max_min_block_h"));
        let r = check_partition_lower_bound(&subject("petersen"), 3, EnumerationPolicy::Sample { count: 50, seed: 4 }, &caps);
        assert_eq!((r.verdict, q(&r, "partitions_checked").as_u64()), (Verdict::Pass, Some(50)));
    }

    #[test]
    fn gap_partition_examples() {
        let caps = Caps::default();
        let r = check_gap_partition(&subject("2k3"), 2, &caps);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert_eq!(exact(&r, "min_block_h"), "2/1");
        assert_eq!(exact(&r, "lower_limit"), "2/27");
        assert_eq!(exact(&r, "max_block_ratio"), "0/1");

        let r = check_gap_partition(&subject("k4"), 2, &caps);
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert_eq!(exact(&r, "h_2"), "2/1");

        let r = check_gap_partition(&subject("3k3"), 3, &caps);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert_eq!(exact(&r, "max_block_ratio"), "0/1");
    }

    #[test]
    fn cheeger_examples() {
        let caps = Caps::default();
        let r = check_cheeger(&subject("c6"), &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((q(&r, "lambda_2").as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(exact(&r, "h"), "2/3");
        let r = check_cheeger(&subject("k4"), &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((q(&r, "lower").as_f64().unwrap() - 2.0).abs() < 1e-9);
        let r = check_cheeger(&subject("2k3"), &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(check_cheeger(&subject("e1"), &caps).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn short_routes_agree_with_enumeration() {
        let caps = Caps::default();
        for text in ["p2", "c5", "k4", "2k3", "e3", "petersen", "chain(k3*3)"] {
            let g = subject(text).graph;
            for j in 1..=2 {
                assert_eq!(kway_value(&g, j, &caps).unwrap(), kway_expansion_exact(&g, j, &caps).unwrap().value, "{text} h_{j}");
            }
        }
    }

    #[test]
    fn cheeger_catches_the_unbounded_cut_mutation() {
        let caps = Caps { unbounded_cut_size: true, ..Caps::default() };
        assert_eq!(check_cheeger(&subject("k4"), &caps).verdict, Verdict::Fail);
    }

    #[test]
    fn higher_order_examples() {
        let caps = Caps::default();
        let r = check_higher_order_cheeger(&subject("k4"), 2, &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((q(&r, "lower").as_f64().unwrap() - 4.0 / 6.0).abs() < 1e-9);
        assert!(q(&r, "upper_ratio").is_f64());
        let r = check_higher_order_cheeger(&subject("c5"), 1, &caps);
        assert_eq!((r.verdict, exact(&r, "h_1")), (Verdict::Pass, "0/1".into()));
        let r = check_higher_order_cheeger(&subject("c6"), 3, &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((q(&r, "lambda_3").as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(check_higher_order_cheeger(&subject("2k3"), 2, &caps).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn component_examples() {
        let caps = Caps::default();
        let r = check_components(&subject("2k3"), &caps);
        assert_eq!((r.verdict, exact(&r, "h_3"), exact(&r, "min_component_h")), (Verdict::Pass, "2/1".into(), "2/1".into()));
        let r = check_components(&subject("c6"), &caps);
        assert_eq!((r.verdict, exact(&r, "h_2")), (Verdict::Pass, "2/3".into()));
        let r = check_components(&subject("e3"), &caps);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(!r.quantities.contains_key("h_4"));
        let r = check_components(&subject("rr(n=16,d=3,seed=1)"), &caps);
        assert_eq!(q(&r, "route"), "subset-enumeration");
        let r = check_components(&subject("union(rr(n=16,d=3,seed=1),k3)"), &caps);
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn block_spectral_examples() {
        let two = subject("2k3");
        let p = KPartition::new(6, two.blocks.clone().unwrap()).unwrap();
        let r = check_block_spectral_bound(&two, &p);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((q(&r, "bound").as_f64().unwrap() - 3.0).abs() < 1e-9);
        assert!((q(&r, "lambda_3").as_f64().unwrap() - 3.0).abs() < 1e-9);

        let c4 = subject("c4");
        let p = KPartition::from_lists(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let r = check_block_spectral_bound(&c4, &p);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((q(&r, "bound").as_f64().unwrap() - 2.0).abs() < 1e-9);

        let p = KPartition::from_lists(4, &[vec![0], vec![1], vec![2, 3]]).unwrap();
        let r = check_block_spectral_bound(&c4, &p);
        assert_eq!(q(&r, "bound").as_f64(), Some(0.0));
        assert_eq!(r.verdict, Verdict::Pass);

        for k in 1..=3 {
            assert_eq!(check_block_spectral_bound_all(&subject("c6"), k).verdict, Verdict::Pass);
        }
    }

    #[test]
    fn spectral_partition_examples() {
        let caps = Caps::default();
        let r = check_spectral_partition(&subject("2k3"), 2, 1.0, &caps);
        assert_eq!(q(&r, "hypothesis"), true);
        assert!(!r.must_pass);
        assert_ne!(r.verdict, Verdict::NotApplicable);
        let r = check_spectral_partition(&subject("petersen"), 2, 1e6, &caps);
        assert_eq!(r.verdict, Verdict::NotApplicable);
        let r = check_spectral_partition(&subject("3k3"), 3, 1.0, &caps);
        assert_eq!(q(&r, "hypothesis"), true);
        assert_eq!(check_spectral_partition(&subject("k3"), 1, -1.0, &caps).verdict, Verdict::Fail);
    }

    #[test]
    fn expander_split_examples() {
        let caps = Caps { partition: 15, ..Caps::default() };
        let fam: Vec<Subject> = ["2k3", "2k4", "2k5"].iter().map(|t| subject(t)).collect();
        let r = check_expander_split("f", &fam, 2, CutOracleMode::Exact(caps), None);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let members = q(&r, "members").as_array().unwrap();
        assert!(members.iter().all(|m| m["block_sizes"].as_array().unwrap().len() == 2));

        let fam: Vec<Subject> = ["petersen", "k5"].iter().map(|t| subject(t)).collect();
        let r = check_expander_split("g", &fam, 1, CutOracleMode::Exact(caps), None);
        assert_eq!(r.verdict, Verdict::Pass);

        let fam: Vec<Subject> = ["3k3", "3k4", "3k5"].iter().map(|t| subject(t)).collect();
        let r = check_expander_split("h", &fam, 3, CutOracleMode::Exact(caps), None);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn pair_spread_examples() {
        assert_eq!(pair_spread(&petersen(), &petersen().vertices(), 1.0).unwrap(), (60, 0.6));
        let k4 = complete(4).unwrap();
        assert_eq!(pair_spread(&k4, &k4.vertices(), 1.0).unwrap().0, 0);
        let two = subject("2k3").graph;
        assert_eq!(pair_spread(&two, &two.vertices(), 100.0).unwrap().0, 18);
    }

    #[test]
    fn pair_spread_bound_examples() {
        let r = check_pair_spread_bound(&subject("petersen"), &petersen().vertices(), "V");
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!((q(&r, "pair_bound").as_u64(), q(&r, "pairs_beyond_r").as_u64()), (Some(90), Some(90)));
        assert_eq!(log_in(3, 81) / 2.0 - 1.0, 1.0);
        assert_eq!(ball_volume(3, 1.0), 4);
        assert_eq!(ball_volume(3, -0.5), 0);
        assert_eq!(check_pair_spread_bound(&subject("p2"), &subject("p2").graph.vertices(), "V").verdict, Verdict::NotApplicable);
        let (g, _, _) = crate::families::random_regular_connected(64, 3, 1).unwrap();
        let r = check_pair_spread_bound(&Subject::new("rr64", g.clone()), &g.vertices(), "V");
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn shell_examples() {
        let g = apex(&cycle(8).unwrap()).unwrap();
        let h = VertexSet::new(9, 0..8).unwrap();
        let q0 = shell_quantities(&g, &h, 0.0).unwrap();
        assert_eq!(q0.frontier, h);
        assert!(q0.far.is_empty());
        assert_eq!(check_boundary_shell(&Subject::new("apex(c8)", g), &h, "base").verdict, Verdict::Pass);

        let k3 = complete(3).unwrap();
        let (g, blocks) = chain(&[k3.clone(), k3], &Anchors::Default).unwrap();
        let q = shell_quantities(&g, &blocks[0], 0.0).unwrap();
        assert_eq!(q.frontier.to_vec(), vec![0]);
        let expected = -0.5 * ((2f64).ln() / 2f64.ln() - 3f64.ln() / 2f64.ln());
        assert!((q.r_formula.unwrap() - expected).abs() < 1e-12);

        let g = subject("2k3").graph;
        let h = VertexSet::new(6, [0, 1, 2]).unwrap();
        let q = shell_quantities(&g, &h, 1.0).unwrap();
        assert!(q.frontier.is_empty());
        assert_eq!(q.far, h);
        assert!(matches!(shell_quantities(&g, &g.vertices(), 1.0), Err(Error::EmptyComplement)));
    }

    #[test]
    fn far_sets_agree_under_both_metrics_on_random_chains() {
        for seed in 0..20 {
            let parts = vec![cycle(5).unwrap(), complete(4).unwrap(), crate::families::path(4).unwrap()];
            let (g, blocks) = chain(&parts, &Anchors::Seeded(seed)).unwrap();
            for b in &blocks {
                for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
                    let q = shell_quantities(&g, b, r).unwrap();
                    assert_eq!(q.far, q.far_inside);
                    assert!(q.pair_sets_agree);
                }
            }
        }
    }

    #[test]
    fn chain_decay_examples() {
        let r = check_chain_decay(8, 3, None);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(q(&r, "lambda_2").as_f64().unwrap() <= 2.0 / 3.0 + TOL);
        let r6 = check_chain_decay(8, 6, None);
        assert!((q(&r6, "bound").as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let r4 = check_chain_decay(4, 3, None);
        assert_eq!(q(&r4, "bound"), &q(&r4, "energies")[0]);
        assert_eq!(check_chain_decay_series(8, &[3, 6, 12]).verdict, Verdict::Pass);
        assert_eq!(check_chain_decay(5, 3, None).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn suite_output_is_independent_of_thread_count() {
        let corpus: Vec<Subject> = ["c6", "2k3", "k4", "petersen"].iter().map(|t| subject(t)).collect();
        let cfg = VerifyConfig::default();
        let one = run_suite_with_threads("cheeger", &corpus, &cfg, true, 1).unwrap();
        let many = run_suite_with_threads("cheeger", &corpus, &cfg, true, 4).unwrap();
        assert_eq!(one, many);
        assert!(run_suite_with_threads("nope", &corpus, &cfg, true, 1).is_err());
    }

    #[test]
    fn reports_serialize_with_rational_strings() {
        let r = check_cheeger(&subject("c6"), &Caps::default());
        let v: Value = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(v["quantities"]["h"]["exact"], "2/3");
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["category"], "mixed");
        let back: Ratio = v["quantities"]["h"]["exact"].as_str().unwrap().parse().unwrap();
        assert_eq!(back, Ratio::new(2, 3));
        assert_eq!(rational_json(Ratio::INFINITY)["decimal"], Value::Null);
    }
}
