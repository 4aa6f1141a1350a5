//! Command-line front end.
//!
//! ```text
//! mwc generate --family 'chain(k3*8)' --out chain.txt
//! mwc analyze  --input chain.txt --h --hk 3 --spectrum --sweep
//! mwc partition --family 2k3 --k 2 --mode exact
//! mwc verify all
//! mwc verify theorem2 --family '2k3;3k3;k4'
//! ```
//!
//! Graphs come from an edge-list file (`--input`) or a family descriptor
//! (`--family`); see [`crate::families`] for the descriptor grammar. `verify`
//! takes a `;`-separated corpus and falls back to the built-in one.
//!
//! Reports are JSON (`verify` writes one [`CheckReport`] per line). Exact
//! quantities are `{"exact": "p/q", "decimal": x}` objects. Errors are
//! written to stderr as `{"error": kind, "message": ..}`, with `cap` and
//! `limit` for cap overruns.
//!
//! Exit codes: 0 success, 1 a must-pass check failed, 2 usage or input error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expansion::{boundary_ratio_profile, expansion_exact, expansion_of_subset, kway_expansion_exact, Caps};
use crate::families::FamilySpec;
use crate::graph::Graph;
use crate::partitioner::{nested_boundary_check, recursive_partition, sweep_cut, CutOracleMode};
use crate::ratio::Ratio;
use crate::spectral::spectrum;
use crate::verifier::{self, rational_json, trace_json, CheckReport, CutOracleModeName, Subject, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "mwc", version, about = "Exact and spectral multi-way expansion toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a family graph and write it as an edge list.
    Generate,
    /// Compute expansion constants, spectra and sweep cuts.
    Analyze(AnalyzeArgs),
    /// Run the recursive partitioner.
    Partition,
    /// Run a verification suite over a corpus.
    Verify {
        /// One of lemma1, theorem2, cheeger, lgt, components, lemma2,
        /// corollary4, expander-split, prop1, prop2, remark, all.
        suite: String,
    },
}

#[derive(Args, Debug, Default)]
pub struct AnalyzeArgs {
    /// Expansion constant with a witness set.
    #[arg(long)]
    pub h: bool,
    /// k-way expansion constant with a witness partition.
    #[arg(long, value_name = "K")]
    pub hk: Option<usize>,
    /// Laplacian eigenvalues.
    #[arg(long)]
    pub spectrum: bool,
    /// Fiedler sweep cut.
    #[arg(long)]
    pub sweep: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Sweep,
}

#[derive(Args, Debug)]
pub struct Options {
    /// Edge-list file.
    #[arg(long, global = true, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// Family descriptor; `;`-separated list for `verify`.
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = Caps::default().subset as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_subset: u64,
    #[arg(long, global = true, default_value_t = Caps::default().partition as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_partition: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Constant for the spectral-partition suite.
    #[arg(long = "C", global = true, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Negative control: lifts the cut-size restriction in h(G).
    #[arg(long, global = true, hide = true)]
    pub mutate: bool,
}

impl Options {
    fn caps(&self) -> Caps {
        Caps { subset: self.cap_subset as usize, partition: self.cap_partition as usize, unbounded_cut_size: self.mutate }
    }

    fn oracle(&self) -> CutOracleMode {
        match self.mode {
            Mode::Exact => CutOracleMode::Exact(self.caps()),
            Mode::Sweep => CutOracleMode::Sweep,
        }
    }

    fn single_input(&self) -> Result<Subject> {
        match (&self.input, &self.family) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)?;
                Ok(Subject::new(path.display().to_string(), Graph::from_edge_list(&text)?))
            }
            (None, Some(spec)) => Subject::from_spec(&spec.parse::<FamilySpec>()?),
            _ => Err(Error::InvalidParameter("give exactly one of --input or --family".into())),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Structured form of an error for stderr.
pub fn error_json(e: &Error) -> Value {
    let kind = match e {
        Error::VertexOutOfRange { .. } => "vertex-out-of-range",
        Error::InvalidSet(_) => "invalid-set",
        Error::InvalidNesting => "invalid-nesting",
        Error::EmptyComplement => "empty-complement",
        Error::InvalidEdge(_) => "invalid-edge",
        Error::InvalidPartition(_) => "invalid-partition",
        Error::InvalidK { .. } => "invalid-k",
        Error::CapExceeded { .. } => "cap-exceeded",
        Error::Unsplittable(_) => "unsplittable",
        Error::SolverFailure { .. } => "solver-failure",
        Error::UndefinedQuotient => "undefined-quotient",
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::InvalidParameter(_) => "invalid-parameter",
        Error::MalformedTrace(_) => "malformed-trace",
        Error::Parse { .. } => "parse",
        Error::Generation(_) => "generation",
        Error::Io(_) => "io",
    };
    let mut v = json!({ "error": kind, "message": e.to_string() });
    match e {
        Error::CapExceeded { cap, limit, n } => {
            v["cap"] = json!(cap);
            v["limit"] = json!(limit);
            v["n"] = json!(n);
        }
        Error::Parse { pos, .. } => v["position"] = json!(pos),
        _ => {}
    }
    v
}

fn generate(opts: &Options) -> Result<()> {
    let text = opts.family.as_deref().ok_or_else(|| Error::InvalidParameter("generate needs --family".into()))?;
    let spec: FamilySpec = text.parse()?;
    let built = spec.build()?;
    let g = &built.graph;
    let mut summary = json!({ "graph": spec.to_string(), "n": g.n(), "m": g.edge_count(), "components": g.component_count() });
    if let Some(blocks) = &built.blocks {
        summary["blocks"] = json!(blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>());
    }
    opts.emit(&g.to_edge_list())?;
    let line = render_object(&summary, opts.format);
    if opts.out.is_some() {
        print!("{line}");
    } else {
        eprint!("{line}");
    }
    Ok(())
}

fn analyze(opts: &Options, args: &AnalyzeArgs) -> Result<()> {
    let s = opts.single_input()?;
    let g = &s.graph;
    let caps = opts.caps();
    let none = !args.h && args.hk.is_none() && !args.spectrum && !args.sweep;
    let mut out = Map::new();
    out.insert("graph".into(), json!(s.name));
    out.insert("n".into(), json!(g.n()));
    out.insert("m".into(), json!(g.edge_count()));
    if args.h || none {
        let e = expansion_exact(g, &caps)?;
        out.insert("h".into(), rational_json(e.value));
        out.insert("h_witness".into(), e.witness.map_or(Value::Null, |w| json!(w.set.to_vec())));
    }
    if let Some(k) = args.hk {
        let w = kway_expansion_exact(g, k, &caps)?;
        out.insert(format!("h_{k}"), rational_json(w.value));
        out.insert(format!("h_{k}_witness"), json!(w.partition.to_lists()));
        out.insert(format!("h_{k}_block_ratios"), json!(w.block_ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>()));
    }
    if args.spectrum || none {
        out.insert("spectrum".into(), json!(spectrum(g)?.values()));
    }
    if args.sweep {
        let w = sweep_cut(g)?;
        out.insert("sweep".into(), json!({ "set": w.set.to_vec(), "boundary": w.boundary, "ratio": rational_json(w.ratio) }));
    }
    opts.emit(&render_object(&Value::Object(out), opts.format))
}

fn partition(opts: &Options) -> Result<()> {
    let s = opts.single_input()?;
    let g = &s.graph;
    let k = opts.k.ok_or_else(|| Error::InvalidParameter("partition needs --k".into()))?;
    let mode = opts.oracle();
    let (p, trace) = recursive_partition(g, k, mode)?;
    let (ratios, max_ratio) = boundary_ratio_profile(g, &p)?;
    let mut out = json!({
        "graph": s.name,
        "k": k,
        "mode": mode.name(),
        "blocks": p.to_lists(),
        "block_ratios": ratios.into_iter().map(rational_json).collect::<Vec<_>>(),
        "max_block_ratio": rational_json(max_ratio),
        "trace": trace_json(&trace),
    });
    if let CutOracleMode::Exact(caps) = mode {
        out["conclusions"] = exact_conclusions(g, &p, &trace, k, &caps)?;
    }
    opts.emit(&render_object(&out, opts.format))
}

fn exact_conclusions(g: &Graph, p: &crate::graph::KPartition, trace: &crate::partitioner::PartitionTrace, k: usize, caps: &Caps) -> Result<Value> {
    let nesting = nested_boundary_check(g, trace)?;
    let nesting_ok = nesting.iter().all(|c| c.ok);
    let mut out = json!({ "nesting_checked": nesting.len(), "nesting_ok": nesting_ok });
    if k + 1 > g.n() {
        out["hypothesis"] = Value::Null;
        return Ok(out);
    }
    let hk = kway_expansion_exact(g, k, caps)?.value;
    let next = kway_expansion_exact(g, k + 1, caps)?.value;
    let scale = 3u64.pow(k as u32 + 1);
    let hypothesis = next > hk.mul_int(scale);
    let mut min_h = Ratio::INFINITY;
    for b in p.blocks() {
        min_h = min_h.min(expansion_of_subset(g, b, caps)?.value);
    }
    let max_ratio = boundary_ratio_profile(g, p)?.1;
    let lower_ok = next.div_int(scale) <= min_h;
    let upper_ok = max_ratio <= hk.mul_int(scale / 3);
    out[format!("h_{k}")] = rational_json(hk);
    out[format!("h_{}", k + 1)] = rational_json(next);
    out["hypothesis"] = json!(hypothesis);
    out["min_block_h"] = rational_json(min_h);
    out["lower_ok"] = json!(lower_ok);
    out["upper_ok"] = json!(upper_ok);
    out["verdict"] = json!(if !hypothesis {
        "not-applicable"
    } else if lower_ok && upper_ok && nesting_ok {
        "pass"
    } else {
        "fail"
    });
    Ok(out)
}

/// Corpus from the options and whether it is user-supplied.
fn corpus(opts: &Options) -> Result<(Vec<Subject>, bool)> {
    if opts.input.is_some() {
        return Ok((vec![opts.single_input()?], true));
    }
    match &opts.family {
        Some(list) => {
            let subjects = list
                .split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<FamilySpec>().and_then(|spec| Subject::from_spec(&spec)))
                .collect::<Result<Vec<_>>>()?;
            if subjects.is_empty() {
                return Err(Error::InvalidParameter("empty corpus".into()));
            }
            Ok((subjects, true))
        }
        None => Ok((verifier::default_subjects()?, false)),
    }
}

fn verify(opts: &Options, suite: &str) -> Result<bool> {
    let (subjects, custom) = corpus(opts)?;
    let cfg = VerifyConfig {
        caps: opts.caps(),
        k: opts.k,
        c: opts.c,
        seed: opts.seed,
        mode: match opts.mode {
            Mode::Exact => CutOracleModeName::Exact,
            Mode::Sweep => CutOracleModeName::Sweep,
        },
        ..VerifyConfig::default()
    };
    let reports = verifier::run_suite(suite, &subjects, &cfg, custom)?;
    let failures = reports.iter().filter(|r| r.is_failure()).count();
    opts.emit(&render_reports(&reports, opts.format)?)?;
    eprintln!("{} reports, {} must-pass failures", reports.len(), failures);
    Ok(failures == 0)
}

fn render_reports(reports: &[CheckReport], format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(reports.iter().map(|r| r.to_json_line() + "\n").collect()),
        Format::Text => Ok(reports
            .iter()
            .map(|r| {
                let params = Value::Object(r.params.clone());
                let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
                format!("{:<14} {:<16} {:<40} {}\n", verdict.as_str().unwrap_or(""), r.check, r.graph, params)
            })
            .collect()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(["check", "graph", "verdict", "category", "must_pass", "params", "quantities"]).map_err(io)?;
            for r in reports {
                let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
                let category = serde_json::to_value(r.category).expect("category serializes");
                w.write_record([
                    r.check.as_str(),
                    r.graph.as_str(),
                    verdict.as_str().unwrap_or(""),
                    category.as_str().unwrap_or(""),
                    if r.must_pass { "true" } else { "false" },
                    &Value::Object(r.params.clone()).to_string(),
                    &Value::Object(r.quantities.clone()).to_string(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv of utf-8 is utf-8"))
        }
    }
}

fn render_object(v: &Value, format: Format) -> String {
    let Value::Object(map) = v else { return format!("{v}\n") };
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("json serializes")),
        Format::Text => map.iter().map(|(k, v)| format!("{k}: {}\n", plain(v))).collect(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let _ = w.write_record(["key", "value"]);
            for (k, v) in map {
                let _ = w.write_record([k.as_str(), &plain(v)]);
            }
            String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(m) if m.contains_key("exact") => m["exact"].as_str().unwrap_or_default().to_string(),
        other => other.to_string(),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Generate => generate(&cli.opts).map(|()| true),
        Command::Analyze(args) => analyze(&cli.opts, args).map(|()| true),
        Command::Partition => partition(&cli.opts).map(|()| true),
        Command::Verify { suite } => verify(&cli.opts, suite),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            2
        }
    }
}
