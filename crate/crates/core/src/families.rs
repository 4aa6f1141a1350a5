//! Graph families and their textual specs.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! spec   := [count] atom
//! atom   := k<n> | c<n> | p<n> | e<n> | petersen
//!         | complete(n) | cycle(n) | path(n) | edgeless(n)
//!         | rr(n=<n>,d=<d>,seed=<s>) | random_regular(...)
//!         | union(item, ...) | apex(spec)
//!         | chain(item, ... [, seed=<s>] [, anchor=<v>] [, anchors=(x:y, ...)])
//! item   := spec ['*' count]
//! ```
//!
//! A leading count makes that many disjoint copies, so `2k3` is two
//! triangles. Inside `union` and `chain`, `spec*count` repeats an entry:
//! `chain(k3*8)` links eight triangles.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// SplitMix64, used for every seeded choice so draws match across platforms.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Draw in `0..bound` by plain reduction modulo `bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.next_u64() % bound
    }
}

pub const PAIRING_RETRIES: usize = 1000;
pub const CONNECTED_RETRIES: u64 = 100;

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("path needs n >= 1".into()));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("complete graph needs n >= 1".into()));
    }
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn edgeless(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("edgeless graph needs n >= 1".into()));
    }
    Ok(Graph::edgeless(n))
}

pub fn petersen() -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    edges.extend((0..5).map(|i| (i, i + 5)));
    edges.extend((0..5).map(|i| (i + 5, (i + 2) % 5 + 5)));
    Graph::new(10, edges).expect("Petersen graph is simple")
}

/// Components renumbered consecutively, with the vertex set of each copy.
pub fn disjoint_union(parts: &[Graph]) -> Result<(Graph, Vec<VertexSet>)> {
    if parts.is_empty() {
        return Err(Error::InvalidParameter("union needs at least one part".into()));
    }
    let n: usize = parts.iter().map(Graph::n).sum();
    let mut edges = Vec::new();
    let mut blocks = Vec::new();
    let mut offset = 0;
    for h in parts {
        edges.extend(h.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        blocks.push(VertexSet::new(n, offset..offset + h.n())?);
        offset += h.n();
    }
    Ok((Graph::new(n, edges)?, blocks))
}

/// A simple `d`-regular graph from the pairing model: shuffle the `n·d`
/// half-edges, pair them in order, and redraw from the same stream whenever a
/// loop or repeated edge appears.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("random_regular needs d < n and n·d even, got n = {n}, d = {d}")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    'attempt: for _ in 0..PAIRING_RETRIES {
        for i in (1..points.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            points.swap(i, j);
        }
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Graph::new(n, edges);
    }
    Err(Error::Generation(format!("no simple pairing for n = {n}, d = {d}, seed = {seed} after {PAIRING_RETRIES} attempts")))
}

/// A connected `random_regular` draw, moving to `seed + 1, seed + 2, …` on
/// disconnected draws. Returns the graph, the seed used and the retry count.
pub fn random_regular_connected(n: usize, d: usize, seed: u64) -> Result<(Graph, u64, u64)> {
    for retry in 0..CONNECTED_RETRIES {
        let s = seed.wrapping_add(retry);
        let g = random_regular(n, d, s)?;
        if g.is_connected() {
            return Ok((g, s, retry));
        }
    }
    Err(Error::Generation(format!("no connected draw for n = {n}, d = {d} from seed {seed}")))
}

/// Adds vertex `|V_H|` joined to every vertex of `H`.
pub fn apex(h: &Graph) -> Result<Graph> {
    let x = h.n();
    let mut edges = h.edges().to_vec();
    edges.extend((0..x).map(|y| (y, x)));
    Graph::new(x + 1, edges)
}

/// Choice of the points `x_m`, `y_m` in each chained block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Anchors {
    /// Vertex 0 of every block.
    Default,
    /// The same local vertex in every block.
    Vertex(usize),
    /// `x_m` then `y_m` drawn per block, in block order.
    Seeded(u64),
    /// One `(x_m, y_m)` per block.
    Explicit(Vec<(usize, usize)>),
}

/// Disjoint union of `parts` plus a bridge `x_m – y_{m−1}` for every
/// consecutive pair. Returns the graph and the block vertex sets.
pub fn chain(parts: &[Graph], anchors: &Anchors) -> Result<(Graph, Vec<VertexSet>)> {
    let (union, blocks) = disjoint_union(parts)?;
    let mut rng = match anchors {
        Anchors::Seeded(seed) => Some(SplitMix64::new(*seed)),
        _ => None,
    };
    if let Anchors::Explicit(list) = anchors {
        if list.len() != parts.len() {
            return Err(Error::InvalidParameter(format!("{} anchor pairs for {} blocks", list.len(), parts.len())));
        }
    }
    let mut points = Vec::with_capacity(parts.len());
    for (m, h) in parts.iter().enumerate() {
        let (x, y) = match anchors {
            Anchors::Default => (0, 0),
            Anchors::Vertex(v) => (*v, *v),
            Anchors::Seeded(_) => {
                let rng = rng.as_mut().expect("seeded");
                let x = rng.below(h.n() as u64) as usize;
                (x, rng.below(h.n() as u64) as usize)
            }
            Anchors::Explicit(list) => list[m],
        };
        for v in [x, y] {
            if v >= h.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
            }
        }
        points.push((x, y));
    }
    let offsets: Vec<usize> = blocks.iter().map(|b| b.min().expect("blocks are nonempty")).collect();
    let mut edges = union.edges().to_vec();
    for m in 1..parts.len() {
        let x = offsets[m] + points[m].0;
        let y = offsets[m - 1] + points[m - 1].1;
        edges.push((x.min(y), x.max(y)));
    }
    Ok((Graph::new(union.n(), edges)?, blocks))
}

/// A parsed family description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    Edgeless(usize),
    Petersen,
    Union(Vec<FamilySpec>),
    RandomRegular { n: usize, d: usize, seed: u64 },
    Apex(Box<FamilySpec>),
    Chain { blocks: Vec<FamilySpec>, anchors: Anchors },
}

/// A generated graph with its designated blocks, if the family has any.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    /// Components of a union, or the linked blocks of a chain.
    pub blocks: Option<Vec<VertexSet>>,
}

impl FamilySpec {
    pub fn build(&self) -> Result<Generated> {
        let plain = |graph: Graph| Ok(Generated { graph, blocks: None });
        match self {
            FamilySpec::Cycle(n) => plain(cycle(*n)?),
            FamilySpec::Path(n) => plain(path(*n)?),
            FamilySpec::Complete(n) => plain(complete(*n)?),
            FamilySpec::Edgeless(n) => plain(edgeless(*n)?),
            FamilySpec::Petersen => plain(petersen()),
            FamilySpec::RandomRegular { n, d, seed } => plain(random_regular(*n, *d, *seed)?),
            FamilySpec::Apex(inner) => plain(apex(&inner.build()?.graph)?),
            FamilySpec::Union(parts) => {
                let graphs = parts.iter().map(|p| p.build().map(|g| g.graph)).collect::<Result<Vec<_>>>()?;
                let (graph, blocks) = disjoint_union(&graphs)?;
                Ok(Generated { graph, blocks: Some(blocks) })
            }
            FamilySpec::Chain { blocks, anchors } => {
                let graphs = blocks.iter().map(|p| p.build().map(|g| g.graph)).collect::<Result<Vec<_>>>()?;
                let (graph, blocks) = chain(&graphs, anchors)?;
                Ok(Generated { graph, blocks: Some(blocks) })
            }
        }
    }

    pub fn graph(&self) -> Result<Graph> {
        Ok(self.build()?.graph)
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[FamilySpec]) -> fmt::Result {
    let mut i = 0;
    let mut first = true;
    while i < items.len() {
        let run = items[i..].iter().take_while(|s| **s == items[i]).count();
        if !first {
            write!(f, ",")?;
        }
        first = false;
        if run > 1 {
            write!(f, "{}*{run}", items[i])?;
        } else {
            write!(f, "{}", items[i])?;
        }
        i += run;
    }
    Ok(())
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Cycle(n) => write!(f, "c{n}"),
            FamilySpec::Path(n) => write!(f, "p{n}"),
            FamilySpec::Complete(n) => write!(f, "k{n}"),
            FamilySpec::Edgeless(n) => write!(f, "e{n}"),
            FamilySpec::Petersen => write!(f, "petersen"),
            FamilySpec::RandomRegular { n, d, seed } => write!(f, "rr(n={n},d={d},seed={seed})"),
            FamilySpec::Apex(inner) => write!(f, "apex({inner})"),
            FamilySpec::Union(parts) => {
                let same = parts.iter().all(|p| *p == parts[0]);
                if same && parts.len() > 1 && !matches!(parts[0], FamilySpec::Union(_)) {
                    write!(f, "{}{}", parts.len(), parts[0])
                } else {
                    write!(f, "union(")?;
                    write_items(f, parts)?;
                    write!(f, ")")
                }
            }
            FamilySpec::Chain { blocks, anchors } => {
                write!(f, "chain(")?;
                write_items(f, blocks)?;
                match anchors {
                    Anchors::Default => {}
                    Anchors::Vertex(v) => write!(f, ",anchor={v}")?,
                    Anchors::Seeded(s) => write!(f, ",seed={s}")?,
                    Anchors::Explicit(list) => {
                        let pairs: Vec<String> = list.iter().map(|(x, y)| format!("{x}:{y}")).collect();
                        write!(f, ",anchors=({})", pairs.join(","))?;
                    }
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilySpec> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.fail("unexpected trailing input");
        }
        Ok(spec)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

enum Arg {
    Item(FamilySpec, usize),
    Key(String, usize, KeyValue),
}

enum KeyValue {
    Int(u64),
    Pairs(Vec<(usize, usize)>),
}

impl Parser<'_> {
    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| Error::Parse { pos: start, msg: "number too large".into() })
    }

    fn size(&mut self) -> Result<usize> {
        let start = self.pos;
        let v = self.number()?;
        usize::try_from(v).map_err(|_| Error::Parse { pos: start, msg: "number too large".into() })
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn spec(&mut self) -> Result<FamilySpec> {
        let count = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let start = self.pos;
            let c = self.size()?;
            if c == 0 {
                return Err(Error::Parse { pos: start, msg: "copy count must be positive".into() });
            }
            Some(c)
        } else {
            None
        };
        let atom = self.atom()?;
        Ok(match count {
            Some(c) => FamilySpec::Union(vec![atom; c]),
            None => atom,
        })
    }

    fn atom(&mut self) -> Result<FamilySpec> {
        self.skip_ws();
        let start = self.pos;
        let name = self.word();
        if name.is_empty() {
            return self.fail("expected a family name");
        }
        let lower = name.to_ascii_lowercase();
        if let ("k" | "c" | "p" | "e", Some(true)) = (lower.as_str(), self.src.get(self.pos).map(u8::is_ascii_digit)) {
            let n = self.size()?;
            return self.sized(&lower, n, start);
        }
        match lower.as_str() {
            "petersen" => Ok(FamilySpec::Petersen),
            "complete" | "cycle" | "path" | "edgeless" => {
                self.expect(b'(')?;
                let n = self.size()?;
                self.expect(b')')?;
                self.sized(&lower, n, start)
            }
            "rr" | "random_regular" => self.random_regular(),
            "apex" => {
                self.expect(b'(')?;
                let inner = self.spec()?;
                self.expect(b')')?;
                Ok(FamilySpec::Apex(Box::new(inner)))
            }
            "union" => {
                let args = self.args()?;
                let mut parts = Vec::new();
                for arg in args {
                    match arg {
                        Arg::Item(spec, count) => parts.extend(std::iter::repeat_n(spec, count)),
                        Arg::Key(key, pos, _) => return Err(Error::Parse { pos, msg: format!("union takes no key '{key}'") }),
                    }
                }
                Ok(FamilySpec::Union(parts))
            }
            "chain" => self.chain(),
            _ => Err(Error::Parse { pos: start, msg: format!("unknown family '{name}'") }),
        }
    }

    fn sized(&self, kind: &str, n: usize, start: usize) -> Result<FamilySpec> {
        let spec = match kind {
            "k" | "complete" => FamilySpec::Complete(n),
            "c" | "cycle" => FamilySpec::Cycle(n),
            "p" | "path" => FamilySpec::Path(n),
            _ => FamilySpec::Edgeless(n),
        };
        let min = if matches!(spec, FamilySpec::Cycle(_)) { 3 } else { 1 };
        if n < min {
            return Err(Error::Parse { pos: start, msg: format!("{kind} needs n >= {min}") });
        }
        Ok(spec)
    }

    fn args(&mut self) -> Result<Vec<Arg>> {
        self.expect(b'(')?;
        let mut args = Vec::new();
        if self.eat(b')') {
            return self.fail("expected at least one argument");
        }
        loop {
            args.push(self.arg()?);
            if self.eat(b')') {
                return Ok(args);
            }
            self.expect(b',')?;
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        self.skip_ws();
        let start = self.pos;
        let name = self.word();
        if !name.is_empty() && self.eat(b'=') {
            let value = if self.eat(b'(') {
                let mut pairs = Vec::new();
                loop {
                    let x = self.size()?;
                    self.expect(b':')?;
                    let y = self.size()?;
                    pairs.push((x, y));
                    if self.eat(b')') {
                        break;
                    }
                    self.expect(b',')?;
                }
                KeyValue::Pairs(pairs)
            } else {
                KeyValue::Int(self.number()?)
            };
            return Ok(Arg::Key(name.to_ascii_lowercase(), start, value));
        }
        self.pos = start;
        let spec = self.spec()?;
        let count = if self.eat(b'*') {
            let at = self.pos;
            let c = self.size()?;
            if c == 0 {
                return Err(Error::Parse { pos: at, msg: "repeat count must be positive".into() });
            }
            c
        } else {
            1
        };
        Ok(Arg::Item(spec, count))
    }

    fn random_regular(&mut self) -> Result<FamilySpec> {
        let open = self.pos;
        let (mut n, mut d, mut seed) = (None, None, None);
        for arg in self.args()? {
            match arg {
                Arg::Key(key, pos, KeyValue::Int(v)) => {
                    let slot = match key.as_str() {
                        "n" => &mut n,
                        "d" => &mut d,
                        "seed" => &mut seed,
                        _ => return Err(Error::Parse { pos, msg: format!("unknown key '{key}'") }),
                    };
                    *slot = Some(v);
                }
                Arg::Key(_, pos, KeyValue::Pairs(_)) => return Err(Error::Parse { pos, msg: "rr takes n=, d=, seed=".into() }),
                Arg::Item(..) => return Err(Error::Parse { pos: open, msg: "rr takes n=, d=, seed=".into() }),
            }
        }
        let missing = |what: &str| Error::Parse { pos: open, msg: format!("rr needs {what}=") };
        let n = n.ok_or_else(|| missing("n"))? as usize;
        let d = d.ok_or_else(|| missing("d"))? as usize;
        Ok(FamilySpec::RandomRegular { n, d, seed: seed.unwrap_or(0) })
    }

    fn chain(&mut self) -> Result<FamilySpec> {
        let mut blocks = Vec::new();
        let mut anchors = Anchors::Default;
        for arg in self.args()? {
            match arg {
                Arg::Item(spec, count) => blocks.extend(std::iter::repeat_n(spec, count)),
                Arg::Key(key, pos, value) => {
                    anchors = match (key.as_str(), value) {
                        ("seed", KeyValue::Int(s)) => Anchors::Seeded(s),
                        ("anchor", KeyValue::Int(v)) => Anchors::Vertex(v as usize),
                        ("anchors", KeyValue::Pairs(p)) => Anchors::Explicit(p),
                        _ => return Err(Error::Parse { pos, msg: format!("chain does not accept '{key}' here") }),
                    }
                }
            }
        }
        if blocks.is_empty() {
            return self.fail("chain needs at least one block");
        }
        Ok(FamilySpec::Chain { blocks, anchors })
    }
}
