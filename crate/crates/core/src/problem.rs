//! Input specifications: colors, optional weights and adjacency, parsed
//! from a small text format or JSON, and graph validation.
//!
//! Text format, one key per line, `#` comments:
//!
//! ```text
//! n: 6
//! colors: [451314] [245631]
//! weights: 1/2 1/2
//! level_cap: 3
//! adjacency:
//! 0 0 1 1
//! ...
//! ```

use std::collections::VecDeque;

use num_integer::Integer;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{self, Rational};
use crate::transform::Transformation;
use crate::walk::Walk;

/// A directed multigraph given by edge counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    counts: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(counts: Vec<Vec<usize>>) -> Result<Self> {
        let n = counts.len();
        if n == 0 {
            return Err(Error::Parse("empty adjacency matrix".into()));
        }
        if let Some(i) = counts.iter().position(|r| r.len() != n) {
            return Err(Error::Parse(format!(
                "adjacency row {} has {} entries, expected {n}",
                i + 1,
                counts[i].len()
            )));
        }
        Ok(Self { counts })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    /// The common out-degree.
    pub fn out_degree(&self) -> Result<usize> {
        let d: usize = self.counts[0].iter().sum();
        for (i, row) in self.counts.iter().enumerate() {
            let s: usize = row.iter().sum();
            if s != d {
                return Err(Error::NotRegular(format!(
                    "vertex {} has out-degree {s}, vertex 1 has {d}",
                    i + 1
                )));
            }
        }
        if d == 0 {
            return Err(Error::NotRegular("out-degree 0".into()));
        }
        Ok(d)
    }

    /// Out-neighbours of `i` with multiplicity, ascending.
    pub fn targets(&self, i: usize) -> Vec<usize> {
        self.counts[i]
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(j, c))
            .collect()
    }

    pub fn stochastic(&self) -> Result<RationalMatrix> {
        let d = rational::int(self.out_degree()? as i64);
        Ok(RationalMatrix::from_fn(self.n(), self.n(), |i, j| {
            rational::int(self.counts[i][j] as i64) / &d
        }))
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.counts[i]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, _)| j)
    }

    #[allow(clippy::needless_range_loop)]
    fn reaches_all(&self, reverse: bool) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                let edge = if reverse {
                    self.counts[j][i]
                } else {
                    self.counts[i][j]
                };
                if edge > 0 && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.reaches_all(false) && self.reaches_all(true)
    }

    /// Period of a strongly connected graph: gcd of `level(u) + 1 - level(v)`
    /// over edges, with BFS levels from vertex 0.
    pub fn period(&self) -> usize {
        let n = self.n();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for j in self.successors(i).collect::<Vec<_>>() {
                if level[j] == usize::MAX {
                    level[j] = level[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        let mut g = 0usize;
        for i in 0..n {
            if level[i] == usize::MAX {
                continue;
            }
            for j in self.successors(i) {
                if level[j] != usize::MAX {
                    let diff = (level[i] + 1).abs_diff(level[j]);
                    g = g.gcd(&diff);
                }
            }
        }
        g
    }

    /// The graph traced out by a list of colors.
    pub fn from_colors(colors: &[Transformation]) -> Result<Self> {
        let n = colors.first().ok_or(Error::EmptyGenerators)?.n();
        let mut counts = vec![vec![0; n]; n];
        for c in colors {
            for (i, &j) in c.image().iter().enumerate() {
                counts[i][j] += 1;
            }
        }
        Self::new(counts)
    }
}

/// How strictly graph hypotheses are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    #[default]
    Strict,
    /// Violations become warnings.
    Warn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub n: usize,
    pub colors: Vec<Transformation>,
    pub weights: Option<Vec<Rational>>,
    pub adjacency: Option<Graph>,
    pub level_cap: Option<usize>,
}

impl ProblemSpec {
    pub fn walk(&self) -> Result<Walk> {
        match &self.weights {
            Some(w) => Walk::new(self.colors.clone(), w.clone()),
            None => Walk::uniform(self.colors.clone()),
        }
    }

    /// Level cap for zeon levels: the given cap, else `min(n, 6)`.
    pub fn effective_level_cap(&self) -> usize {
        self.level_cap.unwrap_or(self.n.min(6)).clamp(1, self.n)
    }

    /// Checks the hypotheses of the analysis: the colors decompose the
    /// adjacency matrix if one is given, and the underlying graph is
    /// strongly connected and aperiodic. Returns warnings in `Warn` mode.
    pub fn validate(&self, mode: Validation) -> Result<Vec<String>> {
        let traced = Graph::from_colors(&self.colors)?;
        let mut problems = Vec::new();
        if let Some(g) = &self.adjacency {
            g.out_degree()?;
            if g.n() != self.n {
                return Err(Error::Parse(format!(
                    "adjacency is {}x{} but colors act on {} points",
                    g.n(),
                    g.n(),
                    self.n
                )));
            }
            if g != &traced {
                return Err(Error::NotRegular(
                    "colors do not decompose the adjacency matrix".into(),
                ));
            }
        }
        if !traced.is_strongly_connected() {
            problems.push(Error::NotStronglyConnected);
        } else {
            let p = traced.period();
            if p != 1 {
                problems.push(Error::Periodic(p));
            }
        }
        match (mode, problems.into_iter().next()) {
            (_, None) => Ok(Vec::new()),
            (Validation::Strict, Some(e)) => Err(e),
            (Validation::Warn, Some(e)) => Ok(vec![e.to_string()]),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSpec {
    n: Option<usize>,
    colors: Option<Vec<String>>,
    weights: Option<Vec<String>>,
    adjacency: Option<Vec<Vec<usize>>>,
    level_cap: Option<usize>,
}

/// Raw fields before cross-validation.
#[derive(Default)]
struct Fields {
    n: Option<usize>,
    colors: Option<Vec<Transformation>>,
    weights: Option<Vec<Rational>>,
    adjacency: Option<Graph>,
    level_cap: Option<usize>,
}

fn parse_fields(input: &str) -> Result<Fields> {
    if input.trim_start().starts_with('{') {
        let raw: JsonSpec = serde_json::from_str(input).map_err(|e| Error::Parse(format!("json: {e}")))?;
        return Ok(Fields {
            n: raw.n,
            colors: raw
                .colors
                .map(|cs| cs.iter().map(|c| c.parse()).collect::<Result<Vec<_>>>())
                .transpose()?,
            weights: raw
                .weights
                .map(|ws| ws.iter().map(|w| rational::parse(w)).collect::<Result<Vec<_>>>())
                .transpose()?,
            adjacency: raw.adjacency.map(Graph::new).transpose()?,
            level_cap: raw.level_cap,
        });
    }
    let mut fields = Fields::default();
    let mut lines = input
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .peekable();
    while let Some(line) = lines.next() {
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `key: value`, got `{line}`")))?;
        let value = value.trim();
        match key.trim() {
            "n" => fields.n = Some(parse_count(value, "n")?),
            "colors" => fields.colors = Some(parse_words(value)?),
            "weights" => {
                fields.weights = Some(
                    value
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|w| !w.is_empty())
                        .map(rational::parse)
                        .collect::<Result<_>>()?,
                )
            }
            "level_cap" => fields.level_cap = Some(parse_count(value, "level_cap")?),
            "adjacency" => {
                let mut rows = Vec::new();
                if !value.is_empty() {
                    rows.push(parse_row(value)?);
                }
                while let Some(next) = lines.peek() {
                    if next.contains(':') {
                        break;
                    }
                    rows.push(parse_row(next)?);
                    lines.next();
                }
                fields.adjacency = Some(Graph::new(rows)?);
            }
            other => return Err(Error::Parse(format!("unknown key `{other}`"))),
        }
    }
    Ok(fields)
}

fn parse_count(value: &str, what: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("{what} must be a nonnegative integer, got `{value}`")))
}

fn parse_row(line: &str) -> Result<Vec<usize>> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_count(t, "adjacency entry"))
        .collect()
}

/// `[451314] [245631]`, `[4 5 1 3 1 4], [2 4 5 6 3 1]` or bare digit words.
pub fn parse_words(value: &str) -> Result<Vec<Transformation>> {
    if value.contains('[') {
        let mut out = Vec::new();
        let mut rest = value;
        while let Some(start) = rest.find('[') {
            let end = rest[start..]
                .find(']')
                .ok_or_else(|| Error::Parse(format!("unclosed bracket in `{value}`")))?;
            out.push(rest[start..start + end + 1].parse()?);
            rest = &rest[start + end + 1..];
        }
        if !rest
            .trim_matches(|c: char| c.is_whitespace() || c == ',')
            .is_empty()
        {
            return Err(Error::Parse(format!("trailing text `{}`", rest.trim())));
        }
        Ok(out)
    } else {
        value
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .map(str::parse)
            .collect()
    }
}

/// Parses a specification; colors are required.
pub fn parse_spec(input: &str) -> Result<ProblemSpec> {
    let f = parse_fields(input)?;
    let colors = f
        .colors
        .filter(|c| !c.is_empty())
        .ok_or_else(|| Error::Parse("no colors given".into()))?;
    let n = f.n.unwrap_or_else(|| colors[0].n());
    if let Some(c) = colors.iter().find(|c| c.n() != n) {
        return Err(Error::Parse(format!("color {c} does not act on {n} points")));
    }
    if let Some(w) = &f.weights {
        if w.len() != colors.len() {
            return Err(Error::Parse(format!(
                "{} weights for {} colors",
                w.len(),
                colors.len()
            )));
        }
    }
    if let Some(cap) = f.level_cap {
        if cap == 0 || cap > n {
            return Err(Error::Parse(format!("level_cap {cap} outside 1..={n}")));
        }
    }
    Ok(ProblemSpec {
        n,
        colors,
        weights: f.weights,
        adjacency: f.adjacency,
        level_cap: f.level_cap,
    })
}

/// Parses a graph: an adjacency matrix in either format.
pub fn parse_graph(input: &str) -> Result<Graph> {
    let trimmed = input.trim_start();
    if !trimmed.starts_with('{') && !input.contains(':') {
        let rows = input
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(parse_row)
            .collect::<Result<Vec<_>>>()?;
        return Graph::new(rows);
    }
    parse_fields(input)?
        .adjacency
        .ok_or_else(|| Error::Parse("no adjacency matrix given".into()))
}
