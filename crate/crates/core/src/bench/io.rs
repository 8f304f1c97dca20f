//! Text formats: the line-oriented instance format, the matrix adapter
//! layout, and reference files.
//!
//! Instance format (`#` starts a comment, tokens are whitespace-separated):
//!
//! ```text
//! dmlulsp 1
//! m 2
//! n 3
//! agents 2
//! item 1 setup 10 holding 1 lead 0 agent 1
//! item 2 setup 20 holding 2 lead 0 agent 2
//! arc 2 1 1
//! demand 1 1 2
//! demand 1 3 3
//! ```
//!
//! Matrix adapter layout, for hand-converted benchmark files:
//!
//! ```text
//! dmlulsp-matrix 1
//! <m> <n> <agents>
//! <setup> <holding> <lead> <agent>     one line per item, in id order
//! <arc count>
//! <pred> <succ> <r>                    one line per arc
//! <d_1> ... <d_n>                      one line per item, zeros for components
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Arc, Instance, InstanceData, Item, ModelError, Money};

pub const TINY1: &str = "dmlulsp 1
m 2
n 3
agents 2
item 1 setup 10 holding 1 lead 0 agent 1
item 2 setup 20 holding 2 lead 0 agent 2
arc 2 1 1
demand 1 1 2
demand 1 3 3
";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid instance: {0}")]
    Semantic(#[from] ModelError),
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Token<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, column: self.column, message: message.into() }
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T, ParseError> {
        self.text.parse().map_err(|_| self.error(format!("expected {what}, found `{}`", self.text)))
    }
}

/// Splits into lines of tokens, dropping comments and blank lines.
fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    text.lines()
        .enumerate()
        .filter_map(|(ln, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        tokens.push(Token { text: &body[s..pos], line: ln + 1, column: s + 1 });
                        start = None;
                    }
                    _ => {}
                }
            }
            (!tokens.is_empty()).then_some(tokens)
        })
        .collect()
}

/// Parses either supported layout. The instance name is left empty.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    parse_instance_named(text, "")
}

pub fn parse_instance_named(text: &str, name: &str) -> Result<Instance, ParseError> {
    let lines = tokenize(text);
    let Some(header) = lines.first() else {
        return Err(ParseError::Syntax { line: 1, column: 1, message: "empty input".into() });
    };
    let data = match (header[0].text, header.get(1).map(|t| t.text), header.len()) {
        ("dmlulsp", Some("1"), 2) => parse_lines(&lines[1..], name)?,
        ("dmlulsp-matrix", Some("1"), 2) => parse_matrix(&lines[1..], name, header[0])?,
        _ => return Err(header[0].error("expected header `dmlulsp 1` or `dmlulsp-matrix 1`")),
    };
    Ok(Instance::new(data)?)
}

fn expect_len(line: &[Token<'_>], len: usize, shape: &str) -> Result<(), ParseError> {
    if line.len() != len {
        return Err(line[0].error(format!("expected `{shape}`")));
    }
    Ok(())
}

fn keyword(tok: &Token<'_>, word: &str) -> Result<(), ParseError> {
    if tok.text != word {
        return Err(tok.error(format!("expected `{word}`, found `{}`", tok.text)));
    }
    Ok(())
}

fn parse_lines(lines: &[Vec<Token<'_>>], name: &str) -> Result<InstanceData, ParseError> {
    let mut dims: [Option<usize>; 3] = [None; 3];
    let mut items = Vec::new();
    let mut arcs = Vec::new();
    let mut demand = BTreeMap::new();
    let mut last = None;
    for line in lines {
        let head = line[0];
        last = Some(head);
        match head.text {
            "m" | "n" | "agents" => {
                expect_len(line, 2, &format!("{} <int>", head.text))?;
                let slot = match head.text {
                    "m" => 0,
                    "n" => 1,
                    _ => 2,
                };
                if dims[slot].is_some() {
                    return Err(head.error(format!("`{}` given twice", head.text)));
                }
                dims[slot] = Some(line[1].parse("a non-negative integer")?);
            }
            "item" => {
                let shape = "item <id> setup <decimal> holding <decimal> lead <int> agent <id>";
                expect_len(line, 10, shape)?;
                keyword(&line[2], "setup")?;
                keyword(&line[4], "holding")?;
                keyword(&line[6], "lead")?;
                keyword(&line[8], "agent")?;
                items.push(Item {
                    id: line[1].parse("an item id")?,
                    setup_cost: line[3].parse::<Money>("a decimal with at most two places")?,
                    holding_cost: line[5].parse::<Money>("a decimal with at most two places")?,
                    lead_time: line[7].parse("a non-negative integer")?,
                    owner: line[9].parse("an agent id")?,
                });
            }
            "arc" => {
                expect_len(line, 4, "arc <pred> <succ> <r>")?;
                arcs.push(Arc {
                    pred: line[1].parse("an item id")?,
                    succ: line[2].parse("an item id")?,
                    quantity: line[3].parse("a non-negative integer")?,
                });
            }
            "demand" => {
                expect_len(line, 4, "demand <item> <period> <qty>")?;
                let key = (line[1].parse("an item id")?, line[2].parse("a period")?);
                let qty: u64 = line[3].parse("a non-negative integer quantity")?;
                if demand.insert(key, qty).is_some() {
                    return Err(head.error(format!("duplicate demand for item {} period {}", key.0, key.1)));
                }
            }
            other => return Err(head.error(format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| {
        let (line, column) = last.map_or((1, 1), |t| (t.line, t.column));
        ParseError::Syntax { line, column, message: format!("missing `{what}` line") }
    };
    let m = dims[0].ok_or_else(|| missing("m"))?;
    let periods = dims[1].ok_or_else(|| missing("n"))?;
    let agent_count = dims[2].ok_or_else(|| missing("agents"))?;
    if items.len() != m {
        let (line, column) = last.map_or((1, 1), |t| (t.line, t.column));
        return Err(ParseError::Syntax { line, column, message: format!("`m {m}` but {} item lines", items.len()) });
    }
    Ok(InstanceData { name: name.to_string(), periods, agent_count, items, arcs, demand })
}

fn parse_matrix(lines: &[Vec<Token<'_>>], name: &str, header: Token<'_>) -> Result<InstanceData, ParseError> {
    let mut rows = lines.iter();
    let mut next =
        |what: &str| rows.next().ok_or_else(|| header.error(format!("unexpected end of input, expected {what}")));
    let dims = next("`<m> <n> <agents>`")?;
    expect_len(dims, 3, "<m> <n> <agents>")?;
    let m: usize = dims[0].parse("item count")?;
    let periods: usize = dims[1].parse("period count")?;
    let agent_count: usize = dims[2].parse("agent count")?;

    let mut items = Vec::with_capacity(m);
    for id in 1..=m {
        let row = next("an item line")?;
        expect_len(row, 4, "<setup> <holding> <lead> <agent>")?;
        items.push(Item {
            id,
            setup_cost: row[0].parse("a decimal with at most two places")?,
            holding_cost: row[1].parse("a decimal with at most two places")?,
            lead_time: row[2].parse("a non-negative integer")?,
            owner: row[3].parse("an agent id")?,
        });
    }
    let count_row = next("the arc count")?;
    expect_len(count_row, 1, "<arc count>")?;
    let arc_count: usize = count_row[0].parse("arc count")?;
    let mut arcs = Vec::with_capacity(arc_count);
    for _ in 0..arc_count {
        let row = next("an arc line")?;
        expect_len(row, 3, "<pred> <succ> <r>")?;
        arcs.push(Arc {
            pred: row[0].parse("an item id")?,
            succ: row[1].parse("an item id")?,
            quantity: row[2].parse("a non-negative integer")?,
        });
    }
    let mut demand = BTreeMap::new();
    for id in 1..=m {
        let row = next("a demand row")?;
        expect_len(row, periods, "one demand value per period")?;
        for (t, tok) in row.iter().enumerate() {
            let qty: u64 = tok.parse("a non-negative integer quantity")?;
            if qty > 0 {
                demand.insert((id, t + 1), qty);
            }
        }
    }
    if let Some(extra) = rows.next() {
        return Err(extra[0].error("trailing content after demand rows"));
    }
    Ok(InstanceData { name: name.to_string(), periods, agent_count, items, arcs, demand })
}

/// Canonical text form: items ascending, arcs and demands lexicographic.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dmlulsp 1");
    let _ = writeln!(out, "m {}", instance.m());
    let _ = writeln!(out, "n {}", instance.n());
    let _ = writeln!(out, "agents {}", instance.agent_count());
    for it in instance.items() {
        let _ = writeln!(
            out,
            "item {} setup {} holding {} lead {} agent {}",
            it.id,
            it.setup_cost.to_compact_string(),
            it.holding_cost.to_compact_string(),
            it.lead_time,
            it.owner
        );
    }
    for arc in instance.arcs() {
        let _ = writeln!(out, "arc {} {} {}", arc.pred, arc.succ, arc.quantity);
    }
    for (&(item, period), qty) in &instance.data().demand {
        let _ = writeln!(out, "demand {item} {period} {qty}");
    }
    out
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

/// Reads an instance file; the file stem becomes the instance name.
pub fn load_instance(path: &Path) -> Result<Instance, LoadError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    parse_instance_named(&text, name).map_err(|source| LoadError::Parse { path: path.display().to_string(), source })
}

/// Best-known non-distributed costs by instance name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceTable {
    costs: BTreeMap<String, Money>,
}

impl ReferenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, cost: Money) -> Result<(), ParseError> {
        if cost <= Money::ZERO {
            return Err(ParseError::Syntax {
                line: 0,
                column: 0,
                message: format!("reference cost must be positive, got {cost}"),
            });
        }
        self.costs.insert(name.into(), cost);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Money> {
        self.costs.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// Parses `<instance-name> <best-known-cost>` lines.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut table = ReferenceTable::new();
        for line in tokenize(text) {
            expect_len(&line, 2, "<instance-name> <best-known-cost>")?;
            let cost: Money = line[1].parse("a decimal cost")?;
            if cost <= Money::ZERO {
                return Err(line[1].error("reference cost must be positive"));
            }
            if table.costs.insert(line[0].text.to_string(), cost).is_some() {
                return Err(line[0].error(format!("duplicate reference for `{}`", line[0].text)));
            }
        }
        Ok(table)
    }

    pub fn write(&self) -> String {
        self.costs.iter().map(|(k, v)| format!("{k} {}\n", v.to_compact_string())).collect()
    }
}
