//! Result tables and their CSV / JSON renderings.
//!
//! Floats are written with 17 significant digits so reruns diff cleanly.
//! CSV output starts with `#` comment lines (schema version, command,
//! effective parameters, sort key); summaries follow the rows as comments.

use std::cmp::Ordering;
use std::io::Write;

pub const SCHEMA: &str = "bdelta-cli/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Float(v) if !v.is_finite() => "null".into(),
            Cell::Text(s) => serde_json::to_string(s).unwrap(),
            other => other.render(),
        }
    }

    fn cmp_key(&self, other: &Cell) -> Ordering {
        match (self, other) {
            (Cell::Int(a), Cell::Int(b)) => a.cmp(b),
            (Cell::Uint(a), Cell::Uint(b)) => a.cmp(b),
            (Cell::Float(a), Cell::Float(b)) => a.total_cmp(b),
            (Cell::Bool(a), Cell::Bool(b)) => a.cmp(b),
            (a, b) => a.render().cmp(&b.render()),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Cell {
        Cell::Int(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Uint(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Uint(v as u64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Text(v)
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Keep the sign of -0.0 out of the output.
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

/// A command's output: rows, the parameters that produced them, and an
/// optional summary. The first `key_len` columns are the sort key.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub key_len: usize,
    pub params: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
    /// Pass/fail of the summary itself (fits, battery totals), if any.
    pub summary_pass: Option<bool>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<&'static str>, key_len: usize) -> Table {
        assert_eq!(columns.last(), Some(&"pass"));
        Table {
            command: command.into(),
            columns,
            key_len,
            params: Vec::new(),
            rows: Vec::new(),
            summary: Vec::new(),
            summary_pass: None,
        }
    }

    pub fn param(&mut self, k: &str, v: impl ToString) {
        self.params.push((k.to_string(), v.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.command);
        self.rows.push(row);
    }

    pub fn sort(&mut self) {
        let k = self.key_len;
        self.rows.sort_by(|a, b| {
            a[..k].iter().zip(&b[..k]).map(|(x, y)| x.cmp_key(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        });
    }

    pub fn all_pass(&self) -> bool {
        let rows = self.rows.iter().all(|r| matches!(r.last(), Some(Cell::Bool(true))));
        rows && self.summary_pass.unwrap_or(true)
    }

    fn sort_key(&self) -> String {
        self.columns[..self.key_len].join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# schema: {SCHEMA}")?;
        writeln!(w, "# command: {}", self.command)?;
        for (k, v) in &self.params {
            writeln!(w, "# param: {k}={v}")?;
        }
        writeln!(w, "# sorted by: {}", self.sort_key())?;
        {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(&self.columns)?;
            for r in &self.rows {
                c.write_record(r.iter().map(Cell::render))?;
            }
            c.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(w, "# summary: {k}={}", v.render())?;
        }
        if let Some(p) = self.summary_pass {
            writeln!(w, "# summary: pass={p}")?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let s = |x: &str| serde_json::to_string(x).unwrap();
        writeln!(w, "{{")?;
        writeln!(w, "  \"schema\": {},", s(SCHEMA))?;
        writeln!(w, "  \"command\": {},", s(&self.command))?;
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{}: {}", s(k), s(v))).collect();
        writeln!(w, "  \"params\": {{{}}},", params.join(", "))?;
        writeln!(w, "  \"sorted_by\": {},", s(&self.sort_key()))?;
        writeln!(w, "  \"rows\": [")?;
        for (i, r) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self.columns.iter().zip(r).map(|(c, v)| format!("{}: {}", s(c), v.json())).collect();
            let comma = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(w, "    {{{}}}{comma}", fields.join(", "))?;
        }
        writeln!(w, "  ],")?;
        let mut summary: Vec<String> = self.summary.iter().map(|(k, v)| format!("{}: {}", s(k), v.json())).collect();
        if let Some(p) = self.summary_pass {
            summary.push(format!("\"pass\": {p}"));
        }
        writeln!(w, "  \"summary\": {{{}}}", summary.join(", "))?;
        writeln!(w, "}}")?;
        Ok(())
    }
}
