use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Decimal text of `x` with 17 significant digits; parses back to the same
/// bits.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// A CSV table with a fixed header. Cells are stored as text; numeric cells
/// are written with [`fmt17`].
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// One cell of a row under construction.
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Num(x) => fmt17(x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s,
        }
    }
}

impl Table {
    /// Table with the comma-separated `header`.
    pub fn new(header: &str) -> Self {
        Table { header: header.split(',').map(str::to_string).collect(), rows: Vec::new() }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Table { header: columns, rows: Vec::new() }
    }

    pub fn header_line(&self) -> String {
        self.header.join(",")
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.header.len(), "row width must match the header");
        self.rows.push(cells.into_iter().map(Cell::render).collect());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric value of a cell.
    pub fn value(&self, row: usize, name: &str) -> Result<f64> {
        let c = self.column(name).ok_or_else(|| Error::InvalidConfig(format!("no column {name}")))?;
        let text = &self.rows[row][c];
        text.parse().map_err(|_| Error::InvalidConfig(format!("cell {text:?} in column {name} is not a number")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header_line();
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Table> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::InvalidConfig("empty CSV".into()))?;
        let header: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let row: Vec<String> = l.split(',').map(str::to_string).collect();
            if row.len() != header.len() {
                return Err(Error::InvalidConfig(format!(
                    "CSV row {} has {} cells, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Table> {
        Table::parse(&fs::read_to_string(path)?)
    }
}
