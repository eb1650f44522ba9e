//! Experiment reports and their byte-stable JSON/CSV encodings.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    LessThan,
}

/// One checked inequality `measured <= bound + tolerance` (or strict `<`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub description: String,
    pub paper_anchor: String,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Record {
    pub fn at_most(
        description: impl Into<String>,
        anchor: &str,
        measured: f64,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            description: description.into(),
            paper_anchor: anchor.to_string(),
            measured,
            bound,
            tolerance,
            relation: Relation::AtMost,
            pass: measured <= bound + tolerance,
        }
    }

    pub fn less_than(
        description: impl Into<String>,
        anchor: &str,
        measured: f64,
        bound: f64,
    ) -> Self {
        Self {
            description: description.into(),
            paper_anchor: anchor.to_string(),
            measured,
            bound,
            tolerance: 0.0,
            relation: Relation::LessThan,
            pass: measured < bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub version: String,
    pub records: Vec<Record>,
    pub tables: BTreeMap<String, Table>,
    /// Table written by the CSV encoding; the records when absent.
    pub primary_table: Option<String>,
    pub pass: bool,
    /// Set by the runner; never serialized.
    #[serde(skip)]
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn empty(command: &str, config: Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            records: Vec::new(),
            tables: BTreeMap::new(),
            primary_table: None,
            pass: true,
            wall_time_seconds: 0.0,
        }
    }

    pub fn push(&mut self, record: Record) {
        self.pass &= record.pass;
        self.records.push(record);
    }

    pub fn add_table(&mut self, name: &str, table: Table, primary: bool) {
        if primary {
            self.primary_table = Some(name.to_string());
        }
        self.tables.insert(name.to_string(), table);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }
}

/// `printf("%.17g")`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (16 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON with `%.17g` floats.
struct G17Formatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Sorted keys, `%.17g` floats, non-finite floats as `null`.
pub fn to_json_string(value: &impl Serialize) -> Result<String> {
    let value = serde_json::to_value(value).map_err(|e| crate::Error::Io(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        G17Formatter {
            inner: PrettyFormatter::new(),
        },
    );
    value
        .serialize(&mut ser)
        .map_err(|e| crate::Error::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn emit_json(report: &Report, mut out: impl Write) -> Result<()> {
    out.write_all(to_json_string(report)?.as_bytes())?;
    Ok(())
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::UInt(v) => v.to_string(),
        Cell::Float(v) if v.is_finite() => format_g17(*v),
        Cell::Float(_) | Cell::Empty => String::new(),
        Cell::Text(s) => s.clone(),
    }
}

/// The primary table, or the records when the report has none.
pub fn emit_csv(report: &Report, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| crate::Error::Io(e.to_string());
    match report
        .primary_table
        .as_ref()
        .and_then(|name| report.tables.get(name))
    {
        Some(table) => {
            w.write_record(&table.columns).map_err(io_err)?;
            for row in &table.rows {
                w.write_record(row.iter().map(cell_text)).map_err(io_err)?;
            }
        }
        None => {
            w.write_record([
                "description",
                "paper_anchor",
                "measured",
                "bound",
                "tolerance",
                "relation",
                "pass",
            ])
            .map_err(io_err)?;
            for r in &report.records {
                let relation = match r.relation {
                    Relation::AtMost => "<=",
                    Relation::LessThan => "<",
                };
                w.write_record([
                    r.description.clone(),
                    r.paper_anchor.clone(),
                    cell_text(&Cell::Float(r.measured)),
                    cell_text(&Cell::Float(r.bound)),
                    cell_text(&Cell::Float(r.tolerance)),
                    relation.to_string(),
                    r.pass.to_string(),
                ])
                .map_err(io_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (3.0f64.sqrt(), "1.7320508075688772"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789012345678.0, "1.2345678901234568e+17"),
            (1e16, "10000000000000000"),
            (-2.5, "-2.5"),
            (0.0001, "0.0001"),
            (1e300, "1.0000000000000001e+300"),
            (5e-324, "4.9406564584124654e-324"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::empty("psd", Value::Null);
        let s = to_json_string(&r).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["records"], Value::Array(vec![]));
        assert_eq!(v["pass"], Value::Bool(true));
        assert!(v.get("wall_time_seconds").is_none());
    }

    #[test]
    fn non_finite_becomes_null() {
        let mut r = Report::empty("psd", Value::Null);
        r.push(Record::at_most(
            "x",
            "kernel-positivity",
            f64::NAN,
            1.0,
            0.0,
        ));
        let v: Value = serde_json::from_str(&to_json_string(&r).unwrap()).unwrap();
        assert_eq!(v["records"][0]["measured"], Value::Null);
        assert_eq!(v["pass"], Value::Bool(false));
    }

    #[test]
    fn csv_falls_back_to_records() {
        let mut r = Report::empty("psd", Value::Null);
        r.push(Record::at_most("x", "kernel-positivity", 0.5, 1.0, 0.0));
        let mut out = Vec::new();
        emit_csv(&r, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "x,kernel-positivity,0.5,1,0,<=,true"
        );
    }
}
