//! Deterministic CSV / JSONL exports.
//!
//! Floats are rounded to 9 significant digits and printed in their shortest
//! round-tripping form, so identical stores always export identical bytes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::BookRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "jsonl" => Ok(ExportFormat::Jsonl),
            other => Err(Error::Config(format!("unknown export format `{other}`"))),
        }
    }
}

macro_rules! export_fields {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum ExportField { $($variant),* }

        impl ExportField {
            pub const ALL: &'static [ExportField] = &[$(ExportField::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(ExportField::$variant => $name),* }
            }
        }
    };
}

export_fields! {
    BookId => "book_id",
    Corpus => "corpus",
    Genre => "genre",
    Rating => "rating",
    Downloads => "downloads",
    ParagraphCount => "paragraph_count",
    MeanNovelty => "mean_novelty",
    Speed => "speed",
    Volume => "volume",
    Circuitousness => "circuitousness",
    Slope => "slope",
    Curve => "curve",
    Sax => "sax",
    Paa => "paa",
    TooShortForPaa => "too_short_for_paa",
    ClusterModel => "cluster_model",
    ClusterIndex => "cluster_index",
    ClusterLabel => "cluster_label",
    Segments => "segments",
    Alphabet => "alphabet",
    Epsilon => "epsilon",
}

impl fmt::Display for ExportField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExportField {
    type Err = Error;

    /// Accepts `mean_novelty`, `mean-novelty` and `mean novelty`.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        ExportField::ALL
            .iter()
            .copied()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::UnknownField(s.to_owned()))
    }
}

impl ExportField {
    pub fn parse_list<S: AsRef<str>>(names: &[S]) -> Result<Vec<ExportField>> {
        if names.is_empty() {
            return Err(Error::Config("field selection is empty".into()));
        }
        names.iter().map(|n| n.as_ref().parse()).collect()
    }

    fn cell(self, r: &BookRecord) -> Cell {
        let d = r.descriptors.as_ref();
        let c = r.cluster.as_ref();
        match self {
            ExportField::BookId => Cell::Str(r.book_id.clone()),
            ExportField::Corpus => Cell::Str(r.corpus.clone()),
            ExportField::Genre => r.genre.clone().map_or(Cell::Null, Cell::Str),
            ExportField::Rating => r.rating.map_or(Cell::Null, Cell::Float),
            ExportField::Downloads => r.downloads.map_or(Cell::Null, Cell::Int),
            ExportField::ParagraphCount => Cell::Int(r.paragraph_count as u64),
            ExportField::MeanNovelty => Cell::Float(r.mean_novelty),
            ExportField::Speed => d.map_or(Cell::Null, |d| Cell::Float(d.speed)),
            ExportField::Volume => d.map_or(Cell::Null, |d| Cell::Float(d.volume)),
            ExportField::Circuitousness => d.and_then(|d| d.circuitousness).map_or(Cell::Null, Cell::Float),
            ExportField::Slope => d.map_or(Cell::Null, |d| Cell::Float(d.slope)),
            ExportField::Curve => d.map_or(Cell::Null, |d| Cell::Str(d.curve.name().to_owned())),
            ExportField::Sax => d.and_then(|d| d.sax.clone()).map_or(Cell::Null, Cell::Str),
            ExportField::Paa => d.and_then(|d| d.paa.clone()).map_or(Cell::Null, Cell::Floats),
            ExportField::TooShortForPaa => Cell::Bool(r.too_short_for_paa),
            ExportField::ClusterModel => c.map_or(Cell::Null, |c| Cell::Str(c.model_id.clone())),
            ExportField::ClusterIndex => c.map_or(Cell::Null, |c| Cell::Int(c.index as u64)),
            ExportField::ClusterLabel => c.map_or(Cell::Null, |c| Cell::Str(c.label.clone())),
            ExportField::Segments => Cell::Int(r.params.segments as u64),
            ExportField::Alphabet => Cell::Int(r.params.alphabet as u64),
            ExportField::Epsilon => Cell::Float(r.params.threshold.epsilon()),
        }
    }
}

enum Cell {
    Str(String),
    Float(f64),
    Floats(Vec<f64>),
    Int(u64),
    Bool(bool),
    Null,
}

fn round9(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.8e}").parse().expect("formatted float parses")
}

/// Formats `v` rounded to 9 significant digits.
pub fn format_float(v: f64) -> String {
    let r = round9(v);
    if r == 0.0 {
        "0".to_owned()
    } else {
        format!("{r}")
    }
}

fn json_float(v: f64) -> Value {
    Number::from_f64(round9(v)).map_or(Value::Null, Value::Number)
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Float(v) => format_float(*v),
            Cell::Floats(vs) => vs.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(";"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Float(v) => json_float(*v),
            Cell::Floats(vs) => Value::Array(vs.iter().map(|v| json_float(*v)).collect()),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
        }
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Writes one row (CSV, after a header) or one object (JSONL) per record.
pub fn export<'a, W: Write>(
    records: impl IntoIterator<Item = &'a BookRecord>,
    format: ExportFormat,
    fields: &[ExportField],
    mut out: W,
) -> Result<()> {
    if fields.is_empty() {
        return Err(Error::Config("field selection is empty".into()));
    }
    match format {
        ExportFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(fields.iter().map(|f| f.name()))?;
            for r in records {
                w.write_record(fields.iter().map(|f| f.cell(r).csv()))?;
            }
            w.flush()?;
        }
        ExportFormat::Jsonl => {
            for r in records {
                let obj: Map<String, Value> = fields.iter().map(|f| (f.name().to_owned(), f.cell(r).json())).collect();
                serde_json::to_writer(&mut out, &obj)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Long-form `(book_id, paragraph_index, novelty)` rows for plotting.
pub fn export_trajectories<'a, W: Write>(
    records: impl IntoIterator<Item = &'a BookRecord>,
    format: ExportFormat,
    mut out: W,
) -> Result<()> {
    match format {
        ExportFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["book_id", "paragraph_index", "novelty"])?;
            for r in records {
                for (i, v) in r.trajectory.iter().enumerate() {
                    w.write_record([r.book_id.as_str(), &i.to_string(), &format_float(*v)])?;
                }
            }
            w.flush()?;
        }
        ExportFormat::Jsonl => {
            for r in records {
                for (i, v) in r.trajectory.iter().enumerate() {
                    let row = serde_json::json!({"book_id": r.book_id, "paragraph_index": i, "novelty": json_float(*v)});
                    serde_json::to_writer(&mut out, &row)?;
                    out.write_all(b"\n")?;
                }
            }
            out.flush()?;
        }
    }
    Ok(())
}
