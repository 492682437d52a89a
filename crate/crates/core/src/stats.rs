//! Corpus aggregation and correlation analysis.
//!
//! Corpus means weight every book equally. Undefined circuitousness values
//! are excluded from the mean and counted separately.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::clustering::ArchetypePrototype;
use crate::descriptors::CurveClass;
use crate::error::{Error, Result};
use crate::store::{format_float, BookRecord, RecordFilter};

/// |r| at or above this counts as a perfectly correlated control.
const DEGENERATE_R: f64 = 1.0 - 1e-12;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooShort { needed: 2, actual: x.len() });
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::ZeroVariance);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Correlation of `x` and `y` with the linear effect of `z` removed.
pub fn partial_correlation(x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if z.len() != x.len() {
        return Err(Error::LengthMismatch(x.len(), z.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooShort { needed: 3, actual: x.len() });
    }
    let rxy = pearson(x, y)?;
    let rxz = pearson(x, z)?;
    let ryz = pearson(y, z)?;
    if rxz.abs() >= DEGENERATE_R || ryz.abs() >= DEGENERATE_R {
        return Err(Error::DegenerateControl);
    }
    Ok(((rxy - rxz * ryz) / ((1.0 - rxz * rxz) * (1.0 - ryz * ryz)).sqrt()).clamp(-1.0, 1.0))
}

/// Numeric record attributes usable in correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericField {
    MeanNovelty,
    Speed,
    Volume,
    Circuitousness,
    Slope,
    Rating,
    Downloads,
    ParagraphCount,
}

impl std::str::FromStr for NumericField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace([' ', '-'], "_").as_str() {
            "mean_novelty" | "novelty" => NumericField::MeanNovelty,
            "speed" => NumericField::Speed,
            "volume" => NumericField::Volume,
            "circuitousness" => NumericField::Circuitousness,
            "slope" => NumericField::Slope,
            "rating" => NumericField::Rating,
            "downloads" => NumericField::Downloads,
            "paragraph_count" | "paragraphs" => NumericField::ParagraphCount,
            _ => return Err(Error::UnknownField(s.to_owned())),
        })
    }
}

impl NumericField {
    pub fn value(self, r: &BookRecord) -> Option<f64> {
        let d = r.descriptors.as_ref();
        match self {
            NumericField::MeanNovelty => Some(r.mean_novelty),
            NumericField::Speed => d.map(|d| d.speed),
            NumericField::Volume => d.map(|d| d.volume),
            NumericField::Circuitousness => d.and_then(|d| d.circuitousness),
            NumericField::Slope => d.map(|d| d.slope),
            NumericField::Rating => r.rating,
            NumericField::Downloads => r.downloads.map(|v| v as f64),
            NumericField::ParagraphCount => Some(r.paragraph_count as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub usable: usize,
    pub skipped: usize,
    pub r: f64,
    /// Present when a control variable was given.
    pub partial_r: Option<f64>,
}

/// Correlates two record fields, optionally controlling for a third.
/// Records missing any of the fields are skipped and counted.
pub fn correlate_records<'a>(
    records: impl IntoIterator<Item = &'a BookRecord>,
    x: NumericField,
    y: NumericField,
    control: Option<NumericField>,
) -> Result<CorrelationReport> {
    let (mut xs, mut ys, mut zs) = (Vec::new(), Vec::new(), Vec::new());
    let mut skipped = 0;
    for r in records {
        let z = match control {
            Some(c) => c.value(r).map(Some),
            None => Some(None),
        };
        match (x.value(r), y.value(r), z) {
            (Some(a), Some(b), Some(c)) => {
                xs.push(a);
                ys.push(b);
                zs.extend(c);
            }
            _ => skipped += 1,
        }
    }
    if xs.is_empty() {
        return Err(Error::EmptySelection);
    }
    let r = pearson(&xs, &ys)?;
    let partial_r = match control {
        Some(_) => Some(partial_correlation(&xs, &ys, &zs)?),
        None => None,
    };
    Ok(CorrelationReport { usable: xs.len(), skipped, r, partial_r })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveDistribution {
    #[serde(rename = "Red")]
    pub red: f64,
    #[serde(rename = "Blue")]
    pub blue: f64,
    #[serde(rename = "Green")]
    pub green: f64,
}

impl CurveDistribution {
    pub fn get(&self, c: CurveClass) -> f64 {
        match c {
            CurveClass::Red => self.red,
            CurveClass::Blue => self.blue,
            CurveClass::Green => self.green,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prevalence {
    pub label: String,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub label: String,
    pub books: usize,
    pub mean_novelty: f64,
    /// Books with descriptors (two or more paragraphs).
    pub described_books: usize,
    pub mean_speed: Option<f64>,
    pub mean_volume: Option<f64>,
    pub mean_circuitousness: Option<f64>,
    pub circuitousness_undefined: usize,
    /// Percent of described books per curve class.
    pub curves: CurveDistribution,
    pub clustered_books: usize,
    /// Percent of clustered books per cluster label.
    pub clusters: Vec<Prevalence>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub genres: BTreeMap<String, CorpusSummary>,
}

fn optional_mean(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        None
    } else {
        Some(mean(v))
    }
}

fn cluster_order(label: &str) -> (usize, &str) {
    let rank = ArchetypePrototype::ALL
        .iter()
        .position(|p| p.name() == label)
        .unwrap_or(ArchetypePrototype::ALL.len());
    (rank, label)
}

fn summarize(label: String, records: &[&BookRecord]) -> CorpusSummary {
    let mut novelty: Vec<f64> = Vec::new();
    let (mut speed, mut volume, mut circ) = (Vec::new(), Vec::new(), Vec::new());
    let mut undefined = 0;
    let mut curve_counts = [0usize; 3];
    let mut cluster_counts: BTreeMap<&str, usize> = BTreeMap::new();

    // Sort by id so the summation order, and thus every bit of the result,
    // is independent of input order.
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.book_id.cmp(&b.book_id));
    for r in &sorted {
        novelty.push(r.mean_novelty);
        if let Some(d) = &r.descriptors {
            speed.push(d.speed);
            volume.push(d.volume);
            match d.circuitousness {
                Some(c) => circ.push(c),
                None => undefined += 1,
            }
            curve_counts[CurveClass::ALL.iter().position(|&c| c == d.curve).unwrap()] += 1;
        }
        if let Some(c) = &r.cluster {
            *cluster_counts.entry(c.label.as_str()).or_default() += 1;
        }
    }

    let described = speed.len();
    let pct = |count: usize, total: usize| if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
    let clustered: usize = cluster_counts.values().sum();
    let mut clusters: Vec<Prevalence> = cluster_counts
        .iter()
        .map(|(l, &c)| Prevalence { label: (*l).to_owned(), count: c, percent: pct(c, clustered) })
        .collect();
    clusters.sort_by(|a, b| cluster_order(&a.label).cmp(&cluster_order(&b.label)));

    CorpusSummary {
        label,
        books: sorted.len(),
        mean_novelty: mean(&novelty),
        described_books: described,
        mean_speed: optional_mean(&speed),
        mean_volume: optional_mean(&volume),
        mean_circuitousness: optional_mean(&circ),
        circuitousness_undefined: undefined,
        curves: CurveDistribution {
            red: pct(curve_counts[0], described),
            blue: pct(curve_counts[1], described),
            green: pct(curve_counts[2], described),
        },
        clustered_books: clustered,
        clusters,
        genres: BTreeMap::new(),
    }
}

/// Summarizes the records selected by `filter`, with per-genre breakdowns.
pub fn summarize_corpus<'a>(
    records: impl IntoIterator<Item = &'a BookRecord>,
    filter: &RecordFilter,
) -> Result<CorpusSummary> {
    let selected: Vec<&BookRecord> = records.into_iter().filter(|r| filter.matches(r)).collect();
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut by_genre: BTreeMap<&str, Vec<&BookRecord>> = BTreeMap::new();
    for r in &selected {
        if let Some(g) = &r.genre {
            by_genre.entry(g.as_str()).or_default().push(r);
        }
    }
    let mut summary = summarize(filter.describe(), &selected);
    summary.genres = by_genre.into_iter().map(|(g, rs)| (g.to_owned(), summarize(g.to_owned(), &rs))).collect();
    Ok(summary)
}

/// `(b - a) / a * 100`; `None` when `a` is zero or either side is missing.
pub fn delta_percent(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if a != 0.0 => Some((b - a) / a * 100.0),
        _ => None,
    }
}

/// `a / b`; `None` unless `b > 0`.
pub fn ratio(a: f64, b: f64) -> Option<f64> {
    (b > 0.0).then(|| a / b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub statistic: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub delta_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub category: String,
    pub a_percent: f64,
    pub b_percent: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub a: CorpusSummary,
    pub b: CorpusSummary,
    pub statistics: Vec<DeltaRow>,
    /// Mean novelty per genre present in both corpora.
    pub genres: Vec<DeltaRow>,
    pub curves: Vec<RatioRow>,
    pub clusters: Vec<RatioRow>,
}

fn delta_row(name: &str, a: Option<f64>, b: Option<f64>) -> DeltaRow {
    DeltaRow { statistic: name.to_owned(), a, b, delta_percent: delta_percent(a, b) }
}

pub fn compare_corpora(a: &CorpusSummary, b: &CorpusSummary) -> ComparisonReport {
    let statistics = vec![
        delta_row("mean_novelty", Some(a.mean_novelty), Some(b.mean_novelty)),
        delta_row("mean_speed", a.mean_speed, b.mean_speed),
        delta_row("mean_volume", a.mean_volume, b.mean_volume),
        delta_row("mean_circuitousness", a.mean_circuitousness, b.mean_circuitousness),
    ];
    let genres = a
        .genres
        .iter()
        .filter_map(|(g, sa)| b.genres.get(g).map(|sb| delta_row(g, Some(sa.mean_novelty), Some(sb.mean_novelty))))
        .collect();
    let curves = CurveClass::ALL
        .iter()
        .map(|&c| {
            let (pa, pb) = (a.curves.get(c), b.curves.get(c));
            RatioRow { category: c.name().to_owned(), a_percent: pa, b_percent: pb, ratio: ratio(pa, pb) }
        })
        .collect();

    let mut labels: Vec<&str> = a.clusters.iter().chain(&b.clusters).map(|p| p.label.as_str()).collect();
    labels.sort_by_key(|l| cluster_order(l));
    labels.dedup();
    let pct_of = |s: &CorpusSummary, l: &str| s.clusters.iter().find(|p| p.label == l).map_or(0.0, |p| p.percent);
    let clusters = labels
        .into_iter()
        .map(|l| {
            let (pa, pb) = (pct_of(a, l), pct_of(b, l));
            RatioRow { category: l.to_owned(), a_percent: pa, b_percent: pb, ratio: ratio(pa, pb) }
        })
        .collect();

    ComparisonReport { a: a.clone(), b: b.clone(), statistics, genres, curves, clusters }
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:.decimals$}"))
}

fn signed_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:+.1}%"))
}

impl CorpusSummary {
    /// Human-readable tables: percentages to 1 decimal.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Corpus: {}", self.label);
        let _ = writeln!(s, "  Books analyzed        {}", self.books);
        let _ = writeln!(s, "  Mean novelty          {:.3}", self.mean_novelty);
        let _ = writeln!(s, "  Mean speed            {}", opt(self.mean_speed, 3));
        let _ = writeln!(s, "  Mean volume           {}", opt(self.mean_volume, 3));
        let _ = writeln!(
            s,
            "  Mean circuitousness   {} ({} undefined)",
            opt(self.mean_circuitousness, 1),
            self.circuitousness_undefined
        );
        let _ = writeln!(s, "Curve types (% of {} books)", self.described_books);
        for c in CurveClass::ALL {
            let _ = writeln!(s, "  {:<20}  {:.1}%", c.name(), self.curves.get(c));
        }
        if !self.clusters.is_empty() {
            let _ = writeln!(s, "Clusters (% of {} books)", self.clustered_books);
            for p in &self.clusters {
                let _ = writeln!(s, "  {:<20}  {:.1}%", p.label, p.percent);
            }
        }
        if !self.genres.is_empty() {
            let _ = writeln!(s, "Mean novelty by genre");
            for (g, sub) in &self.genres {
                let _ = writeln!(s, "  {:<20}  {:.3}  ({} books)", g, sub.mean_novelty, sub.books);
            }
        }
        s
    }

    /// One `statistic,value` row per statistic, full precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["statistic", "value"])?;
        let f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        let mut rows: Vec<(String, String)> = vec![
            ("books".into(), self.books.to_string()),
            ("mean_novelty".into(), format_float(self.mean_novelty)),
            ("described_books".into(), self.described_books.to_string()),
            ("mean_speed".into(), f(self.mean_speed)),
            ("mean_volume".into(), f(self.mean_volume)),
            ("mean_circuitousness".into(), f(self.mean_circuitousness)),
            ("circuitousness_undefined".into(), self.circuitousness_undefined.to_string()),
        ];
        for c in CurveClass::ALL {
            rows.push((format!("curve_pct:{}", c.name()), format_float(self.curves.get(c))));
        }
        rows.push(("clustered_books".into(), self.clustered_books.to_string()));
        for p in &self.clusters {
            rows.push((format!("cluster_pct:{}", p.label), format_float(p.percent)));
        }
        for (g, sub) in &self.genres {
            rows.push((format!("genre_books:{g}"), sub.books.to_string()));
            rows.push((format!("genre_mean_novelty:{g}"), format_float(sub.mean_novelty)));
        }
        for (k, v) in rows {
            w.write_record([k, v])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl ComparisonReport {
    /// Human-readable tables: percentages to 1 decimal, ratios to 2.
    pub fn render(&self) -> String {
        let (la, lb) = (&self.a.label, &self.b.label);
        let mut s = String::new();
        let _ = writeln!(s, "{:<24}{:>12}{:>12}{:>10}", "Statistic", la, lb, "Delta");
        for row in &self.statistics {
            let decimals = if row.statistic == "mean_circuitousness" { 1 } else { 3 };
            let _ = writeln!(
                s,
                "{:<24}{:>12}{:>12}{:>10}",
                row.statistic,
                opt(row.a, decimals),
                opt(row.b, decimals),
                signed_pct(row.delta_percent)
            );
        }
        if !self.genres.is_empty() {
            let _ = writeln!(s, "\n{:<24}{:>12}{:>12}{:>10}", "Genre", la, lb, "Delta");
            for row in &self.genres {
                let _ = writeln!(
                    s,
                    "{:<24}{:>12}{:>12}{:>10}",
                    row.statistic,
                    opt(row.a, 3),
                    opt(row.b, 3),
                    signed_pct(row.delta_percent)
                );
            }
        }
        let ratio_header = format!("Ratio ({la}/{lb})");
        let _ = writeln!(s, "\n{:<24}{:>12}{:>12}{:>20}", "Curve type", la, lb, ratio_header);
        for row in &self.curves {
            let _ = writeln!(
                s,
                "{:<24}{:>11.1}%{:>11.1}%{:>20}",
                row.category,
                row.a_percent,
                row.b_percent,
                opt(row.ratio, 2)
            );
        }
        if !self.clusters.is_empty() {
            let _ = writeln!(s, "\n{:<24}{:>12}{:>12}{:>20}", "Cluster archetype", la, lb, ratio_header);
            for row in &self.clusters {
                let _ = writeln!(
                    s,
                    "{:<24}{:>11.1}%{:>11.1}%{:>20}",
                    row.category,
                    row.a_percent,
                    row.b_percent,
                    opt(row.ratio, 2)
                );
            }
        }
        s
    }

    /// Rows of `section,name,a,b,delta_percent,ratio`, full precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["section", "name", "a", "b", "delta_percent", "ratio"])?;
        let f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        for (section, rows) in [("statistic", &self.statistics), ("genre_mean_novelty", &self.genres)] {
            for r in rows {
                w.write_record([section, &r.statistic, &f(r.a), &f(r.b), &f(r.delta_percent), ""])?;
            }
        }
        for (section, rows) in [("curve_pct", &self.curves), ("cluster_pct", &self.clusters)] {
            for r in rows {
                w.write_record([
                    section,
                    &r.category,
                    &format_float(r.a_percent),
                    &format_float(r.b_percent),
                    "",
                    &f(r.ratio),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
