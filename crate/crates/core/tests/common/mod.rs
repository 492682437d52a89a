//! Independent reference computations and fixtures shared by the
//! integration tests. Nothing here calls the code under test to compute an
//! expected value.

#![allow(dead_code)]

use std::fs;
use std::path::Path;

use novelty_core::descriptors::{describe, DescriptorParams};
use novelty_core::store::storage_precision;
use novelty_core::BookRecord;

/// Novelty with every prefix mean recomputed from scratch.
pub fn brute_force_novelty(embeddings: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(embeddings.len());
    out.push(0.5);
    let d = embeddings.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; d];
    for i in 1..embeddings.len() {
        mean.iter_mut().for_each(|m| *m = 0.0);
        for e in &embeddings[..i] {
            for (m, v) in mean.iter_mut().zip(e) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= i as f64;
        }
        let e = &embeddings[i];
        let dot: f64 = e.iter().zip(&mean).map(|(a, b)| a * b).sum();
        let ne = e.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nm = mean.iter().map(|a| a * a).sum::<f64>().sqrt();
        out.push(1.0 - (dot / (ne * nm)).clamp(-1.0, 1.0));
    }
    out
}

/// Standard normal quantile: Simpson quadrature of the density, inverted
/// by bisection.
pub fn normal_quantile(p: f64) -> f64 {
    let cdf = |x: f64| {
        let steps = 20_000;
        let lo = -12.0;
        let h = (x - lo) / steps as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = pdf(lo) + pdf(x);
        for k in 1..steps {
            s += pdf(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Covariance over the product of standard deviations.
pub fn definitional_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
    let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / n).sqrt();
    cov / (sx * sy)
}

/// Correlation of the residuals after regressing x and y on z.
pub fn residual_partial(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let mz = z.iter().sum::<f64>() / n;
    let szz = z.iter().map(|a| (a - mz).powi(2)).sum::<f64>();
    let residuals = |v: &[f64]| -> Vec<f64> {
        let mv = v.iter().sum::<f64>() / n;
        let beta = z.iter().zip(v).map(|(a, b)| (a - mz) * (b - mv)).sum::<f64>() / szz;
        v.iter().zip(z).map(|(b, a)| b - mv - beta * (a - mz)).collect()
    };
    definitional_pearson(&residuals(x), &residuals(y))
}

/// A record built straight from a trajectory, bypassing embedding.
pub fn record(id: &str, corpus: &str, genre: Option<&str>, values: &[f64]) -> BookRecord {
    let params = DescriptorParams::default();
    let descriptors = (values.len() >= 2).then(|| describe(values, &params).unwrap());
    BookRecord {
        book_id: id.into(),
        corpus: corpus.into(),
        genre: genre.map(Into::into),
        rating: None,
        downloads: None,
        paragraph_count: values.len(),
        mean_novelty: values.iter().sum::<f64>() / values.len() as f64,
        trajectory: storage_precision(values),
        too_short_for_paa: descriptors.as_ref().is_none_or(|d| d.paa.is_none()),
        descriptors,
        cluster: None,
        params,
    }
}

/// Text with `paragraphs` distinct paragraphs of six words each.
pub fn book_text(tag: &str, paragraphs: usize) -> String {
    (0..paragraphs)
        .map(|i| format!("{tag} paragraph {i} has enough words"))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Writes `<dir>/<id>.txt` for each `(id, corpus, text)` and a manifest
/// referencing them; returns the manifest path.
pub fn write_corpus(dir: &Path, books: &[(String, String, String)]) -> std::path::PathBuf {
    let mut manifest = String::new();
    for (id, corpus, text) in books {
        fs::write(dir.join(format!("{id}.txt")), text).unwrap();
        manifest.push_str(&format!(
            "{{\"book_id\": \"{id}\", \"text_path\": \"{id}.txt\", \"corpus\": \"{corpus}\"}}\n"
        ));
    }
    let path = dir.join("manifest.jsonl");
    fs::write(&path, manifest).unwrap();
    path
}
