mod common;

use std::fs;

use novelty_core::clustering::KMeansOptions;
use novelty_core::embedding::MockProvider;
use novelty_core::store::{cluster_store, export, ingest, ExportField, ExportFormat, IngestOptions};
use novelty_core::{Error, Manifest, RecordFilter, Store};

use common::*;

fn mock() -> MockProvider {
    MockProvider { dimension: 48, seed: 1 }
}

fn corpus(n: usize) -> Vec<(String, String, String)> {
    (0..n)
        .map(|i| {
            let corpus = if i % 2 == 0 { "pg19" } else { "books3" };
            (format!("b{i:02}"), corpus.to_owned(), book_text(&format!("b{i}"), 18 + i))
        })
        .collect()
}

#[test]
fn ingests_three_books() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = Manifest::from_path(&write_corpus(dir.path(), &corpus(3))).unwrap();
    let mut store = Store::open(dir.path().join("store")).unwrap();
    let report = ingest(&mut store, &manifest, &mock(), &IngestOptions::default()).unwrap();
    assert_eq!((report.processed, report.failed, report.skipped), (3, 0, 0));

    let r = store.get("b02").unwrap();
    assert_eq!(r.paragraph_count, 20);
    assert_eq!(r.trajectory.len(), 20);
    assert_eq!(r.trajectory[0], 0.5);
    assert!(r.descriptors.as_ref().unwrap().paa.as_ref().is_some_and(|p| p.len() == 16));
    assert!(!r.too_short_for_paa);
}

#[test]
fn missing_text_is_reported_not_raised() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_corpus(dir.path(), &corpus(2));
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("{\"book_id\": \"ghost\", \"text_path\": \"nowhere.txt\", \"corpus\": \"pg19\"}\n");
    fs::write(&path, text).unwrap();

    let manifest = Manifest::from_path(&path).unwrap();
    let mut store = Store::open(dir.path().join("store")).unwrap();
    let report = ingest(&mut store, &manifest, &mock(), &IngestOptions::default()).unwrap();
    assert_eq!((report.processed, report.failed), (2, 1));
    assert_eq!(report.failures[0].book_id, "ghost");
    assert!(!store.contains("ghost"));
}

#[test]
fn empty_and_short_books() {
    let dir = tempfile::tempdir().unwrap();
    let books = vec![
        ("empty".to_owned(), "c".to_owned(), "too short\n\nstill too short".to_owned()),
        ("one".to_owned(), "c".to_owned(), book_text("one", 1)),
        ("few".to_owned(), "c".to_owned(), book_text("few", 6)),
    ];
    let manifest = Manifest::from_path(&write_corpus(dir.path(), &books)).unwrap();
    let mut store = Store::open(dir.path().join("store")).unwrap();
    let report = ingest(&mut store, &manifest, &mock(), &IngestOptions::default()).unwrap();
    assert_eq!((report.processed, report.failed), (2, 1));
    assert!(report.failures[0].error.contains("no paragraphs"));

    let one = store.get("one").unwrap();
    assert_eq!(one.trajectory, vec![0.5]);
    assert!(one.descriptors.is_none() && one.too_short_for_paa);
    let few = store.get("few").unwrap();
    assert!(few.too_short_for_paa && few.descriptors.as_ref().unwrap().sax.is_none());
}

#[test]
fn parallel_and_repeated_ingest_export_identically() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = Manifest::from_path(&write_corpus(dir.path(), &corpus(12))).unwrap();
    let mut outputs = Vec::new();
    for (run, jobs) in [(0, 1), (1, 4), (2, 3)] {
        let store_dir = dir.path().join(format!("store{run}"));
        let mut store = Store::open(&store_dir).unwrap();
        ingest(&mut store, &manifest, &mock(), &IngestOptions { jobs, ..Default::default() }).unwrap();
        drop(store);
        let store = Store::open_read_only(&store_dir).unwrap();
        let mut buf = Vec::new();
        export(store.records(), ExportFormat::Jsonl, ExportField::ALL, &mut buf).unwrap();
        outputs.push(buf);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn skip_existing_leaves_records_alone() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = Manifest::from_path(&write_corpus(dir.path(), &corpus(4))).unwrap();
    let mut store = Store::open(dir.path().join("store")).unwrap();
    ingest(&mut store, &manifest, &mock(), &IngestOptions::default()).unwrap();
    let opts = IngestOptions { skip_existing: true, ..Default::default() };
    let report = ingest(&mut store, &manifest, &mock(), &opts).unwrap();
    assert_eq!((report.processed, report.skipped), (0, 4));
}

#[test]
fn clusters_per_corpus_and_pooled() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = Store::open(dir.path()).unwrap();
    let mut batch = Vec::new();
    for i in 0..40 {
        let corpus = if i < 24 { "pg19" } else { "books3" };
        let slope = [0.3, -0.3, 0.0][i % 3];
        let values: Vec<f64> = (0..32).map(|t| 0.5 + slope * (t as f64 / 31.0 - 0.5) + 0.001 * (i as f64)).collect();
        batch.push(record(&format!("b{i:02}"), corpus, None, &values));
    }
    store.put_all(batch).unwrap();

    let opts = KMeansOptions::new(3, 5);
    let runs = cluster_store(&mut store, &RecordFilter::default(), false, &opts).unwrap();
    let ids: Vec<&str> = runs.iter().map(|r| r.model_id.as_str()).collect();
    assert_eq!(ids, ["books3", "pg19"]);
    assert_eq!(runs[1].members.len(), 24);
    assert!(store.records().all(|r| r.cluster.as_ref().is_some_and(|c| c.model_id == r.corpus)));

    let runs = cluster_store(&mut store, &RecordFilter::default(), true, &opts).unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0].model_id, "unified");
    let total: f64 = runs[0].prevalence().iter().map(|p| p.2).sum();
    assert!((total - 100.0).abs() < 1e-9);
}

#[test]
fn too_few_points_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = Store::open(dir.path()).unwrap();
    let values: Vec<f64> = (0..20).map(|t| t as f64 / 20.0).collect();
    store.put_all((0..3).map(|i| record(&format!("b{i}"), "c", None, &values)).collect()).unwrap();
    let err = cluster_store(&mut store, &RecordFilter::default(), false, &KMeansOptions::new(8, 1)).unwrap_err();
    assert!(matches!(err, Error::TooFewPoints { k: 8, actual: 3 }));
    assert!(store.records().all(|r| r.cluster.is_none()));
}

#[test]
fn second_writer_is_refused_while_readers_proceed() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = Store::open(dir.path()).unwrap();
    store.put(record("a", "c", None, &[0.5, 0.4])).unwrap();
    assert!(matches!(Store::open(dir.path()), Err(Error::StoreLocked { .. })));
    let reader = Store::open_read_only(dir.path()).unwrap();
    assert!(reader.contains("a"));
    drop(store);
    assert!(Store::open(dir.path()).is_ok());
}
