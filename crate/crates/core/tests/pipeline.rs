use std::fs;
use std::path::Path;

use polarscope::ingest::write_records_csv;
use polarscope::report::{run_pipeline, PipelineConfig, ReportError, Stage, REPORT_FILE};
use polarscope::synthetic::{polarized_dataset, PolarizedConfig};

fn fixture(dir: &Path) -> PipelineConfig {
    let data = polarized_dataset(&PolarizedConfig {
        tweets_per_camp: 200,
        ..PolarizedConfig::default()
    });
    let input = dir.join("tweets.csv");
    let mut buf = Vec::new();
    write_records_csv(&data.records, &mut buf).unwrap();
    fs::write(&input, buf).unwrap();
    let mut cfg = PipelineConfig::new(vec![input], data.camps.camps, 11);
    cfg.lda.topics = 3;
    cfg.lda.iters = 200;
    cfg.lda.burn_in = 50;
    cfg.output_dir = dir.join("out");
    cfg
}

#[test]
fn full_run_populates_every_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    let report = run_pipeline(&cfg).unwrap();

    assert_eq!(report.ingest.parsed, 400);
    assert_eq!(report.ingest.skipped, 0);
    assert_eq!(report.camps.len(), 2);
    for camp in &report.camps {
        assert_eq!(camp.tweets_matched, 200);
        assert!(camp.tweets_analyzed <= camp.tweets_matched);
        assert_eq!(camp.documents, camp.tweets_analyzed);
        assert_eq!(camp.interactions_by_kind.values().sum::<usize>(), camp.interactions);
        assert_eq!(camp.topics.as_ref().unwrap().topics.len(), 3);
        assert!(camp.network.is_some());
        assert_eq!(camp.series.windows, 10);
        assert!(camp.textnet.terms > 0);
        for f in &camp.files {
            assert!(cfg.output_dir.join(f).is_file(), "{f}");
        }
    }
    let combined = report.combined.as_ref().unwrap();
    assert!(combined.cross_camp_edges < combined.edges);
    assert!(combined.camp_recovery_accuracy.unwrap() > 0.9);

    let bytes = fs::read(cfg.output_dir.join(REPORT_FILE)).unwrap();
    let mut expected = serde_json::to_vec_pretty(&report).unwrap();
    expected.push(b'\n');
    assert_eq!(bytes, expected);
    let written: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert!(written["config"].get("output_dir").is_none());
    let series = fs::read_to_string(cfg.output_dir.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 21);
}

#[test]
fn missing_stoplist_fails_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fixture(dir.path());
    cfg.stoplist = Some(dir.path().join("nope.txt"));
    cfg.lda.topics = 0;
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(err.is_validation());
    let ReportError::Config(problems) = &err else { unreachable!() };
    assert_eq!(problems.len(), 2, "{problems:?}");
    assert!(err.to_string().contains("stoplist file"));
    assert!(!cfg.output_dir.exists());
}

#[test]
fn malformed_input_names_ingest_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    fs::write(&cfg.inputs[0], "id,who\n1,a\n").unwrap();
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, ReportError::Stage { stage: Stage::Ingest, .. }), "{err}");
    assert!(err.to_string().starts_with("ingest stage failed"));
    assert!(!cfg.output_dir.exists());
}

#[test]
fn write_failure_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fixture(dir.path());
    let blocker = dir.path().join("out");
    fs::create_dir(&blocker).unwrap();
    // A file where the `pro` directory should go.
    fs::write(blocker.join("pro"), "").unwrap();
    cfg.output_dir = blocker.clone();
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, ReportError::Stage { stage: Stage::Write, .. }), "{err}");
    let left: Vec<_> = fs::read_dir(&blocker).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, ["pro"]);
}
