use mcc_cover::harness::{graph_stream, random_graph, run_experiment, sample_density, ExperimentConfig};
use mcc_cover::build_h;

#[test]
fn density_mean_is_centred() {
    let mut rng = graph_stream(2024, 0);
    let n = 100_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let d = sample_density(0.3, &mut rng);
        assert!(d > 0.0 && d <= 1.0);
        sum += d;
    }
    let mean = sum / n as f64;
    assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
}

#[test]
fn edge_count_mean_matches_binomial() {
    let mut total = 0usize;
    for i in 0..1000 {
        let mut rng = graph_stream(99, i);
        total += random_graph(4, 0.5, &mut rng).edge_count();
    }
    let mean = total as f64 / 1000.0;
    assert!((mean - 60.0).abs() <= 3.0, "mean {mean}");
}

#[test]
fn failure_bookkeeping_matches_records() {
    let h = build_h(3, false).unwrap();
    let mut cfg = ExperimentConfig::new(3, 300, 0.5, 5);
    cfg.workers = 2;
    let report = run_experiment(&cfg, &h).unwrap();
    assert!(report.n2 <= report.n1);
    let failures: Vec<f64> = report
        .records
        .iter()
        .filter(|r| !r.is_edgeless() && r.stage1_failed())
        .map(|r| r.density)
        .collect();
    assert_eq!(report.d1, failures);
    assert_eq!(report.n1 as usize, report.d1.len());
    assert_eq!(report.tested() + report.skipped_edgeless, 300);
    for r in &report.records {
        if r.result.is_applicable() {
            assert_eq!(r.agree, Some(true));
        }
    }
    let mut seq = cfg.clone();
    seq.workers = 1;
    let again = run_experiment(&seq, &h).unwrap();
    let strip = |rs: &[mcc_cover::harness::GraphRecord]| {
        rs.iter().map(|r| (r.index, r.density, r.result.clone(), r.agree, r.t2_agree)).collect::<Vec<_>>()
    };
    assert_eq!(strip(&again.records), strip(&report.records));
    assert_eq!((again.n1, again.n2, &again.d1, &again.d2), (report.n1, report.n2, &report.d1, &report.d2));
}
