use constrained_qaoa::graph::ProblemKind;
use constrained_qaoa::harness::{
    ensemble_stats, fit_summary, read_records, read_summary, run_experiment, Ansatz, ExperimentConfig, RoundsToTarget,
    XAxis, RECORDS_FILE, SUMMARY_FILE,
};
use constrained_qaoa::qaoa::Variant;

fn config() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(vec![ProblemKind::DensestSubgraph], vec![4, 6, 8, 10], vec![Variant::GROVER_TH], 3);
    c.instances_per_n = 4;
    c.exhaustive_n4 = false;
    c.targets = vec![0.9];
    c
}

#[test]
fn summary_agrees_with_records_and_refits_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config();
    let outcome = run_experiment(&cfg, dir.path(), 1).unwrap();
    assert_eq!(outcome.records.len(), 16);
    let records = read_records(&dir.path().join(RECORDS_FILE)).unwrap();
    assert_eq!(records, outcome.records);
    for row in &outcome.summary {
        let reached: Vec<f64> = records
            .iter()
            .filter(|r| r.n == row.n)
            .filter_map(|r| r.outcome(row.target).and_then(RoundsToTarget::reached))
            .map(|p| p as f64)
            .collect();
        if let Ok(stats) = ensemble_stats(&reached) {
            assert_eq!(stats.mean, row.mean);
            assert_eq!(stats.stddev, row.stddev);
        }
        assert_eq!(row.count + row.capped, 4);
        assert_eq!(row.config_hash, cfg.hash());
    }
    let persisted = read_summary(&dir.path().join(SUMMARY_FILE)).unwrap();
    let a = fit_summary(&outcome.summary, ProblemKind::DensestSubgraph, Variant::GROVER_TH, 0.9, Ansatz::Monomial, XAxis::Dim).unwrap();
    let b = fit_summary(&persisted, ProblemKind::DensestSubgraph, Variant::GROVER_TH, 0.9, Ansatz::Monomial, XAxis::Dim).unwrap();
    assert_eq!(a, b);
    assert!(a.fit.params.iter().all(|v| v.is_finite()));
}

#[test]
fn seeds_change_the_ensemble_but_not_its_shape() {
    let a = config();
    let mut b = config();
    b.master_seed = 4;
    assert_ne!(a.hash(), b.hash());
    let ea = a.ensemble(ProblemKind::DensestSubgraph, 8).unwrap();
    let eb = b.ensemble(ProblemKind::DensestSubgraph, 8).unwrap();
    assert_eq!(ea.len(), eb.len());
    assert!(ea.iter().zip(&eb).any(|(x, y)| x.instance.graph() != y.instance.graph()));
    assert_eq!(a.ensemble(ProblemKind::DensestSubgraph, 8).unwrap().len(), 4);
}
