//! Runs every acceptance criterion at full scale and prints one line each.
//! Thresholds are pinned here and compared against what the suite used.

use etl::runner::suite::{run_criterion, Relation, Suite};

/// `(criterion, check label, relation, threshold)`.
const PINNED: &[(usize, &str, Relation, f64)] = &[
    (1, "deviation", Relation::Le, 0.02),
    (1, "|discrete − 1/2|", Relation::Le, 0.02),
    (1, "|continuous − 1/2|", Relation::Le, 0.02),
    (2, "deviation", Relation::Le, 0.03),
    (3, "constancy spread", Relation::Le, 0.03),
    (3, "deviation", Relation::Le, 0.02),
    (3, "|continuous|", Relation::Le, 0.01),
    (4, "increment ratio", Relation::Le, 1.0),
    (4, "|tail − Cesàro|", Relation::Le, 1e-3),
    (5, "tail max ‖∫f_n‖", Relation::Le, 0.01),
    (5, "|∫limsup‖f_n‖ − 1|", Relation::Le, 1e-9),
    (5, "margin", Relation::Ge, 0.98),
    (6, "final level", Relation::Le, 0.02),
    (6, "|continuous|", Relation::Le, 0.01),
    (7, "|∫D(S_t)dt − 1/2|", Relation::Le, 0.005),
    (7, "|D(S) − 1/2|", Relation::Le, 0.005),
    (7, "dilate spread", Relation::Le, 0.02),
    (7, "|D − 1/3|", Relation::Le, 0.02),
    (8, "frequencies", Relation::Ge, 48.0),
    (8, "max discrepancy", Relation::Le, 0.05),
    (9, "idempotence", Relation::Le, 1e-9),
    (9, "lattice invariance", Relation::Le, 1e-9),
    (9, "base discrepancy", Relation::Le, 0.05),
    (10, "‖limit‖₁", Relation::Le, 0.02),
    (10, "deviation", Relation::Le, 0.03),
    (11, "liminf proxy", Relation::Ge, 0.005),
    (11, "quadrature oracle", Relation::Ge, 0.01),
    (12, "KS distance", Relation::Le, 0.02),
    (12, "flagged fraction", Relation::Le, 1e-4),
    (13, "report.json identical for 1 and 4 workers", Relation::Ge, 1.0),
    (13, "series.csv identical for 1 and 4 workers", Relation::Ge, 1.0),
];

/// Criteria whose run must end with a particular status.
const STATUS_CHECKS: &[(usize, usize)] = &[(1, 1), (2, 1), (3, 1), (4, 2), (6, 1), (7, 2), (10, 1)];

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for id in 1..=13 {
        let r = run_criterion(id, Suite::Acceptance, 0).expect("known criterion");
        let mut ok = r.error.is_none();
        let mut detail = r.error.clone().unwrap_or_default();
        for &(_, label, rel, threshold) in PINNED.iter().filter(|p| p.0 == id) {
            match r.checks.iter().find(|c| c.label == label) {
                None => {
                    ok = false;
                    detail += &format!(" missing check {label:?};");
                }
                Some(c) => {
                    let holds = match rel {
                        Relation::Le => c.value <= threshold,
                        Relation::Ge => c.value >= threshold,
                    };
                    if c.threshold != threshold || c.relation != rel || !holds {
                        ok = false;
                    }
                    detail += &format!(" {label}={:.3e};", c.value);
                }
            }
        }
        let want_status = STATUS_CHECKS.iter().find(|s| s.0 == id).map_or(0, |s| s.1);
        let status_ok = r.checks.iter().filter(|c| c.label.contains(" status ")).all(|c| c.pass);
        let status_count = r.checks.iter().filter(|c| c.label.contains(" status ")).count();
        ok &= status_ok && status_count == want_status && r.pass;
        println!(
            "C{id:<3}{} {:<50}{:>7.1}s {detail}",
            if ok { "PASS" } else { "FAIL" },
            r.name,
            r.seconds
        );
        if !ok {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
