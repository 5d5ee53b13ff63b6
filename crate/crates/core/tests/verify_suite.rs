use thermofringe::checks::{check_names, run_verify, Level};

#[test]
fn full_suite_passes() {
    let report = run_verify(Level::Full, 1.0);
    for o in &report.outcomes {
        println!(
            "{:<28} {:>5} dev {:e} tol {:e} {}",
            o.name, o.passed, o.deviation, o.tolerance, o.detail
        );
    }
    assert!(report.all_passed(), "{} failures", report.failures());
    assert_eq!(report.outcomes.len(), check_names(Level::Full).len());
}

#[test]
fn fast_suite_has_at_least_twelve_named_checks() {
    let names = check_names(Level::Fast);
    assert!(names.len() >= 12);
    let mut unique = names.clone();
    unique.sort_unstable();
    unique.dedup();
    assert_eq!(unique.len(), names.len());
}
