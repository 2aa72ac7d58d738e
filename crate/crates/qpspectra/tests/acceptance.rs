//! Acceptance suite: runs every top-level criterion at its pinned tolerance
//! and prints one pass/fail line per criterion (use `-- --nocapture` to see
//! them as they run).

use qpspectra::validate;

fn run(report: validate::CriterionReport) {
    println!("{}", report.summary());
    for line in &report.details {
        println!("    {line}");
    }
    assert!(report.passed, "{} failed:\n{}", report.name, report.details.join("\n"));
}

#[test]
fn criterion_01_transform_isometry() {
    run(validate::criterion_1());
}

#[test]
fn criterion_02_kernel_integral_vs_multiplier() {
    run(validate::criterion_2());
}

#[test]
fn criterion_03_series_convergence() {
    run(validate::criterion_3());
}

#[test]
fn criterion_04_constant_symbol_sections() {
    run(validate::criterion_4());
}

#[test]
fn criterion_05_residual_certificate() {
    run(validate::criterion_5());
}

#[test]
fn criterion_06_essential_normality() {
    run(validate::criterion_6());
}

#[test]
fn criterion_07_essential_range() {
    run(validate::criterion_7());
}

#[test]
fn criterion_08_disk_pullback_consistency() {
    run(validate::criterion_8());
}

#[test]
fn criterion_09_tail_bound() {
    run(validate::criterion_9());
}

#[test]
fn criterion_10_vmo_profile() {
    run(validate::criterion_10());
}
