use smoothkit::verify::{run, VerifyConfig};
use smoothkit::Exec;

#[test]
fn suite_passes() {
    let report = run(VerifyConfig::default());
    print!("{}", report.to_text());
    assert!(report.passed, "{}", report.to_text());
}

#[test]
fn suite_is_deterministic() {
    let cfg = VerifyConfig {
        seed: 3,
        exec: Exec::Sequential,
        ..VerifyConfig::default()
    };
    let a = run(cfg);
    let b = run(VerifyConfig {
        exec: Exec::Parallel,
        ..cfg
    });
    assert_eq!(a.to_text(), b.to_text());
}
