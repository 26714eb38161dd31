use divring::golden::{suite, Golden};

#[test]
fn every_golden_matches() {
    let results = suite(1);
    let failed: Vec<&Golden> = results.iter().filter(|g| !g.passed()).collect();
    for g in &failed {
        eprintln!("{}:\n{}", g.name, g.diff().join("\n"));
    }
    assert!(failed.is_empty(), "{} of {} goldens differ", failed.len(), results.len());
}

#[test]
fn goldens_do_not_depend_on_the_seed() {
    let a = suite(1);
    let b = suite(7);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.actual, y.actual, "{}", x.name);
    }
}

#[test]
fn a_corrupted_coefficient_is_caught() {
    let mut results = suite(1);
    let g = results
        .iter_mut()
        .find(|g| g.actual.lines().any(|l| l.starts_with("-1 * ")))
        .expect("an inversion golden");
    g.actual = g.actual.replacen("-1 * ", "-2 * ", 1);
    assert!(!g.passed());
    let diff = g.diff().join("\n");
    assert!(diff.contains("-2 * "), "{diff}");
    assert!(diff.contains("-1 * "), "{diff}");
}
