mod common;

#[test]
fn trivial_examples_hold() {
    let failed: Vec<_> = common::trivial_checks()
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
