mod support;

use newsframe_core::agreement::agreement;

#[test]
fn metrics_match_independent_oracles() {
    for check in support::metric_oracle_checks(25, 11) {
        assert!(check.passed(), "{} off by {}", check.name, check.worst);
    }
}

#[test]
fn alpha_matches_textbook_examples() {
    for check in support::textbook_alpha_checks() {
        assert!(check.passed(), "{} off by {}", check.name, check.worst);
    }
}

#[test]
fn two_coders_half_agreement() {
    // (A,A) (A,B) (B,B) (B,A): the coincidence matrix is [[3,2],[2,3]] with n = 8,
    // so alpha = 1 - 7 * 4 / (2 * 4 * 4) = 1/8.
    let a = vec![Some('A'), Some('A'), Some('B'), Some('B')];
    let b = vec![Some('A'), Some('B'), Some('B'), Some('A')];
    let r = agreement("relevance", &[a, b]).unwrap();
    assert_eq!(r.percent_agreement, 0.5);
    assert!((r.alpha - 0.125).abs() < 1e-12);
    assert_eq!(r.n_pairable, 8);
}

#[test]
fn alpha_oracle_agrees_on_textbook_data() {
    let data = support::textbook_four_observers();
    let want = support::alpha_oracle(&data).unwrap();
    assert!((agreement("x", &data).unwrap().alpha - want).abs() < 1e-12);
}

#[test]
fn every_sre_pair_has_two_ones() {
    assert_eq!(support::sre_failures(), 0);
}

#[test]
fn api_truncation_and_frame_label_suffix() {
    assert_eq!(support::build_text_violation(200, 5), None);
}
