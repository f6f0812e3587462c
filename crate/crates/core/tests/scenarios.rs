use lieherm::catalog::{CoframeParams, Family};
use lieherm::hermitian::ConstantH;
use lieherm::scan::scan;
use lieherm::scenarios::*;
use lieherm::{Field, Q};

fn q(n: i64) -> Q {
    Q::int(n)
}

fn r(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

fn example_tuple() -> ConfFlatSample {
    [q(1), q(2), q(3), r(1, 2), q(-1), q(2)]
}

#[test]
fn ds_kahler_passes_for_default_lambdas() {
    for l in [q(0), r(1, 2), q(1), q(3)] {
        let rep = verify_ds_kahler(&l).unwrap();
        assert!(rep.passed(), "lambda {l}: {:?}", rep.failed_checks());
    }
}

#[test]
fn corrupted_ds_bracket_fails() {
    let l = q(1);
    let rep = verify_ds_kahler_with(&l, &corrupted_ds_algebra(&l).unwrap()).unwrap();
    assert!(!rep.passed());
}

#[test]
fn example_tuple_is_conformally_flat_and_a9_breaks_it() {
    let [a1, a2, a3, a4, a5, a6] = example_tuple();
    let p = CoframeParams::conformally_flat(a1, a2, a3, a4, a5, a6).unwrap();
    assert!(r2prime_frame_weyl(&p).unwrap().is_zero());
    assert!(!r2prime_frame_weyl(&p.with(9, r(1, 7)).unwrap()).unwrap().is_zero());
    let rep = verify_r2prime_conf_flat(&[example_tuple()]).unwrap();
    assert!(rep.passed(), "{:?}", rep.failed_checks());
}

#[test]
fn conf_flat_rejects_nonpositive_parameters() {
    let mut t = example_tuple();
    t[2] = q(0);
    assert!(verify_r2prime_conf_flat(&[t]).is_err());
}

#[test]
fn relation_perturbation_is_caught() {
    let t = example_tuple();
    let [a1, a2, a3, a4, a5, a6] = t.clone();
    let p = CoframeParams::conformally_flat(a1, a2, a3, a4, a5, a6)
        .unwrap()
        .with(9, r(1, 7))
        .unwrap();
    let rep = verify_r2prime_conf_flat_params(&[t], &[p]).unwrap();
    assert!(!rep.passed());
}

fn h_values(rep: &VerificationReport) -> Vec<Q> {
    let h = &rep.evidence["structures"][0]["H"];
    h.as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn h_list_for_a1_one_t_half() {
    let mut base = example_tuple();
    base[0] = q(1);
    let rep = verify_r2prime_ak(&[AkSample { base, t: r(1, 2) }]).unwrap();
    assert!(rep.passed(), "{:?}", rep.failed_checks());
    // (b2, b3) = (3/5, 4/5)
    assert_eq!(h_values(&rep), vec![q(-1), r(-1, 2), r(-17, 25), r(-41, 50)]);
}

#[test]
fn h_list_for_a1_two_t_zero() {
    let mut base = example_tuple();
    base[0] = q(2);
    let rep = verify_r2prime_ak(&[AkSample { base, t: q(0) }]).unwrap();
    assert!(rep.passed(), "{:?}", rep.failed_checks());
    let h = h_values(&rep);
    assert_eq!(h[2], r(-1, 4));
    assert_eq!(h[3], r(-1, 8));
}

#[test]
fn main_theorem_passes_in_proof_order() {
    let rep = verify_main_theorem(&ScenarioConfig::default()).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.sub_claims(), vec!["dS-kahler", "abelian-rr30", "r2prime-ak"]);
}

#[test]
fn each_negative_control_names_its_sub_claim() {
    for (control, claim) in [
        (NegativeControl::DsBracketSign, "dS-kahler"),
        (NegativeControl::Rr30BracketSign, "abelian-rr30"),
        (NegativeControl::R2PrimeRelation, "r2prime-ak"),
    ] {
        let cfg = ScenarioConfig {
            negative_control: Some(control),
            ..ScenarioConfig::default()
        };
        let rep = verify_main_theorem(&cfg).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.evidence["failed_sub_claims"], serde_json::json!([claim]));
    }
}

#[test]
fn empty_sample_sets_fail() {
    let mut cfg = ScenarioConfig::default();
    cfg.conf_flat.clear();
    let rep = verify_main_theorem(&cfg).unwrap();
    assert!(!rep.passed());
    assert!(rep.check("insufficient samples").is_some());
    assert!(!verify_r2prime_ak(&[]).unwrap().passed());
    assert!(!verify_ds_kahler_all(&[], false).unwrap().passed());
}

#[test]
fn reports_are_reproducible() {
    let cfg = ScenarioConfig::with_seed(5);
    let a = serde_json::to_string(&verify_main_theorem(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_main_theorem(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"seed\":5"));
}

#[test]
fn rr30_excludes_non_conformally_flat_metrics() {
    let rep = verify_abelian_rr30(1, 3).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.evidence["rr30_metrics"]["excluded"], 3);
}

#[test]
fn ds_scan_has_self_dual_metrics_only() {
    let s = scan(Family::DeSmedtSalamon, 20, 7).unwrap();
    assert_eq!(s.counts.metrics, 20);
    assert_eq!(s.counts.wplus_zero, 20);
    assert!(s.counts.constant_h_self_dual);
}

#[test]
fn r2prime_scan_finds_only_non_constant_h() {
    let s = scan(Family::R2Prime, 10, 1).unwrap();
    assert_eq!(s.counts.almost_kahler, 10);
    assert_eq!(s.counts.non_constant_h, 10);
    assert_eq!(s.counts.conformally_flat, 10);
}

#[test]
fn abelian_scan_is_flat_with_vanishing_h() {
    let s = scan(Family::Abelian, 10, 0).unwrap();
    assert_eq!(s.counts.flat, 10);
    for f in s.entries.iter().flat_map(|e| &e.structures) {
        assert_eq!(f.constant_h, ConstantH::Constant { kappa: Q::zero() });
    }
}
