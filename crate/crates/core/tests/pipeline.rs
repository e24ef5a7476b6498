use num_bigint::BigUint;
use tbgroup::algebra::{FieldSpec, VSpace};
use tbgroup::cipher::{MixingLayer, RoundSpec, TbCipherSpec};
use tbgroup::corpus::{feistel_layer, inversion_bricks, one_round_cipher};
use tbgroup::group_engine::factorial;
use tbgroup::report::{verify_cipher, Budgets, Status, Verdict, VerifyOptions};

fn space64() -> VSpace {
    VSpace::new(FieldSpec::prime(2).unwrap(), 3, 2).unwrap()
}

fn status(rep: &tbgroup::report::AnalysisReport, name: &str) -> Status {
    rep.hypotheses.iter().find(|h| h.name == name).unwrap().status
}

#[test]
fn inversion_feistel_cipher_is_primitive_only() {
    let v = space64();
    let c = one_round_cipher(v.clone(), inversion_bricks(&v).unwrap(), feistel_layer(&v).unwrap()).unwrap();
    let rep = verify_cipher(&c, "inv64", VerifyOptions::default(), &Budgets::default()).unwrap();
    assert_eq!(rep.r, 1);
    assert_eq!(status(&rep, "weak_uniformity"), Status::Pass);
    assert_eq!(status(&rep, "anti_invariance"), Status::Pass);
    assert_eq!(status(&rep, "coset_condition"), Status::Fail);
    assert_eq!(status(&rep, "gamma_h_primitive"), Status::Pass);
    assert_eq!(status(&rep, "gamma_infinity_alt_sym"), Status::Pass);
    let g = rep.group_report.as_ref().unwrap();
    assert_eq!(g.gamma_h.order, (factorial(64) / BigUint::from(2u32)).to_string());
    assert_eq!(g.witness_agrees, Some(true));
    assert!(!rep.imprimitivity.as_ref().unwrap().found);
    // only the coset condition keeps this from the TheoremMainSatisfied verdict
    assert_eq!(rep.verdict, Verdict::PrimitiveOnly);
    assert_eq!(rep.exit_code(), 1);
}

#[test]
fn compliant_bricks_with_block_diagonal_layer() {
    let v = space64();
    let rows: Vec<Vec<u64>> =
        (0..6).map(|i| (0..6).map(|j| u64::from(i == j || (i < 3 && j < 3 && j == i + 1))).collect()).collect();
    let layer = MixingLayer::from_indices(&v, &rows).unwrap();
    let c = one_round_cipher(v.clone(), inversion_bricks(&v).unwrap(), layer).unwrap();
    let rep = verify_cipher(&c, "diag", VerifyOptions::default(), &Budgets::default()).unwrap();
    assert_eq!(status(&rep, "proper_mixing_layer"), Status::Fail);
    assert_eq!(rep.layer_report[0].invariant_subset, Some(vec![1]));
    assert_eq!(rep.verdict, Verdict::HypothesesFail);
    // group results are still reported
    let g = rep.group_report.as_ref().unwrap();
    assert!(!g.gamma_h.primitive);
    assert_eq!(g.gamma_h.blocks.as_ref().unwrap().coset_form, Some(true));
}

#[test]
fn gamma_infinity_over_two_rounds() {
    let v = space64();
    let r1 = RoundSpec::new(&v, inversion_bricks(&v).unwrap(), feistel_layer(&v).unwrap(), true).unwrap();
    let r2 =
        RoundSpec::new(&v, inversion_bricks(&v).unwrap(), MixingLayer::brick_permutation(&v, &[1, 0]).unwrap(), false)
            .unwrap();
    let c = TbCipherSpec::new(v, vec![r2, r1], None).unwrap();
    assert_eq!(c.proper_round(), 1);
    let rep = verify_cipher(&c, "two", VerifyOptions { r: Some(1), skip_group: false }, &Budgets::default()).unwrap();
    assert_eq!(rep.proper_round, 2);
    let g = rep.group_report.unwrap();
    assert_eq!(g.gamma_infinity.generators, 2 + 6);
    assert!(g.gamma_infinity.primitive);
}

#[test]
fn group_budget_gives_partial_report() {
    let v = space64();
    let c = one_round_cipher(v.clone(), inversion_bricks(&v).unwrap(), feistel_layer(&v).unwrap()).unwrap();
    let budgets = Budgets { max_degree: 32, ..Budgets::default() };
    let rep = verify_cipher(&c, "small", VerifyOptions::default(), &budgets).unwrap();
    assert!(rep.group_report.is_none());
    assert_eq!(rep.omissions.len(), 1);
    assert_eq!(rep.exit_code(), 2);
    // the witness search still settles primitivity
    assert_eq!(status(&rep, "gamma_h_primitive"), Status::Pass);
    assert_eq!(status(&rep, "gamma_infinity_alt_sym"), Status::NotEvaluated);
}

#[test]
fn explicit_r_out_of_range_is_an_error() {
    let v = space64();
    let c = one_round_cipher(v.clone(), inversion_bricks(&v).unwrap(), feistel_layer(&v).unwrap()).unwrap();
    assert!(verify_cipher(&c, "x", VerifyOptions { r: Some(3), skip_group: true }, &Budgets::default()).is_err());
    // r = 2 is a valid parameter but outside 1 <= r < m_p/2
    let rep = verify_cipher(&c, "x", VerifyOptions { r: Some(2), skip_group: true }, &Budgets::default()).unwrap();
    assert_eq!(status(&rep, "r_in_range"), Status::Fail);
    assert_eq!(rep.verdict, Verdict::HypothesesFail);
}
