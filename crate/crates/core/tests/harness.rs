use perfbr_core::characters::check_action_coherence;
use perfbr_core::complexes::integral_cohomology;
use perfbr_core::harness::{decode, encode, generate_instance, grid_pairs, GeneratorParams, Mode};
use perfbr_core::Error;

#[test]
fn same_seed_gives_identical_documents() {
    for mode in [Mode::Strict, Mode::General] {
        let params = GeneratorParams::new(42, 7, 6, mode);
        assert_eq!(encode(&generate_instance(&params).unwrap()), encode(&generate_instance(&params).unwrap()));
    }
}

#[test]
fn generated_instances_validate_and_round_trip() {
    for (p, n) in grid_pairs() {
        for seed in [3, 8] {
            let mode = if seed < 6 { Mode::Strict } else { Mode::General };
            let doc = generate_instance(&GeneratorParams::new(seed, p, n, mode)).unwrap();
            doc.complex().validate().unwrap();
            check_action_coherence(&doc.action).unwrap();
            assert_eq!(decode(&encode(&doc)).unwrap(), doc);
        }
    }
}

#[test]
fn torsion_rate_over_two_hundred_seeds() {
    let pairs = grid_pairs();
    let with_torsion = (1..=200u64)
        .filter(|&seed| {
            let (p, n) = pairs[(seed as usize) % pairs.len()];
            let mode = if seed % 2 == 0 { Mode::Strict } else { Mode::General };
            let doc = generate_instance(&GeneratorParams::new(seed, p, n, mode)).unwrap();
            integral_cohomology(doc.complex()).has_torsion()
        })
        .count();
    assert!(with_torsion >= 60, "{with_torsion} of 200");
}

#[test]
fn general_mode_records_coherence_witnesses() {
    let doc = generate_instance(&GeneratorParams::new(9, 5, 4, Mode::General)).unwrap();
    assert_eq!(doc.action.coherence.len(), 16);
    assert!(doc.action.identity_homotopy.is_some());
}

#[test]
fn parameter_violations_are_rejected() {
    assert_eq!(generate_instance(&GeneratorParams::new(1, 6, 1, Mode::Strict)).unwrap_err(), Error::NotPrime(6));
    assert!(matches!(generate_instance(&GeneratorParams::new(1, 5, 10, Mode::Strict)), Err(Error::InvalidParams(_))));
    let mut wide = GeneratorParams::new(1, 5, 2, Mode::Strict);
    wide.window = 6;
    assert!(matches!(generate_instance(&wide), Err(Error::InvalidParams(_))));
    let mut big = GeneratorParams::new(1, 5, 2, Mode::Strict);
    big.rank_cap = 9;
    assert!(matches!(generate_instance(&big), Err(Error::InvalidParams(_))));
}

#[test]
fn malformed_documents_point_at_the_problem() {
    let doc = generate_instance(&GeneratorParams::new(2, 3, 2, Mode::Strict)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&encode(&doc)).unwrap();
    v["action"]["maps"] = serde_json::json!([]);
    match decode(&v.to_string()) {
        Err(Error::Decode { path, .. }) => assert_eq!(path, "/action/maps"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(decode("{"), Err(Error::Decode { .. })));
    assert!(matches!(decode(r#"{"format":"perfbr-0"}"#), Err(Error::Decode { path, .. }) if path == "/format"));
}
