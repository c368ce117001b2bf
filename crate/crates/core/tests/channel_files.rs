use wtfb::{load_channel, make_binary_channel, validate_structure, BinaryWiretapParams, ChannelError, StructureTag};

#[test]
fn saved_binary_channel_loads_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("binary.json");
    let ch = make_binary_channel(BinaryWiretapParams::new(0.05, 0.3).unwrap());
    ch.save(&path).unwrap();
    let back = load_channel(&path).unwrap();
    assert_eq!(back, ch);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), back.to_json());
}

#[test]
fn hand_written_degraded_channel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("erasure.json");
    // y1 = x through BSC(0.1), y2 erases y1 with probability 1/2
    std::fs::write(
        &path,
        r#"{"x_size": 2, "y1_size": 2, "y2_size": 3,
            "law": [[[0.45, 0.0, 0.45], [0.0, 0.05, 0.05]], [[0.05, 0.0, 0.05], [0.0, 0.45, 0.45]]]}"#,
    )
    .unwrap();
    let ch = load_channel(&path).unwrap();
    assert_eq!(ch.structure(), StructureTag::PhysicallyDegraded);
    let report = validate_structure(&ch);
    assert!(report.joint_markov && !report.factorizes);
}

#[test]
fn malformed_files_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"x_size": 1, "y1_size": 1, "y2_size": 1, "law": [[[0.7]]]}"#).unwrap();
    let err = load_channel(&path).unwrap_err();
    assert!(err.to_string().contains("law[0]"), "{err}");
    assert!(matches!(load_channel(dir.path().join("missing.json")), Err(ChannelError::Io { .. })));
}
