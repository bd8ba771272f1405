mod common;

use envision::describer::{load_store, save_store, DescriptionStore, StoreError};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn csv_round_trip(store in common::arb_store()) {
        let text = store.to_csv_string();
        let back = DescriptionStore::from_csv_str(&text).unwrap();
        prop_assert_eq!(back, store);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("views.csv");
    let store = common::template_store(&envision::demo::escape_room());
    save_store(&store, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("scene_name,anchor_index,yaw_degrees,description\n"));
    assert_eq!(text.lines().count(), 33);
    let back = load_store(&path).unwrap();
    assert_eq!(back.scene_name, store.scene_name);
    assert!(back.entries().eq(store.entries()));
    // the four-column schema has no room for the generator
    assert_eq!(back.generator, envision::describer::Generator::Unknown);
}

#[test]
fn malformed_rows_report_their_line() {
    let line_of = |text: &str| match DescriptionStore::from_csv_str(text) {
        Err(StoreError::CsvFormat { line, .. }) => line,
        other => panic!("expected format error, got {other:?}"),
    };
    let header = "scene_name,anchor_index,yaw_degrees,description\n";
    assert_eq!(line_of("scene,anchor,yaw,text\nr,0,0,x\n"), 1);
    assert_eq!(line_of(&format!("{header}r,0,0,ok\nr,0,30,bad yaw\n")), 3);
    assert_eq!(
        line_of(&format!("{header}r,0,0,\"multi\nline\"\nr,x,0,bad index\n")),
        4
    );
    assert_eq!(line_of(&format!("{header}r,0,0,ok\nr,0,0,again\n")), 3);
    assert_eq!(
        line_of(&format!("{header}r,0,0,ok\nq,0,45,other scene\n")),
        3
    );
    assert_eq!(line_of(&format!("{header}r,0,0,\n")), 2);
    assert_eq!(line_of(&format!("{header}r,0,0\n")), 2);
    assert_eq!(line_of(header), 2);
}
