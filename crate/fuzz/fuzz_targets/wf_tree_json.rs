#![no_main]
use hier_core::alt_trees::WfTree;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = WfTree::from_json(s) {
        let u = WfTree::from_json(&serde_json::to_string(&t).unwrap()).expect("own output parses");
        assert_eq!(t, u);
        let _ = t.rank();
    }
});
