#![no_main]
use hier_core::diff_hierarchy::DiffCode;
use hier_core::finite_space::PointSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = DiffCode::<PointSet>::from_json(s) {
        let back = serde_json::to_string(&c).unwrap();
        let d = DiffCode::<PointSet>::from_json(&back).expect("own output parses");
        assert_eq!(c, d);
        for x in 0..64 {
            assert_eq!(c.eval_at(x), d.eval_at(x));
        }
    }
});
