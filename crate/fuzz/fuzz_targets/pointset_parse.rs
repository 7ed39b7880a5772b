#![no_main]
use hier_core::finite_space::PointSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(a) = s.parse::<PointSet>() {
        let b: PointSet = a.to_string().parse().expect("printed set parses");
        assert_eq!(a, b);
    }
});
