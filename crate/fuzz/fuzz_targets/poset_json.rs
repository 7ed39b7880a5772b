#![no_main]
use hier_core::finite_space::FinitePoset;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = FinitePoset::from_json(s) {
        let q = FinitePoset::from_json_value(&p.to_json_value()).expect("own output is valid");
        assert_eq!(p, q);
        for x in 0..p.len() {
            assert!(p.leq(x, x));
        }
    }
});
