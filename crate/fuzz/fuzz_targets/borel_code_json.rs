#![no_main]
use hier_core::effective_codes::{BorelCode, Side};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = BorelCode::from_json(s) {
        let d = BorelCode::from_json(&serde_json::to_string(&c).unwrap()).expect("own output parses");
        assert_eq!(c, d);
        let even = |n: u64| n % 2 == 0;
        let _ = c.eval(even, Side::Sigma);
        let _ = c.eval(even, Side::Pi);
    }
});
