#![no_main]
use hier_core::effective_codes::HausdorffCode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = HausdorffCode::from_json(s) {
        let d = HausdorffCode::from_json(&serde_json::to_string(&c).unwrap()).expect("own output parses");
        assert_eq!(c, d);
        for k in 1..4u64 {
            let member = |n: u64| n % k == 0;
            assert_eq!(c.eval(member), d.eval(member));
        }
    }
});
