#![no_main]
use hier_core::ordinals::Ordinal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(a) = s.parse::<Ordinal>() {
        // printing is canonical, so it parses back to the same value
        let printed = a.to_string();
        let b: Ordinal = printed.parse().expect("printed ordinal parses");
        assert_eq!(a, b);
        assert_eq!(printed, b.to_string());
    }
});
