#![no_main]
use hier_core::space_models::{CylPoint, CylRelation, CylinderModel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = serde_json::from_str::<CylPoint>(s) {
        let m = CylinderModel::new(3, CylRelation::Containment).unwrap();
        if m.valid_point(&x) {
            let _ = x.to_string();
            let _ = x.first(8);
        }
    }
});
