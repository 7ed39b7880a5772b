#![no_main]
use hier_core::space_models::baire::CylInstance;
use hier_core::space_models::{CylPoint, CylRelation, CylinderModel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(inst) = serde_json::from_str::<CylInstance>(s) else { return };
    let m = CylinderModel::new(3, CylRelation::Containment).unwrap();
    if let Ok(c) = inst.canonical(&m) {
        // canonical form is a fixed point
        assert_eq!(c.canonical(&m).unwrap(), c);
        let x = CylPoint::new(vec![0, 1], vec![2]).unwrap();
        assert_eq!(inst.verify(&m, &x), c.verify(&m, &x));
    }
});
