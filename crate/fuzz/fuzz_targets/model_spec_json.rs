#![no_main]
use hier_core::space_models::spec::ModelSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = ModelSpec::from_json(s) {
        // validated specs always build their model
        match &spec {
            ModelSpec::Cylinder { .. } => assert!(spec.cylinder_model().is_some()),
            ModelSpec::Poset { .. } => assert!(spec.poset_model().is_some()),
            ModelSpec::Clauses { .. } => assert!(spec.clause_model().is_some()),
            _ => {}
        }
        let again = ModelSpec::from_json(&serde_json::to_string(&spec).unwrap()).expect("own output parses");
        assert_eq!(spec, again);
    }
});
