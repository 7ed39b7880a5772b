#![no_main]
use hier_core::effective_codes::RowListPresentation;
use hier_core::finite_space::FinitePoset;
use hier_core::space_models::{FiniteBasis, FinitePosetModel, FiniteRelation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = RowListPresentation::from_json(s) {
        let m = FinitePosetModel::new(FinitePoset::chain(3), FiniteBasis::AllOpens, FiniteRelation::WayBelow);
        let _ = r.validate(&m);
    }
});
