#![no_main]

use finpop::config::{DesignConfig, PopulationFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(design) = DesignConfig::from_json(text) else {
        return;
    };
    let population = PopulationFile::from_json(
        r#"{"values": [1, 3, 5, 0], "sizes": [1, 2, 3, 1], "adjacency": [[1], [0, 2], [1], []], "threshold": 0}"#,
    )
    .unwrap();
    if let Ok(scenario) = design.scenario(&population) {
        for est in scenario.estimators() {
            let _ = scenario.theoretical(est);
        }
    }
});
