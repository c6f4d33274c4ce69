#![no_main]

use finpop::verify::{CountDistributionReport, EnumerationReport, MomentReport, RelativeEfficiencyReport};
use libfuzzer_sys::fuzz_target;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(text: &str) {
    let Ok(report) = serde_json::from_str::<T>(text) else {
        return;
    };
    let again = serde_json::to_string(&report).unwrap();
    let back: T = serde_json::from_str(&again).unwrap();
    assert_eq!(back, report);
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    round_trip::<MomentReport>(text);
    round_trip::<RelativeEfficiencyReport>(text);
    round_trip::<EnumerationReport>(text);
    round_trip::<CountDistributionReport>(text);
});
