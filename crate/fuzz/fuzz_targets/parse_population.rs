#![no_main]

use finpop::config::PopulationFile;
use finpop::designs::DesignKind;
use libfuzzer_sys::fuzz_target;

const DESIGNS: [DesignKind; 6] = [
    DesignKind::Srs,
    DesignKind::SrsWr,
    DesignKind::PpsWr,
    DesignKind::PpsWor,
    DesignKind::Acs,
    DesignKind::AcsWr,
];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = PopulationFile::from_json(text) else {
        return;
    };
    for design in DESIGNS {
        let _ = file.frame_for(design);
    }
});
