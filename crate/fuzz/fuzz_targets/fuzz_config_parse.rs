//! Fuzz the flat key-value config parser: arbitrary input must never panic,
//! and anything it accepts must survive a render/parse round trip.

#![no_main]
use libfuzzer_sys::fuzz_target;
use rwrs_cli::config::{parse_config_str, render_config};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = parse_config_str(text) {
        let rendered = render_config(&map);
        let again = parse_config_str(&rendered).expect("canonical rendering must parse");
        assert_eq!(map, again, "config round trip changed the assignments");
    }
});
