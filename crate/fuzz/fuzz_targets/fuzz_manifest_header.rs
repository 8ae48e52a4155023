//! Fuzz the CSV manifest-header parser: no panics on arbitrary text, and
//! parsed headers re-render byte-identically.

#![no_main]
use libfuzzer_sys::fuzz_target;
use rwrs_cli::manifest::RunManifest;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = RunManifest::parse_csv_header(text) {
        let rendered = m.render_header();
        let again = RunManifest::parse_csv_header(&rendered)
            .expect("rendered manifest header must parse");
        assert_eq!(m, again, "manifest round trip changed fields");
        assert_eq!(rendered, again.render_header());
    }
});
