//! Fuzz the interval-set flag syntax: no panics, and accepted input must
//! produce a well-formed set (sorted, disjoint, bounded).

#![no_main]
use libfuzzer_sys::fuzz_target;
use rwrs_cli::intervals::parse_interval_set;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 12 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(h) = parse_interval_set(text) {
        let iv = h.intervals();
        assert!(!iv.is_empty());
        for &(l, r) in iv {
            assert!(l.is_finite() && r.is_finite() && l <= r);
        }
        for w in iv.windows(2) {
            assert!(w[0].1 < w[1].0, "components must be disjoint and sorted");
        }
    }
});
