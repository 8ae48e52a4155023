//! Textual interval sets for the `--interval` flag: comma-separated closed
//! intervals `l..r` or single points, e.g. `-0.5..0.5` or `0,1..2,3.5`.

use rwrs_core::hyperspace::HyperSet;

pub fn parse_interval_set(text: &str) -> Result<HyperSet, String> {
    let mut intervals = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err("empty interval component".into());
        }
        let (l, r) = match split_range(part) {
            Some((a, b)) => (parse_num(a)?, parse_num(b)?),
            None => {
                let x = parse_num(part)?;
                (x, x)
            }
        };
        if l > r {
            return Err(format!("interval [{l}, {r}] is reversed"));
        }
        intervals.push((l, r));
    }
    HyperSet::new(intervals).map_err(|e| e.to_string())
}

/// Split on the `..` separator, taking care that `-0.5..0.5` keeps its signs
/// and exponents intact.
fn split_range(part: &str) -> Option<(&str, &str)> {
    let idx = part.find("..")?;
    Some((&part[..idx], &part[idx + 2..]))
}

fn parse_num(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v: f64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("number {s:?} is not finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_intervals_and_points() {
        let h = parse_interval_set("-0.5..0.5").unwrap();
        assert_eq!(h.intervals(), &[(-0.5, 0.5)]);
        let h = parse_interval_set("0, 1..2, 3.5").unwrap();
        assert_eq!(h.intervals(), &[(0.0, 0.0), (1.0, 2.0), (3.5, 3.5)]);
        // overlapping parts merge
        let h = parse_interval_set("0..1,0.5..2").unwrap();
        assert_eq!(h.intervals(), &[(0.0, 2.0)]);
    }

    #[test]
    fn rejects_bad_syntax() {
        assert!(parse_interval_set("").is_err());
        assert!(parse_interval_set("1..").is_err());
        assert!(parse_interval_set("2..1").is_err());
        assert!(parse_interval_set("nan..1").is_err());
        assert!(parse_interval_set("inf").is_err());
        assert!(parse_interval_set("0..1,,2").is_err());
    }
}
