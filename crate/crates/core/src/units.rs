//! Unit parsing for configuration values.
//!
//! Internally every bandwidth is MB/s, every size MB and every cost cents/MB.
//! Prefixes are decimal: 1 Mbps = 10^6 bit/s = 0.125 MB/s.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot parse `{input}` as {expected}")]
pub struct UnitError {
    pub input: String,
    pub expected: &'static str,
}

pub const MBPS_IN_MB_PER_S: f64 = 0.125;

/// Converts kilobits per second to MB/s.
pub fn kbps(v: f64) -> f64 {
    v * 1e3 / 8.0 / 1e6
}

/// Converts megabits per second to MB/s.
pub fn mbps(v: f64) -> f64 {
    v * MBPS_IN_MB_PER_S
}

/// Converts kilobytes to MB.
pub fn kilobytes(v: f64) -> f64 {
    v / 1e3
}

fn split_number(input: &str) -> Option<(f64, &str)> {
    let s = input.trim();
    let b = s.as_bytes();
    let mut end = 0;
    if end < b.len() && (b[end] == b'-' || b[end] == b'+') {
        end += 1;
    }
    while end < b.len() && (b[end].is_ascii_digit() || b[end] == b'.' || b[end] == b'_') {
        end += 1;
    }
    // exponent only when digits follow, so "2e3" parses but "2eggs" does not eat the 'e'
    if end < b.len() && (b[end] == b'e' || b[end] == b'E') {
        let mut j = end + 1;
        if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            end = j;
        }
    }
    let (num, rest) = s.split_at(end);
    let value: f64 = num.replace('_', "").parse().ok()?;
    Some((value, rest.trim()))
}

/// Parses a bandwidth such as `500kbps`, `6Mbps`, `0.1MB/s` or a bare number
/// (already MB/s).
pub fn parse_bandwidth(input: &str) -> Result<f64, UnitError> {
    let err = || UnitError {
        input: input.to_string(),
        expected: "bandwidth (bps, kbps, Mbps, Gbps, B/s, KB/s, MB/s, GB/s)",
    };
    let (v, unit) = split_number(input).ok_or_else(err)?;
    let factor = match unit {
        "" | "MB/s" | "MBps" => 1.0,
        "bps" => 1.0 / 8e6,
        "kbps" | "Kbps" => 1e3 / 8e6,
        "Mbps" => 1e6 / 8e6,
        "Gbps" => 1e9 / 8e6,
        "B/s" => 1e-6,
        "KB/s" | "kB/s" => 1e-3,
        "GB/s" => 1e3,
        _ => return Err(err()),
    };
    Ok(v * factor)
}

/// Parses a size such as `194061KB`, `2.1MB`, `1GB` or a bare number (MB).
pub fn parse_size(input: &str) -> Result<f64, UnitError> {
    let err = || UnitError {
        input: input.to_string(),
        expected: "size (B, KB, MB, GB)",
    };
    let (v, unit) = split_number(input).ok_or_else(err)?;
    let factor = match unit.to_ascii_uppercase().as_str() {
        "" | "MB" => 1.0,
        "B" => 1e-6,
        "KB" => 1e-3,
        "GB" => 1e3,
        _ => return Err(err()),
    };
    Ok(v * factor)
}

/// Parses a per-MB cost such as `3c/MB`, `10 cents/MB` or a bare number.
pub fn parse_cost(input: &str) -> Result<f64, UnitError> {
    let err = || UnitError {
        input: input.to_string(),
        expected: "cost (cents/MB)",
    };
    let (v, unit) = split_number(input).ok_or_else(err)?;
    match unit {
        "" | "c/MB" | "cents/MB" | "cent/MB" | "c" => Ok(v),
        _ => Err(err()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_bandwidths() {
        assert_eq!(parse_bandwidth("500kbps").unwrap(), 0.0625);
        assert_eq!(parse_bandwidth("800kbps").unwrap(), 0.1);
        assert_eq!(parse_bandwidth("6Mbps").unwrap(), 0.75);
        assert_eq!(parse_bandwidth("1Mbps").unwrap(), MBPS_IN_MB_PER_S);
        assert_eq!(parse_bandwidth("0.25").unwrap(), 0.25);
        assert_eq!(parse_bandwidth("250 KB/s").unwrap(), 0.25);
        assert_eq!(kbps(500.0), 0.0625);
        assert_eq!(mbps(6.0), 0.75);
    }

    #[test]
    fn sizes_and_costs() {
        assert!((parse_size("194061KB").unwrap() - 194.061).abs() < 1e-12);
        assert_eq!(parse_size("2MB").unwrap(), 2.0);
        assert_eq!(parse_size("1.5e3 kb").unwrap(), 1.5);
        assert_eq!(parse_cost("3c/MB").unwrap(), 3.0);
        assert_eq!(parse_cost("10").unwrap(), 10.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_bandwidth("fast").is_err());
        assert!(parse_bandwidth("10 furlongs").is_err());
        assert!(parse_size("3 parsecs").is_err());
        assert!(parse_cost("3$/MB").is_err());
    }

    #[test]
    fn negative_numbers_parse() {
        assert_eq!(parse_size("-1").unwrap(), -1.0);
    }
}
