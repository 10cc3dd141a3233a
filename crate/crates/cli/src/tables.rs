//! CSV outputs. Numbers carry 10 significant digits.

use std::path::Path;

use anyhow::{Context, Result};
use vum_core::report::{BusRow, IbrRow, ScatterRow};

/// Formats `v` with 10 significant digits, switching to exponent form for
/// very small or very large magnitudes.
pub fn sig10(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{v:.9e}");
    }
    let decimals = (9 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_buses(path: &Path, buses: &[BusRow]) -> Result<()> {
    write(
        path,
        &["bus", "v_pos", "v_pos_deg", "v_neg", "v_neg_deg", "vuf", "regulated"],
        buses.iter().map(|b| {
            vec![
                b.bus.to_string(),
                sig10(b.v_pos),
                sig10(b.v_pos_deg),
                sig10(b.v_neg),
                sig10(b.v_neg_deg),
                b.vuf.map(sig10).unwrap_or_default(),
                b.regulated.to_string(),
            ]
        }),
    )
}

pub fn write_ibrs(path: &Path, ibrs: &[IbrRow]) -> Result<()> {
    write(
        path,
        &[
            "ibr", "bus", "id_pos", "iq_pos", "id_neg", "iq_neg", "i_a", "i_b", "i_c", "p", "q", "s",
            "power_utilization", "current_utilization",
        ],
        ibrs.iter().enumerate().map(|(k, r)| {
            let mut row = vec![format!("IBR-{}", k + 1), r.bus.to_string()];
            row.extend(
                [
                    r.id_pos, r.iq_pos, r.id_neg, r.iq_neg, r.i_a, r.i_b, r.i_c, r.p, r.q, r.s,
                    r.power_utilization, r.current_utilization,
                ]
                .map(sig10),
            );
            row
        }),
    )
}

pub fn write_scatter(path: &Path, rows: &[ScatterRow]) -> Result<()> {
    write(
        path,
        &["strategy", "bus", "v_pos", "v_neg"],
        rows.iter().map(|r| vec![r.strategy.to_string(), r.bus.to_string(), sig10(r.v_pos), sig10(r.v_neg)]),
    )
}

#[cfg(test)]
mod tests {
    use super::sig10;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig10(0.0), "0");
        assert_eq!(sig10(1.0), "1");
        assert_eq!(sig10(0.123456789012345), "0.123456789");
        assert_eq!(sig10(-90.0), "-90");
        assert_eq!(sig10(123.4567890123), "123.456789");
        assert_eq!(sig10(2.5e-7), "2.500000000e-7");
    }
}
