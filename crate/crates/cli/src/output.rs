//! Deterministic CSV emission. Every row is self-describing: all run inputs
//! appear alongside the results, so the file alone can regenerate any point.

use std::io::Write;

use ntn_core::evaluator::{Engine, SweepRow};

/// The output schema, in column order.
pub const CSV_HEADER: [&str; 15] = [
    "scenario",
    "band",
    "leo_altitude_km",
    "alpha_deg",
    "epsilon_db",
    "engine",
    "outage",
    "outage_stderr",
    "capacity_bps",
    "capacity_stderr",
    "n_samples",
    "seed",
    "per_hop_snr_db",
    "below_resolution",
    "error",
];

/// Probabilities below this are serialized as 0 and flagged.
pub const PROBABILITY_RESOLUTION: f64 = 1e-12;

/// Nine significant digits, scientific notation.
fn fmt_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Grid coordinates print in plain notation (shortest round-trip form).
fn fmt_plain(x: f64) -> String {
    format!("{x}")
}

/// Serializes a probability, clamping sub-resolution values to "0".
/// Returns the text and whether the clamp fired.
fn fmt_probability(p: f64) -> (String, bool) {
    if p > 0.0 && p < PROBABILITY_RESOLUTION {
        ("0".to_string(), true)
    } else {
        (fmt_sig9(p), false)
    }
}

/// Writes header and rows to `out`.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(record_for(row))?;
    }
    writer.flush()?;
    Ok(())
}

fn record_for(row: &SweepRow) -> [String; 15] {
    let mut below_resolution = false;
    let mut prob = |value: Option<f64>| -> String {
        match value {
            None => String::new(),
            Some(p) => {
                let (text, clamped) = fmt_probability(p);
                below_resolution |= clamped;
                text
            }
        }
    };
    let outage = prob(row.outage);
    let outage_stderr = prob(row.outage_std_error);
    let is_mc = row.engine == Engine::MonteCarlo;
    [
        row.configuration.as_str().to_string(),
        row.band.as_str().to_string(),
        row.leo_altitude_km.map(fmt_plain).unwrap_or_default(),
        fmt_plain(row.alpha_deg),
        fmt_plain(row.epsilon_db),
        row.engine.as_str().to_string(),
        outage,
        if is_mc { outage_stderr } else { String::new() },
        row.capacity_bps.map(fmt_sig9).unwrap_or_default(),
        row.capacity_std_error.map(fmt_sig9).unwrap_or_default(),
        row.n_samples.to_string(),
        row.seed.to_string(),
        row.per_hop_snr_db
            .iter()
            .map(|&s| fmt_sig9(s))
            .collect::<Vec<_>>()
            .join(";"),
        below_resolution.to_string(),
        row.error.clone().unwrap_or_default(),
    ]
}
