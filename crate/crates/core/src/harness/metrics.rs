//! Run metrics CSV: one row per diagnostic checkpoint.

use crate::network::ActivationKind;
use crate::rl::{RunCheckpoint, TrainRunRecord, Variant};
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 12] = [
    "run_id",
    "variant",
    "activation",
    "seed",
    "step",
    "eval_return",
    "return_normalized",
    "dormant_fraction",
    "effective_rank",
    "live_contrib",
    "dormant_contrib",
    "loss",
];

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn activation_label(r: &TrainRunRecord) -> String {
    format!("{}{}", r.activation, if r.layer_norm { "+ln" } else { "" })
}

/// Header plus every checkpoint of every record, in order. `\n` line endings.
pub fn render_metrics_csv(records: &[TrainRunRecord]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        for c in &r.checkpoints {
            let fields = [
                r.run_id.clone(),
                r.variant.to_string(),
                activation_label(r),
                r.seed.to_string(),
                c.step.to_string(),
                format_float(c.eval_return),
                format_float(c.return_normalized),
                format_float(c.dormant_fraction),
                c.effective_rank.to_string(),
                format_float(c.live_contrib),
                format_float(c.dormant_contrib),
                format_float(c.loss),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    out
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| {
        Error::InvalidInput(format!(
            "metrics line {line}: bad `{}` value `{raw}`",
            CSV_COLUMNS[i]
        ))
    })
}

/// Parses a metrics CSV back into records; consecutive rows sharing a
/// `run_id` form one record.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<TrainRunRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::InvalidInput(format!("metrics header: {e}")))?;
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::InvalidInput(format!(
            "unexpected metrics header `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records: Vec<TrainRunRecord> = Vec::new();
    for (n, row) in reader.records().enumerate() {
        let line = n + 2;
        let row = row.map_err(|e| Error::InvalidInput(format!("metrics line {line}: {e}")))?;
        let run_id = row.get(0).unwrap_or("").to_string();
        let variant: Variant = field(&row, 1, line)?;
        let act_label = row.get(2).unwrap_or("");
        let (act, layer_norm) = match act_label.strip_suffix("+ln") {
            Some(a) => (a, true),
            None => (act_label, false),
        };
        let activation: ActivationKind = act.parse()?;
        let seed: u64 = field(&row, 3, line)?;
        let checkpoint = RunCheckpoint {
            step: field(&row, 4, line)?,
            eval_return: field(&row, 5, line)?,
            return_normalized: field(&row, 6, line)?,
            dormant_fraction: field(&row, 7, line)?,
            effective_rank: field(&row, 8, line)?,
            live_contrib: field(&row, 9, line)?,
            dormant_contrib: field(&row, 10, line)?,
            loss: field(&row, 11, line)?,
        };
        match records.last_mut() {
            Some(r) if r.run_id == run_id => r.checkpoints.push(checkpoint),
            _ => records.push(TrainRunRecord {
                run_id,
                variant,
                activation,
                layer_norm,
                seed,
                checkpoints: vec![checkpoint],
            }),
        }
    }
    Ok(records)
}
