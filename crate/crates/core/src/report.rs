//! Per-frame and per-scheme run results with fixed CSV columns and JSON.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::link::{Scheme, System};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 9] = [
    "sample_index",
    "scheme",
    "rop_dbm",
    "ber_pre_fec",
    "ber_post_fec",
    "ms_ssim",
    "ms_ssim_db",
    "papr_db",
    "decode_ok",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub sample_index: usize,
    pub scheme: Scheme,
    pub rop_dbm: f64,
    /// Absent for the analog scheme.
    pub ber_pre_fec: Option<f64>,
    pub ber_post_fec: Option<f64>,
    pub ms_ssim: f64,
    pub ms_ssim_db: f64,
    pub papr_db: f64,
    pub decode_ok: bool,
    /// CRC-32 of the reconstructed image, when there is one.
    pub image_crc: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeAggregate {
    pub scheme: Scheme,
    pub frames: usize,
    pub mean_ms_ssim_db: f64,
    pub success_ratio: f64,
    /// Images per second at the configured symbol rate.
    pub image_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub system: System,
    pub seed: u64,
    pub per_frame: Vec<FrameRow>,
    pub aggregate: Vec<SchemeAggregate>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl RunReport {
    /// Builds aggregates from the rows; `image_rates` supplies the rate of
    /// each scheme.
    pub fn new(
        system: System,
        seed: u64,
        per_frame: Vec<FrameRow>,
        image_rates: &[(Scheme, f64)],
    ) -> Self {
        let aggregate = image_rates
            .iter()
            .map(|&(scheme, image_rate)| {
                let rows: Vec<&FrameRow> =
                    per_frame.iter().filter(|r| r.scheme == scheme).collect();
                let n = rows.len().max(1) as f64;
                SchemeAggregate {
                    scheme,
                    frames: rows.len(),
                    mean_ms_ssim_db: rows.iter().map(|r| r.ms_ssim_db).sum::<f64>() / n,
                    success_ratio: rows.iter().filter(|r| r.decode_ok).count() as f64 / n,
                    image_rate,
                }
            })
            .collect();
        Self {
            system,
            seed,
            per_frame,
            aggregate,
        }
    }

    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &FrameRow> {
        self.per_frame.iter().filter(move |r| r.scheme == scheme)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for r in &self.per_frame {
            w.write_record([
                r.sample_index.to_string(),
                r.scheme.to_string(),
                r.rop_dbm.to_string(),
                opt(r.ber_pre_fec),
                opt(r.ber_post_fec),
                r.ms_ssim.to_string(),
                r.ms_ssim_db.to_string(),
                r.papr_db.to_string(),
                r.decode_ok.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: usize, scheme: Scheme, ok: bool) -> FrameRow {
        FrameRow {
            sample_index: i,
            scheme,
            rop_dbm: -10.5,
            ber_pre_fec: scheme.is_digital().then_some(0.01),
            ber_post_fec: scheme.is_digital().then_some(0.0),
            ms_ssim: if ok { 0.9 } else { 0.0 },
            ms_ssim_db: if ok { 10.0 } else { 0.0 },
            papr_db: 3.0,
            decode_ok: ok,
            image_crc: None,
        }
    }

    #[test]
    fn csv_has_fixed_columns_and_blank_analog_ber() {
        let r = RunReport::new(
            System::Imdd,
            1,
            vec![row(0, Scheme::Ook, true), row(0, Scheme::Analog, true)],
            &[],
        );
        let csv = r.to_csv_string().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "0,ook,-10.5,0.01,0,0.9,10,3,true");
        assert_eq!(lines.next().unwrap(), "0,analog,-10.5,,,0.9,10,3,true");
    }

    #[test]
    fn aggregates_and_json_round_trip() {
        let rows = vec![row(0, Scheme::Pam4, true), row(1, Scheme::Pam4, false)];
        let r = RunReport::new(System::Imdd, 7, rows, &[(Scheme::Pam4, 1.5e5)]);
        assert_eq!(r.aggregate[0].frames, 2);
        assert_eq!(r.aggregate[0].success_ratio, 0.5);
        assert_eq!(r.aggregate[0].mean_ms_ssim_db, 5.0);
        let back: RunReport = serde_json::from_str(&r.to_json_string().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
