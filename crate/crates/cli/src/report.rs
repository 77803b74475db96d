//! Sweep reports: one record per β, JSON with an optional CSV mirror.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thermomi::{PriorSpec, QuadratureConfig};

use crate::CliError;

pub const TOOL_NAME: &str = "thermomi";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub prior: PriorSpec,
    pub quadrature: QuadratureConfig,
    pub oracle_seed: u64,
    pub routes: Vec<String>,
}

/// Results at one β. Route values are absent when the route was not run or
/// has no closed form; `runtime_ms` is only filled when timings were asked
/// for, so that reports stay byte-identical across runs by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub beta: f64,
    pub snr_db: f64,
    pub mi_thermo_generalized: Option<f64>,
    pub mi_thermo_classical: Option<f64>,
    pub mi_gsv: Option<f64>,
    pub mi_closed_form: Option<f64>,
    pub mmse: f64,
    pub gsv_residual: Option<f64>,
    pub identity_residual_max: f64,
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub header: ReportHeader,
    pub records: Vec<SweepRecord>,
}

pub const CSV_COLUMNS: [&str; 8] =
    ["beta", "snr_db", "mi_generalized", "mi_classical", "mi_gsv", "mi_closed", "mmse", "gsv_residual"];

impl SweepReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("report: {e}")))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.beta.to_string(),
                r.snr_db.to_string(),
                cell(r.mi_thermo_generalized),
                cell(r.mi_thermo_classical),
                cell(r.mi_gsv),
                cell(r.mi_closed_form),
                r.mmse.to_string(),
                cell(r.gsv_residual),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable table for standard output.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{:>10} {:>9} {:>14} {:>14} {:>14} {:>14} {:>12}\n",
            "beta", "snr_db", "mi_generalized", "mi_gsv", "mi_closed", "mi_classical", "mmse"
        );
        let cell = |v: Option<f64>| v.map(|x| format!("{x:>14.8}")).unwrap_or_else(|| format!("{:>14}", "-"));
        for r in &self.records {
            s += &format!(
                "{:>10.5} {:>9.3} {} {} {} {} {:>12.8}\n",
                r.beta,
                r.snr_db,
                cell(r.mi_thermo_generalized),
                cell(r.mi_gsv),
                cell(r.mi_closed_form),
                cell(r.mi_thermo_classical),
                r.mmse
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> SweepReport {
        SweepReport {
            header: ReportHeader {
                tool: TOOL_NAME.into(),
                version: "0.0.0".into(),
                prior: PriorSpec::Discrete { atoms: vec![(-1.0, 0.5), (1.0, 0.5)] },
                quadrature: QuadratureConfig::default(),
                oracle_seed: 9,
                routes: vec!["thermo".into()],
            },
            records: vec![SweepRecord {
                beta: 0.1,
                snr_db: -10.0,
                mi_thermo_generalized: Some(0.1f64.ln_1p() / 3.0),
                mi_thermo_classical: None,
                mi_gsv: Some(1e-300),
                mi_closed_form: None,
                mmse: 0.9,
                gsv_residual: Some(-2.5e-9),
                identity_residual_max: 0.0,
                runtime_ms: None,
            }],
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        assert_eq!(SweepReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn csv_has_fixed_header_and_blank_missing_cells() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "beta,snr_db,mi_generalized,mi_classical,mi_gsv,mi_closed,mmse,gsv_residual");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 8);
        assert_eq!(row[3], "");
        assert_eq!(row[5], "");
        assert_eq!(row[0].parse::<f64>().unwrap(), 0.1);
    }

    fn finite() -> impl Strategy<Value = f64> {
        any::<f64>().prop_filter("finite", |x| x.is_finite())
    }

    proptest! {
        #[test]
        fn round_trip_for_arbitrary_values(
            beta in finite(),
            mi in proptest::option::of(finite()),
            mmse in finite(),
            ms in proptest::option::of(0.0f64..1e6),
        ) {
            let mut r = sample();
            r.records[0].beta = beta;
            r.records[0].mi_thermo_classical = mi;
            r.records[0].mmse = mmse;
            r.records[0].runtime_ms = ms;
            let text = r.to_json();
            let back = SweepReport::from_json(&text).unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
