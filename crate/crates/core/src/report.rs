//! Result serialization: per-iteration CSV, ECDF CSV, summary JSON, sweep
//! and state-table CSV, and the generated plot scripts.
//!
//! Column orders and header names are frozen; downstream tooling may rely on
//! them. Every file starts with a reproducibility header embedding the full
//! resolved configuration and the master seed as `#` comment lines (JSON
//! files embed the config as a field instead). Unserved drops leave their
//! text fields empty and print `NaN` for undefined ratios; `-inf` marks an
//! empty interference sum. Files never embed timestamps, so identical runs
//! produce byte-identical outputs.

use crate::engine::{CampaignResult, Percentiles, StateTable, SweepRow};
use crate::params::SimConfig;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// `#`-comment reproducibility header for CSV outputs.
pub fn csv_header(tool: &str, config: &SimConfig) -> String {
    let config_json = serde_json::to_string(config).expect("config serializes");
    format!(
        "# mmwsim {tool}\n# config: {config_json}\n# master_seed: {}\n",
        config.scenario.master_seed
    )
}

pub const ITERATIONS_CSV_COLUMNS: &str = "iteration,served,serving_bs,serving_state,signal_dbm,interference_dbm,noise_dbm,snr_db,inr_db,sinr_db,interferers_los,interferers_nlos,interferers_outage";

/// One row per Monte Carlo drop.
pub fn iterations_csv(config: &SimConfig, result: &CampaignResult) -> String {
    let mut out = csv_header("run", config);
    out.push_str(ITERATIONS_CSV_COLUMNS);
    out.push('\n');
    for r in &result.results {
        let b = &r.budget;
        let (serving_bs, serving_state) = match (b.serving_bs, b.serving_state) {
            (Some(i), Some(s)) => (i.to_string(), s.as_str().to_string()),
            _ => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.index,
            b.is_served(),
            serving_bs,
            serving_state,
            b.received_signal_dbm,
            b.interference_dbm,
            b.noise_dbm,
            b.snr_db,
            b.inr_db,
            b.sinr_db,
            b.interferer_states.los,
            b.interferer_states.nlos,
            b.interferer_states.outage,
        );
    }
    out
}

/// ECDF rows for one campaign: `metric,value_db,cdf` for inr, sinr, and the
/// interference-less snr baseline. An optional `arm` label prefixes each row
/// for paired comparisons.
pub fn ecdf_csv(config: &SimConfig, arms: &[(Option<&str>, &CampaignResult)]) -> String {
    let labeled = arms.iter().any(|(label, _)| label.is_some());
    let mut out = csv_header("ecdf", config);
    out.push_str(if labeled {
        "arm,metric,value_db,cdf\n"
    } else {
        "metric,value_db,cdf\n"
    });
    for (label, result) in arms {
        for (metric, ecdf) in [
            ("inr", &result.inr_ecdf),
            ("sinr", &result.sinr_ecdf),
            ("snr", &result.snr_ecdf),
        ] {
            let n = ecdf.len() as f64;
            for (k, v) in ecdf.samples().iter().enumerate() {
                let cdf = (k + 1) as f64 / n;
                match label {
                    Some(arm) => {
                        let _ = writeln!(out, "{arm},{metric},{v},{cdf}");
                    }
                    None => {
                        let _ = writeln!(out, "{metric},{v},{cdf}");
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct MetricSummary {
    p5_db: f64,
    p50_db: f64,
    p95_db: f64,
}

impl From<Percentiles> for MetricSummary {
    fn from(p: Percentiles) -> Self {
        Self {
            p5_db: p.p5,
            p50_db: p.p50,
            p95_db: p.p95,
        }
    }
}

#[derive(Debug, Serialize)]
struct CampaignSummary<'a> {
    config: &'a SimConfig,
    master_seed: u64,
    iterations: u64,
    served_count: u64,
    coverage_outage_fraction: f64,
    inr: MetricSummary,
    sinr: MetricSummary,
    regime: &'static str,
    regime_threshold_db: f64,
    fraction_inr_above_threshold: f64,
    interferer_state_table: &'a StateTable,
}

/// Summary JSON for a single campaign. Non-finite percentiles (possible when
/// a quantile falls on a `-inf` sample) serialize as `null`.
pub fn summary_json(config: &SimConfig, result: &CampaignResult) -> String {
    let summary = CampaignSummary {
        config,
        master_seed: config.scenario.master_seed,
        iterations: result.iterations,
        served_count: result.served_count,
        coverage_outage_fraction: result.coverage_outage_fraction,
        inr: result.inr_percentiles.into(),
        sinr: result.sinr_percentiles.into(),
        regime: result.regime.as_str(),
        regime_threshold_db: result.regime_threshold_db,
        fraction_inr_above_threshold: result.fraction_above_threshold,
        interferer_state_table: &result.interferer_state_table,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
    s.push('\n');
    s
}

pub const SWEEP_CSV_COLUMNS: &str = "carrier_frequency_ghz,lambda_bs_per_km2,lambda_ue_per_km2,sinr_p5_db,sinr_p50_db,inr_p50_db,fraction_inr_above_0db,regime,coverage_outage_fraction";

pub fn sweep_csv(config: &SimConfig, rows: &[SweepRow]) -> String {
    let mut out = csv_header("sweep", config);
    out.push_str(SWEEP_CSV_COLUMNS);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.carrier_frequency_ghz,
            r.lambda_bs_per_km2,
            r.lambda_ue_per_km2,
            r.sinr_p5_db,
            r.sinr_p50_db,
            r.inr_p50_db,
            r.fraction_above_threshold,
            r.regime.as_str(),
            r.coverage_outage_fraction,
        );
    }
    out
}

pub const STATE_TABLE_CSV_COLUMNS: &str =
    "interval_lower_quantile,interval_upper_quantile,los_fraction,nlos_fraction,outage_fraction,n_interferers";

pub fn state_table_csv(config: &SimConfig, table: &StateTable) -> String {
    let mut out = csv_header("table1", config);
    out.push_str(STATE_TABLE_CSV_COLUMNS);
    out.push('\n');
    for interval in [&table.bottom, &table.upper] {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            interval.quantile_range.0,
            interval.quantile_range.1,
            interval.los_fraction,
            interval.nlos_fraction,
            interval.outage_fraction,
            interval.n_interferers,
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct ArmSummary {
    label: String,
    bs_array: String,
    ue_array: String,
    inr_p50_db: f64,
    sinr_p50_db: f64,
    regime: &'static str,
}

#[derive(Debug, Serialize)]
struct CompareSummary<'a> {
    config: &'a SimConfig,
    master_seed: u64,
    iterations: u64,
    base: ArmSummary,
    alt: ArmSummary,
    inr_p50_delta_db: f64,
    sinr_p50_delta_db: f64,
}

/// Summary JSON for a paired array comparison (shared seeds, identical
/// randomness, only the array shapes change).
pub fn compare_summary_json(
    config: &SimConfig,
    base_cfg: &SimConfig,
    base: &CampaignResult,
    alt_cfg: &SimConfig,
    alt: &CampaignResult,
) -> String {
    let arm = |label: &str, cfg: &SimConfig, r: &CampaignResult| ArmSummary {
        label: label.to_string(),
        bs_array: format!(
            "{}x{}",
            cfg.scenario.bs_array.rows, cfg.scenario.bs_array.cols
        ),
        ue_array: format!(
            "{}x{}",
            cfg.scenario.ue_array.rows, cfg.scenario.ue_array.cols
        ),
        inr_p50_db: r.inr_percentiles.p50,
        sinr_p50_db: r.sinr_percentiles.p50,
        regime: r.regime.as_str(),
    };
    let summary = CompareSummary {
        config,
        master_seed: config.scenario.master_seed,
        iterations: base.iterations,
        base: arm("base", base_cfg, base),
        alt: arm("alt", alt_cfg, alt),
        inr_p50_delta_db: alt.inr_percentiles.p50 - base.inr_percentiles.p50,
        sinr_p50_delta_db: alt.sinr_percentiles.p50 - base.sinr_percentiles.p50,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Python script that plots the ECDF CSV written next to it.
pub const PLOT_ECDF_PY: &str = r##"#!/usr/bin/env python3
"""Plot ECDF curves from an mmwsim ecdf CSV.

Usage: python3 plot_ecdf.py <ecdf.csv> [out.png]
"""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "ecdf.csv"
out = sys.argv[2] if len(sys.argv) > 2 else "ecdf.png"

curves = {}
with open(path) as f:
    rows = [r for r in f if not r.startswith("#")]
    reader = csv.DictReader(rows)
    for row in reader:
        key = row["metric"] if "arm" not in row else f'{row["arm"]}:{row["metric"]}'
        v = float(row["value_db"])
        curves.setdefault(key, ([], []))
        curves[key][0].append(v)
        curves[key][1].append(float(row["cdf"]))

fig, ax = plt.subplots(figsize=(6, 4))
for key in sorted(curves):
    xs, ys = curves[key]
    ax.plot(xs, ys, label=key)
ax.set_xlabel("dB")
ax.set_ylabel("ECDF")
ax.grid(True, alpha=0.3)
ax.legend()
finite = [x for xs, _ in curves.values() for x in xs if x > float("-inf")]
if finite:
    ax.set_xlim(min(finite), max(finite))
fig.tight_layout()
fig.savefig(out, dpi=150)
print(f"wrote {out}")
"##;

/// Python script that plots a density sweep CSV.
pub const PLOT_SWEEP_PY: &str = r##"#!/usr/bin/env python3
"""Plot percentile-vs-density curves from an mmwsim sweep CSV.

Usage: python3 plot_sweep.py <sweep.csv> [out.png]
"""
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
out = sys.argv[2] if len(sys.argv) > 2 else "sweep.png"

series = defaultdict(list)
with open(path) as f:
    rows = [r for r in f if not r.startswith("#")]
    for row in csv.DictReader(rows):
        freq = row["carrier_frequency_ghz"]
        lam = float(row["lambda_bs_per_km2"])
        series[(freq, "SINR p5")].append((lam, float(row["sinr_p5_db"])))
        series[(freq, "SINR p50")].append((lam, float(row["sinr_p50_db"])))
        series[(freq, "INR p50")].append((lam, float(row["inr_p50_db"])))

fig, ax = plt.subplots(figsize=(6, 4))
for (freq, name), pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
            label=f"{freq} GHz {name}")
ax.set_xlabel("BS density (per km^2)")
ax.set_ylabel("dB")
ax.grid(True, alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(out, dpi=150)
print(f"wrote {out}")
"##;

/// Write a file, creating parent directories as needed.
pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ChannelParams, ScenarioConfig};

    fn cfg() -> SimConfig {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/channel_28ghz.json"
        );
        let table: ChannelParams =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        SimConfig::new(
            ScenarioConfig {
                iterations: 50,
                lambda_bs_per_km2: 40.0,
                lambda_ue_per_km2: 200.0,
                master_seed: 3,
                ..ScenarioConfig::default()
            },
            vec![table],
        )
        .unwrap()
    }

    #[test]
    fn iteration_csv_has_header_and_row_per_drop() {
        let config = cfg();
        let result = crate::engine::run_campaign(&config).unwrap();
        let csv = iterations_csv(&config, &result);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# mmwsim run"));
        assert!(lines[1].starts_with("# config: "));
        assert!(lines[2].starts_with("# master_seed: 3"));
        assert_eq!(lines[3], ITERATIONS_CSV_COLUMNS);
        assert_eq!(lines.len(), 4 + result.iterations as usize);
    }

    #[test]
    fn ecdf_csv_rows_are_monotone_in_cdf() {
        let config = cfg();
        let result = crate::engine::run_campaign(&config).unwrap();
        let csv = ecdf_csv(&config, &[(None, &result)]);
        let mut last_cdf = 0.0;
        let mut metric = String::new();
        for line in csv.lines().skip(4) {
            let parts: Vec<&str> = line.split(',').collect();
            if parts[0] != metric {
                metric = parts[0].to_string();
                last_cdf = 0.0;
            }
            let cdf: f64 = parts[2].parse().unwrap();
            assert!(cdf >= last_cdf);
            last_cdf = cdf;
        }
        assert!((last_cdf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn summary_embeds_config_and_seed() {
        let config = cfg();
        let result = crate::engine::run_campaign(&config).unwrap();
        let json = summary_json(&config, &result);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["master_seed"], 3);
        assert_eq!(v["config"]["scenario"]["lambda_bs_per_km2"], 40.0);
        assert!(v["interferer_state_table"]["bottom"]["outage_fraction"].is_number());
    }
}
