//! Scenario and channel-model configuration.
//!
//! One JSON file defines the whole run: the scenario block (frequencies,
//! densities, powers, arrays, iteration budget, seed) and the per-frequency
//! channel parameter tables. Tables can be given inline or referenced as
//! separate files so the measurement-derived numbers stay in data, not code.
//! See `docs/CONFIG.md` for the full schema with units and defaults.
//!
//! All configuration objects are immutable after load and `Send + Sync`, so
//! parallel Monte Carlo workers share them freely.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid configuration: field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("no channel table for frequency {frequency_ghz} GHz")]
    MissingChannelTable { frequency_ghz: f64 },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Rectangular antenna array: `rows * cols` elements on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayShape {
    pub rows: usize,
    pub cols: usize,
    /// Element pitch in carrier wavelengths (0.5 = half-wavelength grid).
    #[serde(default = "default_spacing")]
    pub element_spacing_wavelengths: f64,
}

fn default_spacing() -> f64 {
    0.5
}

impl ArrayShape {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            element_spacing_wavelengths: default_spacing(),
        }
    }

    pub fn n_elements(&self) -> usize {
        self.rows * self.cols
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(invalid(field, "rows and cols must be >= 1"));
        }
        if !(self.element_spacing_wavelengths > 0.0) {
            return Err(invalid(field, "element spacing must be > 0"));
        }
        Ok(())
    }
}

/// Log-distance pathloss law: `PL(d) = intercept + slope * 10 * log10(d) + X`,
/// with `X ~ Normal(0, shadowing_sigma_db^2)` drawn per link per drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossLaw {
    pub intercept_db: f64,
    pub slope: f64,
    pub shadowing_sigma_db: f64,
}

impl PathlossLaw {
    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if !(self.slope > 0.0) {
            return Err(invalid(field, "pathloss slope must be > 0"));
        }
        if self.shadowing_sigma_db < 0.0 {
            return Err(invalid(field, "shadowing sigma must be >= 0"));
        }
        Ok(())
    }
}

/// Distance-dependent link-state probabilities.
///
/// `p_outage(d) = max(0, 1 - exp(-d/outage_decay_distance_m + outage_offset))`
/// `p_los(d)    = (1 - p_outage(d)) * exp(-d/los_decay_distance_m)`
/// `p_nlos(d)   = 1 - p_outage(d) - p_los(d)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStateModel {
    pub los_decay_distance_m: f64,
    pub outage_decay_distance_m: f64,
    pub outage_offset: f64,
}

impl LinkStateModel {
    pub fn p_outage(&self, distance_m: f64) -> f64 {
        let x = 1.0 - (-distance_m / self.outage_decay_distance_m + self.outage_offset).exp();
        x.max(0.0)
    }

    pub fn p_los(&self, distance_m: f64) -> f64 {
        (1.0 - self.p_outage(distance_m)) * (-distance_m / self.los_decay_distance_m).exp()
    }

    pub fn p_nlos(&self, distance_m: f64) -> f64 {
        (1.0 - self.p_outage(distance_m) - self.p_los(distance_m)).max(0.0)
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if !(self.los_decay_distance_m > 0.0) || !(self.outage_decay_distance_m > 0.0) {
            return Err(invalid(field, "decay distances must be > 0"));
        }
        Ok(())
    }
}

/// Cluster count and power-decay parameters for the small-scale model.
///
/// Cluster count is `max(1, Poisson(mean_count))`. Raw cluster powers follow
/// `U^(decay_exponent - 1) * 10^(-Z/10)` with `Z ~ Normal(0, lognormal_sigma_db^2)`
/// and are normalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub mean_count: f64,
    pub decay_exponent: f64,
    pub lognormal_sigma_db: f64,
}

impl ClusterModel {
    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if !(self.mean_count >= 0.0) {
            return Err(invalid(field, "cluster mean count must be >= 0"));
        }
        if self.lognormal_sigma_db < 0.0 {
            return Err(invalid(field, "cluster power sigma must be >= 0"));
        }
        Ok(())
    }
}

/// Subpath count per cluster: uniform integer on `[min_per_cluster, max_per_cluster]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubpathModel {
    pub min_per_cluster: usize,
    pub max_per_cluster: usize,
}

impl SubpathModel {
    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.min_per_cluster < 1 {
            return Err(invalid(field, "min subpaths per cluster must be >= 1"));
        }
        if self.max_per_cluster < self.min_per_cluster {
            return Err(invalid(field, "max subpaths must be >= min subpaths"));
        }
        Ok(())
    }
}

/// Where cluster center elevations sit.
///
/// `Horizon` places scattering clusters at the horizontal plane (street-canyon
/// propagation; matches azimuth-only channel measurements). `Geometric` aims
/// them along the direct BS-UE ray instead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterElevationMode {
    #[default]
    Horizon,
    Geometric,
}

/// RMS angular spread of subpaths around their cluster center, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSpreads {
    pub aod_azimuth_deg: f64,
    pub aod_elevation_deg: f64,
    pub aoa_azimuth_deg: f64,
    pub aoa_elevation_deg: f64,
}

impl AngularSpreads {
    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        for (name, v) in [
            ("aod_azimuth_deg", self.aod_azimuth_deg),
            ("aod_elevation_deg", self.aod_elevation_deg),
            ("aoa_azimuth_deg", self.aoa_azimuth_deg),
            ("aoa_elevation_deg", self.aoa_elevation_deg),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(invalid(field, format!("{name} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

/// Full per-frequency channel parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub carrier_frequency_ghz: f64,
    pub los: PathlossLaw,
    pub nlos: PathlossLaw,
    pub link_state: LinkStateModel,
    pub clusters: ClusterModel,
    pub subpaths: SubpathModel,
    pub angular_spreads: AngularSpreads,
    #[serde(default)]
    pub cluster_elevation_mode: ClusterElevationMode,
    #[serde(default = "default_bs_height")]
    pub bs_height_m: f64,
    #[serde(default = "default_ue_height")]
    pub ue_height_m: f64,
}

fn default_bs_height() -> f64 {
    10.0
}

fn default_ue_height() -> f64 {
    1.5
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.carrier_frequency_ghz > 0.0) {
            return Err(invalid("carrier_frequency_ghz", "must be > 0"));
        }
        self.los.validate("los")?;
        self.nlos.validate("nlos")?;
        self.link_state.validate("link_state")?;
        self.clusters.validate("clusters")?;
        self.subpaths.validate("subpaths")?;
        self.angular_spreads.validate("angular_spreads")?;
        if !(self.bs_height_m > 0.0) || !(self.ue_height_m > 0.0) {
            return Err(invalid("bs_height_m/ue_height_m", "heights must be > 0"));
        }
        Ok(())
    }
}

/// Scenario block: everything about one simulated deployment except the
/// channel tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub carrier_frequency_ghz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    #[serde(default = "default_noise_psd")]
    pub noise_psd_dbm_per_hz: f64,
    pub lambda_bs_per_km2: f64,
    pub lambda_ue_per_km2: f64,
    pub bs_array: ArrayShape,
    pub ue_array: ArrayShape,
    #[serde(default = "default_region_radius")]
    pub region_radius_m: f64,
    pub iterations: u64,
    pub master_seed: u64,
    /// When true, coverage-outage drops enter the ECDFs as -inf samples
    /// instead of being excluded. Default false: distributions are
    /// conditioned on served users.
    #[serde(default)]
    pub ecdf_include_coverage_outage: bool,
}

fn default_noise_psd() -> f64 {
    -174.0
}

fn default_region_radius() -> f64 {
    400.0
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            carrier_frequency_ghz: 28.0,
            bandwidth_hz: 500e6,
            tx_power_dbm: 30.0,
            noise_figure_db: 7.0,
            noise_psd_dbm_per_hz: default_noise_psd(),
            lambda_bs_per_km2: 30.0,
            lambda_ue_per_km2: 300.0,
            bs_array: ArrayShape::new(8, 8),
            ue_array: ArrayShape::new(4, 4),
            region_radius_m: default_region_radius(),
            iterations: 50_000,
            master_seed: 1,
            ecdf_include_coverage_outage: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.carrier_frequency_ghz > 0.0) {
            return Err(invalid("carrier_frequency_ghz", "must be > 0"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(invalid("bandwidth_hz", "must be > 0"));
        }
        if !(self.lambda_bs_per_km2 > 0.0) {
            return Err(invalid("lambda_bs_per_km2", "must be > 0"));
        }
        // lambda_ue = 0 is meaningful: only the typical receiver exists.
        if !(self.lambda_ue_per_km2 >= 0.0) {
            return Err(invalid("lambda_ue_per_km2", "must be >= 0"));
        }
        if !(self.region_radius_m > 0.0) {
            return Err(invalid("region_radius_m", "must be > 0"));
        }
        if self.iterations < 1 {
            return Err(invalid("iterations", "must be >= 1"));
        }
        self.bs_array.validate("bs_array")?;
        self.ue_array.validate("ue_array")?;
        Ok(())
    }

    pub fn noise_power_dbm(&self) -> f64 {
        noise_power_dbm(
            self.bandwidth_hz,
            self.noise_figure_db,
            self.noise_psd_dbm_per_hz,
        )
    }
}

/// Receiver noise power budget in dBm:
/// `noise_psd + 10*log10(bandwidth) + noise_figure`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64, noise_psd_dbm_per_hz: f64) -> f64 {
    assert!(bandwidth_hz > 0.0, "bandwidth must be > 0");
    noise_psd_dbm_per_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// On-disk shape of the config file. Channel tables may be inline, referenced
/// by path, or both.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawConfig {
    scenario: ScenarioConfig,
    #[serde(default)]
    channel_tables: Vec<ChannelParams>,
    #[serde(default)]
    channel_table_files: Vec<PathBuf>,
}

/// Fully resolved configuration: scenario plus every loaded channel table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub channel_tables: Vec<ChannelParams>,
}

impl SimConfig {
    pub fn new(
        scenario: ScenarioConfig,
        channel_tables: Vec<ChannelParams>,
    ) -> Result<Self, ConfigError> {
        let cfg = Self {
            scenario,
            channel_tables,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate a config file, resolving `channel_table_files`
    /// relative to the config file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw: RawConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut tables = raw.channel_tables;
        for file in &raw.channel_table_files {
            let table_path = if file.is_absolute() {
                file.clone()
            } else {
                base.join(file)
            };
            let table_text =
                std::fs::read_to_string(&table_path).map_err(|source| ConfigError::Io {
                    path: table_path.clone(),
                    source,
                })?;
            let table: ChannelParams =
                serde_json::from_str(&table_text).map_err(|source| ConfigError::Parse {
                    path: table_path.clone(),
                    source,
                })?;
            tables.push(table);
        }
        Self::new(raw.scenario, tables)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate()?;
        for table in &self.channel_tables {
            table.validate()?;
        }
        // The scenario frequency must have a table.
        self.channel_params()?;
        Ok(())
    }

    /// The channel table matching the scenario carrier frequency.
    pub fn channel_params(&self) -> Result<&ChannelParams, ConfigError> {
        self.channel_params_for(self.scenario.carrier_frequency_ghz)
    }

    pub fn channel_params_for(&self, frequency_ghz: f64) -> Result<&ChannelParams, ConfigError> {
        self.channel_tables
            .iter()
            .find(|t| (t.carrier_frequency_ghz - frequency_ghz).abs() < 1e-6)
            .ok_or(ConfigError::MissingChannelTable { frequency_ghz })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn table_28ghz_for_tests() -> ChannelParams {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/channel_28ghz.json"
        );
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn noise_power_identity_bandwidth() {
        assert!((noise_power_dbm(1.0, 0.0, -174.0) - (-174.0)).abs() < 1e-12);
    }

    #[test]
    fn noise_power_budget_500mhz() {
        // -174 + 10*log10(5e8) + 7
        let expect = -174.0 + 10.0 * 5e8f64.log10() + 7.0;
        assert!((expect - (-80.010_299_956_639_81)).abs() < 1e-9);
        assert!((noise_power_dbm(500e6, 7.0, -174.0) - expect).abs() < 1e-12);
        assert!((noise_power_dbm(500e6, 0.0, -174.0) - (-87.010_299_956_639_81)).abs() < 1e-9);
    }

    #[test]
    fn noise_power_additive_in_nf_and_monotone_in_bw() {
        for bw in [1e6, 20e6, 500e6, 1e9] {
            for nf in [0.0, 3.0, 7.0, 13.0] {
                let with_nf = noise_power_dbm(bw, nf, -174.0);
                let without = noise_power_dbm(bw, 0.0, -174.0);
                assert_eq!(with_nf, without + nf);
            }
        }
        assert!(noise_power_dbm(2e8, 0.0, -174.0) < noise_power_dbm(5e8, 0.0, -174.0));
    }

    #[test]
    fn default_scenario_matches_documented_defaults() {
        let s = ScenarioConfig::default();
        assert_eq!(s.carrier_frequency_ghz, 28.0);
        assert_eq!(s.bandwidth_hz, 500e6);
        assert_eq!(s.tx_power_dbm, 30.0);
        assert_eq!(s.noise_figure_db, 7.0);
        assert_eq!(s.bs_array.n_elements(), 64);
        assert_eq!(s.ue_array.n_elements(), 16);
        s.validate().unwrap();
    }

    #[test]
    fn zero_bs_density_rejected_with_field_name() {
        let s = ScenarioConfig {
            lambda_bs_per_km2: 0.0,
            ..ScenarioConfig::default()
        };
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("lambda_bs_per_km2"), "{err}");
    }

    #[test]
    fn missing_frequency_table_rejected() {
        let scenario = ScenarioConfig {
            carrier_frequency_ghz: 73.0,
            ..ScenarioConfig::default()
        };
        let err = SimConfig::new(scenario, vec![table_28ghz_for_tests()]).unwrap_err();
        assert!(err.to_string().contains("no channel table"), "{err}");
        assert!(err.to_string().contains("73"), "{err}");
    }

    #[test]
    fn config_roundtrip_is_identical() {
        let cfg = SimConfig::new(ScenarioConfig::default(), vec![table_28ghz_for_tests()]).unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn link_state_probabilities_are_a_distribution() {
        let m = table_28ghz_for_tests().link_state;
        for d in [0.0, 10.0, 50.0, 100.0, 156.0, 200.0, 400.0, 1e4] {
            let (po, pl, pn) = (m.p_outage(d), m.p_los(d), m.p_nlos(d));
            assert!((0.0..=1.0).contains(&po), "p_out({d}) = {po}");
            assert!((0.0..=1.0).contains(&pl), "p_los({d}) = {pl}");
            assert!(pl + po <= 1.0 + 1e-12);
            assert!((po + pl + pn - 1.0).abs() < 1e-12);
        }
        assert!((m.p_los(0.0) - 1.0).abs() < 1e-12);
        assert!(m.p_outage(1e5) > 1.0 - 1e-9);
    }

    proptest! {
        #[test]
        fn noise_power_nf_additivity_prop(bw in 1.0f64..1e10, nf in 0.0f64..30.0) {
            let lhs = noise_power_dbm(bw, nf, -174.0);
            let rhs = noise_power_dbm(bw, 0.0, -174.0) + nf;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn state_probs_valid_for_any_distance(d in 0.0f64..1e5) {
            let m = LinkStateModel {
                los_decay_distance_m: 67.1,
                outage_decay_distance_m: 30.0,
                outage_offset: 5.2,
            };
            let (po, pl, pn) = (m.p_outage(d), m.p_los(d), m.p_nlos(d));
            prop_assert!((0.0..=1.0).contains(&po));
            prop_assert!((0.0..=1.0).contains(&pl));
            prop_assert!(po + pl <= 1.0 + 1e-12);
            prop_assert!((po + pl + pn - 1.0).abs() < 1e-12);
        }
    }
}
