//! Monte Carlo campaign driver: independent drops, ECDF aggregation,
//! percentile extraction, interferer-state tables, and regime
//! classification.
//!
//! Reproducibility contract: iteration `i` of a campaign with master seed
//! `s` draws every random quantity from `ChaCha8Rng::seed_from_u64(s)` with
//! stream `i`. Iterations are embarrassingly parallel and aggregation is an
//! ordered reduction by iteration index, so results are bit-identical for
//! any worker count.
//!
//! Within one drop the sampling order is fixed: BS positions, UE positions,
//! link states and pathlosses for every BS-UE pair in row-major (BS-outer)
//! order, one scheduling draw per active BS in index order, then cluster and
//! subpath draws per active BS in index order (serving link first). None of
//! these draws depend on the array shapes, so campaigns that differ only in
//! array geometry share all their randomness - that is what makes paired
//! array comparisons exact.

use crate::beamforming::{align_beams, beamforming_gain, steering_beam, BeamPair};
use crate::channel::{
    pathloss_db, sample_channel_matrix, sample_clusters, sample_link_state, LinkGeometry,
    LinkState,
};
use crate::deployment::Deployment;
use crate::network::{
    associate, schedule_blind, LinkBudget, LinkPower, StateCounts,
};
use crate::params::{ChannelParams, ConfigError, ScenarioConfig, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no coverage; cannot form ECDF (0 of {iterations} drops served)")]
    NoCoverage { iterations: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Empirical cumulative distribution function over dB samples.
///
/// Samples are held sorted ascending; `eval` is the right-continuous step
/// function `F(x) = #{samples <= x} / n`. Quantiles use the nearest-rank
/// convention: the `ceil(p * n)`-th smallest sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    samples: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(
            samples.iter().all(|x| !x.is_nan()),
            "ECDF samples must not be NaN"
        );
        samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.samples.partition_point(|&s| s <= x);
        k as f64 / self.samples.len() as f64
    }

    /// Nearest-rank quantile for `p` in (0, 1].
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(!self.samples.is_empty(), "quantile of empty ECDF");
        assert!(p > 0.0 && p <= 1.0, "quantile level must be in (0, 1]");
        let n = self.samples.len();
        let rank = (p * n as f64).ceil() as usize;
        self.samples[rank.clamp(1, n) - 1]
    }

    /// Two-sample Kolmogorov-Smirnov distance `sup |F_self - F_other|`.
    pub fn ks_distance(&self, other: &Ecdf) -> f64 {
        assert!(!self.samples.is_empty() && !other.samples.is_empty());
        let (a, b) = (&self.samples, &other.samples);
        let (mut i, mut j) = (0usize, 0usize);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            let fa = i as f64 / a.len() as f64;
            let fb = j as f64 / b.len() as f64;
            d = d.max((fa - fb).abs());
        }
        d
    }
}

/// Network operating regime, judged by the fraction of drops whose INR
/// exceeds the transition threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    NoiseLimited,
    Hybrid,
    InterferenceLimited,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NoiseLimited => "noise-limited",
            Regime::Hybrid => "hybrid",
            Regime::InterferenceLimited => "interference-limited",
        }
    }
}

/// Fraction of samples above `threshold_db` and the resulting regime label.
/// Defaults mirror the usual reading: noise-limited when at most
/// `noise_max_fraction` of drops exceed the threshold, interference-limited
/// from `interference_min_fraction` up.
pub fn classify_regime(
    inr_ecdf: &Ecdf,
    threshold_db: f64,
    noise_max_fraction: f64,
    interference_min_fraction: f64,
) -> (Regime, f64) {
    assert!(!inr_ecdf.is_empty(), "cannot classify an empty ECDF");
    let fraction_above = 1.0 - inr_ecdf.eval(threshold_db);
    let regime = if fraction_above <= noise_max_fraction {
        Regime::NoiseLimited
    } else if fraction_above >= interference_min_fraction {
        Regime::InterferenceLimited
    } else {
        Regime::Hybrid
    };
    (regime, fraction_above)
}

pub const DEFAULT_REGIME_THRESHOLD_DB: f64 = 0.0;
pub const DEFAULT_NOISE_MAX_FRACTION: f64 = 0.2;
pub const DEFAULT_INTERFERENCE_MIN_FRACTION: f64 = 0.8;
pub const DEFAULT_TABLE_SPLIT_QUANTILE: f64 = 0.12;

/// One interfering link's contribution record (state toward the typical UE,
/// pathloss draw, and beamforming gain under the drop's actual beams).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfererLink {
    pub bs_index: usize,
    pub state: LinkState,
    pub pathloss_db: f64,
    pub gain_linear: f64,
}

/// Everything recorded for one Monte Carlo drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub index: u64,
    pub budget: LinkBudget,
    /// One record per active non-serving BS, ascending by BS index.
    pub interferers: Vec<InterfererLink>,
}

impl IterationResult {
    pub fn is_served(&self) -> bool {
        self.budget.is_served()
    }

    /// Order-stable bit-level digest, used to verify that campaigns are
    /// bit-identical across worker counts and reruns.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.index.hash(&mut h);
        self.budget.serving_bs.hash(&mut h);
        for v in [
            self.budget.received_signal_dbm,
            self.budget.interference_dbm,
            self.budget.noise_dbm,
            self.budget.snr_db,
            self.budget.inr_db,
            self.budget.sinr_db,
        ] {
            v.to_bits().hash(&mut h);
        }
        (
            self.budget.interferer_states.los,
            self.budget.interferer_states.nlos,
            self.budget.interferer_states.outage,
        )
            .hash(&mut h);
        for l in &self.interferers {
            l.bs_index.hash(&mut h);
            l.pathloss_db.to_bits().hash(&mut h);
            l.gain_linear.to_bits().hash(&mut h);
            (l.state as u8).hash(&mut h);
        }
        h.finish()
    }
}

/// Quantiles reported for each metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
}

impl Percentiles {
    fn from_ecdf(e: &Ecdf) -> Self {
        Self {
            p5: e.quantile(0.05),
            p50: e.quantile(0.50),
            p95: e.quantile(0.95),
        }
    }
}

/// Interferer state fractions over one slice of the INR ECDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateInterval {
    pub quantile_range: (f64, f64),
    pub los_fraction: f64,
    pub nlos_fraction: f64,
    pub outage_fraction: f64,
    pub n_interferers: u64,
}

/// Interferer-state probabilities for the two ECDF intervals split at
/// `split_quantile`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateTable {
    pub split_quantile: f64,
    pub bottom: StateInterval,
    pub upper: StateInterval,
}

/// Pool interferer states across served drops, split into the bottom
/// `split_quantile` of the INR ECDF and the rest.
pub fn interferer_state_table(results: &[IterationResult], split_quantile: f64) -> StateTable {
    assert!(
        split_quantile > 0.0 && split_quantile < 1.0,
        "split quantile must be in (0, 1)"
    );
    let mut served: Vec<&IterationResult> = results.iter().filter(|r| r.is_served()).collect();
    served.sort_by(|a, b| {
        a.budget
            .inr_db
            .partial_cmp(&b.budget.inr_db)
            .unwrap()
            .then(a.index.cmp(&b.index))
    });
    let k = ((split_quantile * served.len() as f64).floor() as usize).min(served.len());

    let interval = |slice: &[&IterationResult], range: (f64, f64)| {
        let mut counts = StateCounts::default();
        for r in slice {
            counts.los += r.budget.interferer_states.los;
            counts.nlos += r.budget.interferer_states.nlos;
            counts.outage += r.budget.interferer_states.outage;
        }
        let total = counts.total() as f64;
        let frac = |c: u32| if total > 0.0 { c as f64 / total } else { 0.0 };
        StateInterval {
            quantile_range: range,
            los_fraction: frac(counts.los),
            nlos_fraction: frac(counts.nlos),
            outage_fraction: frac(counts.outage),
            n_interferers: counts.total() as u64,
        }
    };

    StateTable {
        split_quantile,
        bottom: interval(&served[..k], (0.0, split_quantile)),
        upper: interval(&served[k..], (split_quantile, 1.0)),
    }
}

/// Aggregated campaign output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub iterations: u64,
    pub served_count: u64,
    pub coverage_outage_fraction: f64,
    pub inr_ecdf: Ecdf,
    pub sinr_ecdf: Ecdf,
    /// Interference-less baseline: the same drops with the interference sum
    /// forced to zero.
    pub snr_ecdf: Ecdf,
    pub inr_percentiles: Percentiles,
    pub sinr_percentiles: Percentiles,
    pub regime: Regime,
    pub fraction_above_threshold: f64,
    pub regime_threshold_db: f64,
    pub interferer_state_table: StateTable,
    pub results: Vec<IterationResult>,
}

/// Run one full drop. The result is fully determined by
/// `(scenario, params, master_seed, index)`.
pub fn run_iteration(
    scenario: &ScenarioConfig,
    params: &ChannelParams,
    index: u64,
) -> IterationResult {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.master_seed);
    rng.set_stream(index);

    let deployment = Deployment::sample(scenario, &mut rng);
    let n_bs = deployment.n_bs();
    let n_ue = deployment.n_ue();
    let noise_dbm = scenario.noise_power_dbm();

    // Link states and pathlosses for every BS-UE pair, BS-outer order.
    // Outage is encoded as infinite pathloss.
    let mut state = vec![LinkState::Outage; n_bs * n_ue];
    let mut pl = vec![f64::INFINITY; n_bs * n_ue];
    for (b, bs_pos) in deployment.bs_positions.iter().enumerate() {
        for (u, ue_pos) in deployment.ue_positions.iter().enumerate() {
            let geom = LinkGeometry::between(bs_pos, ue_pos, params);
            let s = sample_link_state(geom.distance_m, params, &mut rng);
            state[b * n_ue + u] = s;
            if s != LinkState::Outage {
                pl[b * n_ue + u] = pathloss_db(geom.distance_m, s, params, &mut rng);
            }
        }
    }

    // Min-pathloss association for every UE.
    let associations: Vec<Option<usize>> = (0..n_ue)
        .map(|u| {
            let column: Vec<f64> = (0..n_bs).map(|b| pl[b * n_ue + u]).collect();
            associate(&column)
        })
        .collect();

    // Blind scheduling; the tagged drop then studies the typical UE, so its
    // serving BS transmits to it this slot (the blind draw is still made, to
    // keep the stream aligned across configurations).
    let mut schedule = schedule_blind(n_bs, &associations, &mut rng);
    let serving = associations[0];
    if let Some(s) = serving {
        schedule[s] = Some(0);
    }

    let Some(s) = serving else {
        // Coverage outage: no usable link toward the typical UE. States of
        // active BSs are still tallied for completeness.
        let mut states = StateCounts::default();
        for b in 0..n_bs {
            if schedule[b].is_some() {
                states.record(state[b * n_ue]);
            }
        }
        return IterationResult {
            index,
            budget: LinkBudget::coverage_outage(noise_dbm, states),
            interferers: Vec::new(),
        };
    };

    // Serving link: full channel, beams aligned to its strongest cluster.
    let serving_geom = LinkGeometry::between(
        &deployment.bs_positions[s],
        &deployment.ue_positions[0],
        params,
    );
    let serving_channel = sample_channel_matrix(
        &serving_geom,
        state[s * n_ue],
        pl[s * n_ue],
        params,
        &scenario.bs_array,
        &scenario.ue_array,
        &mut rng,
    );
    let pair = align_beams(&serving_channel);
    let serving_gain = beamforming_gain(serving_channel.h_matrix.as_ref().unwrap(), &pair);
    let serving_power = LinkPower {
        pathloss_db: serving_channel.pathloss_db,
        gain_linear: serving_gain,
    };

    // Interfering links: every other active BS, its transmit beam pointed at
    // the strongest cluster of its own scheduled link, received through the
    // typical UE's fixed beam.
    let mut interferers = Vec::new();
    let mut interferer_powers = Vec::new();
    let mut states = StateCounts::default();
    for b in 0..n_bs {
        if b == s {
            continue;
        }
        let Some(scheduled_ue) = schedule[b] else {
            continue;
        };
        let own_geom = LinkGeometry::between(
            &deployment.bs_positions[b],
            &deployment.ue_positions[scheduled_ue],
            params,
        );
        let own_clusters = sample_clusters(&own_geom, params, &mut rng);
        let aim = own_clusters
            .iter()
            .fold(None::<&crate::channel::Cluster>, |best, c| match best {
                Some(bc) if bc.power_fraction >= c.power_fraction => Some(bc),
                _ => Some(c),
            })
            .expect("at least one cluster");
        let w_tx = steering_beam(&scenario.bs_array, aim.aod_azimuth, aim.aod_elevation);

        let link_state = state[b * n_ue];
        states.record(link_state);
        if link_state == LinkState::Outage {
            interferers.push(InterfererLink {
                bs_index: b,
                state: link_state,
                pathloss_db: f64::INFINITY,
                gain_linear: 0.0,
            });
            interferer_powers.push(LinkPower {
                pathloss_db: f64::INFINITY,
                gain_linear: 0.0,
            });
            continue;
        }

        let geom = LinkGeometry::between(
            &deployment.bs_positions[b],
            &deployment.ue_positions[0],
            params,
        );
        let channel = sample_channel_matrix(
            &geom,
            link_state,
            pl[b * n_ue],
            params,
            &scenario.bs_array,
            &scenario.ue_array,
            &mut rng,
        );
        let gain = beamforming_gain(
            channel.h_matrix.as_ref().unwrap(),
            &BeamPair::new(w_tx, pair.w_rx.clone()),
        );
        interferers.push(InterfererLink {
            bs_index: b,
            state: link_state,
            pathloss_db: channel.pathloss_db,
            gain_linear: gain,
        });
        interferer_powers.push(LinkPower {
            pathloss_db: channel.pathloss_db,
            gain_linear: gain,
        });
    }

    let budget = LinkBudget::served(
        s,
        serving_channel.state,
        scenario.tx_power_dbm,
        &serving_power,
        &interferer_powers,
        states,
        noise_dbm,
    );
    IterationResult {
        index,
        budget,
        interferers,
    }
}

/// Run a full campaign: `scenario.iterations` independent drops in parallel,
/// aggregated into ECDFs, percentiles, a state table, and a regime label.
///
/// By default distributions are conditioned on served drops; with
/// `ecdf_include_coverage_outage` set, coverage-outage drops enter both
/// ECDFs as negative-infinity samples instead.
pub fn run_campaign(config: &SimConfig) -> Result<CampaignResult, EngineError> {
    config.validate()?;
    let params = config.channel_params()?;
    let scenario = &config.scenario;

    let results: Vec<IterationResult> = (0..scenario.iterations)
        .into_par_iter()
        .map(|i| run_iteration(scenario, params, i))
        .collect();

    aggregate(scenario, results)
}

fn aggregate(
    scenario: &ScenarioConfig,
    results: Vec<IterationResult>,
) -> Result<CampaignResult, EngineError> {
    let iterations = results.len() as u64;
    let served_count = results.iter().filter(|r| r.is_served()).count() as u64;
    if served_count == 0 {
        return Err(EngineError::NoCoverage { iterations });
    }

    let mut inr = Vec::with_capacity(results.len());
    let mut sinr = Vec::with_capacity(results.len());
    let mut snr = Vec::with_capacity(results.len());
    for r in &results {
        if r.is_served() {
            inr.push(r.budget.inr_db);
            sinr.push(r.budget.sinr_db);
            snr.push(r.budget.snr_db);
        } else if scenario.ecdf_include_coverage_outage {
            inr.push(f64::NEG_INFINITY);
            sinr.push(f64::NEG_INFINITY);
            snr.push(f64::NEG_INFINITY);
        }
    }

    let inr_ecdf = Ecdf::new(inr);
    let sinr_ecdf = Ecdf::new(sinr);
    let snr_ecdf = Ecdf::new(snr);
    let inr_percentiles = Percentiles::from_ecdf(&inr_ecdf);
    let sinr_percentiles = Percentiles::from_ecdf(&sinr_ecdf);
    let (regime, fraction_above_threshold) = classify_regime(
        &inr_ecdf,
        DEFAULT_REGIME_THRESHOLD_DB,
        DEFAULT_NOISE_MAX_FRACTION,
        DEFAULT_INTERFERENCE_MIN_FRACTION,
    );
    let table = interferer_state_table(&results, DEFAULT_TABLE_SPLIT_QUANTILE);

    Ok(CampaignResult {
        iterations,
        served_count,
        coverage_outage_fraction: 1.0 - served_count as f64 / iterations as f64,
        inr_ecdf,
        sinr_ecdf,
        snr_ecdf,
        inr_percentiles,
        sinr_percentiles,
        regime,
        fraction_above_threshold,
        regime_threshold_db: DEFAULT_REGIME_THRESHOLD_DB,
        interferer_state_table: table,
        results,
    })
}

/// One row of a density sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub carrier_frequency_ghz: f64,
    pub lambda_bs_per_km2: f64,
    pub lambda_ue_per_km2: f64,
    pub sinr_p5_db: f64,
    pub sinr_p50_db: f64,
    pub inr_p50_db: f64,
    pub regime: Regime,
    pub fraction_above_threshold: f64,
    pub coverage_outage_fraction: f64,
}

/// One campaign per BS density. The UE density scales with the template's
/// UE-per-BS ratio, mirroring how deployments densify both sides together.
pub fn density_sweep(
    config: &SimConfig,
    densities: &[f64],
) -> Result<Vec<SweepRow>, EngineError> {
    assert!(!densities.is_empty(), "density list must be non-empty");
    let ue_ratio = config.scenario.lambda_ue_per_km2 / config.scenario.lambda_bs_per_km2;
    let mut rows = Vec::with_capacity(densities.len());
    for &lambda_bs in densities {
        let mut cfg = config.clone();
        cfg.scenario.lambda_bs_per_km2 = lambda_bs;
        cfg.scenario.lambda_ue_per_km2 = ue_ratio * lambda_bs;
        let r = run_campaign(&cfg)?;
        rows.push(SweepRow {
            carrier_frequency_ghz: cfg.scenario.carrier_frequency_ghz,
            lambda_bs_per_km2: lambda_bs,
            lambda_ue_per_km2: cfg.scenario.lambda_ue_per_km2,
            sinr_p5_db: r.sinr_ecdf.quantile(0.05),
            sinr_p50_db: r.sinr_ecdf.quantile(0.50),
            inr_p50_db: r.inr_ecdf.quantile(0.50),
            regime: r.regime,
            fraction_above_threshold: r.fraction_above_threshold,
            coverage_outage_fraction: r.coverage_outage_fraction,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ArrayShape;
    use proptest::prelude::*;

    fn table_28() -> ChannelParams {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/channel_28ghz.json"
        );
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn small_scenario() -> ScenarioConfig {
        ScenarioConfig {
            lambda_bs_per_km2: 30.0,
            lambda_ue_per_km2: 300.0,
            iterations: 200,
            master_seed: 11,
            bs_array: ArrayShape::new(4, 4),
            ue_array: ArrayShape::new(2, 2),
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn ecdf_definition_and_percentiles() {
        let e = Ecdf::new(vec![-5.0, 0.0, 5.0]);
        assert!((e.eval(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((e.eval(-5.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.eval(-6.0), 0.0);
        assert_eq!(e.eval(5.0), 1.0);

        let m = Ecdf::new(vec![3.0, 1.0, 2.0]);
        assert_eq!(m.quantile(0.5), 2.0);
        assert_eq!(m.quantile(1.0), 3.0);
        assert_eq!(m.quantile(0.05), 1.0);
    }

    #[test]
    fn ecdf_handles_negative_infinity_samples() {
        let e = Ecdf::new(vec![f64::NEG_INFINITY, -3.0, 4.0]);
        assert!((e.eval(-3.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.quantile(0.05), f64::NEG_INFINITY);
    }

    #[test]
    fn ks_distance_of_identical_samples_is_zero() {
        let a = Ecdf::new(vec![1.0, 2.0, 3.0]);
        let b = Ecdf::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(a.ks_distance(&b), 0.0);
        let c = Ecdf::new(vec![10.0, 11.0]);
        assert_eq!(a.ks_distance(&c), 1.0);
    }

    #[test]
    fn regime_classification_boundaries() {
        let all_low = Ecdf::new(vec![-20.0, -10.0, -3.0]);
        let (r, f) = classify_regime(&all_low, 0.0, 0.2, 0.8);
        assert_eq!(r, Regime::NoiseLimited);
        assert_eq!(f, 0.0);

        let all_high = Ecdf::new(vec![1.0, 2.0, 3.0]);
        let (r, f) = classify_regime(&all_high, 0.0, 0.2, 0.8);
        assert_eq!(r, Regime::InterferenceLimited);
        assert_eq!(f, 1.0);

        let half = Ecdf::new(vec![-1.0, 1.0]);
        let (r, _) = classify_regime(&half, 0.0, 0.2, 0.8);
        assert_eq!(r, Regime::Hybrid);
    }

    #[test]
    fn iteration_is_deterministic_for_seed_and_index() {
        let sc = small_scenario();
        let t = table_28();
        let a = run_iteration(&sc, &t, 3);
        let b = run_iteration(&sc, &t, 3);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = run_iteration(&sc, &t, 4);
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn tiny_bs_density_mostly_coverage_outage() {
        let sc = ScenarioConfig {
            lambda_bs_per_km2: 0.2,
            lambda_ue_per_km2: 20.0,
            iterations: 2000,
            master_seed: 5,
            bs_array: ArrayShape::new(2, 2),
            ue_array: ArrayShape::new(2, 2),
            ..ScenarioConfig::default()
        };
        let t = table_28();
        let outage = (0..sc.iterations)
            .filter(|&i| !run_iteration(&sc, &t, i).is_served())
            .count() as f64
            / sc.iterations as f64;
        // Poisson void probability is a lower bound on coverage outage:
        // an empty BS draw can never serve.
        let area = std::f64::consts::PI * (sc.region_radius_m / 1000.0).powi(2);
        let void = (-sc.lambda_bs_per_km2 * area).exp();
        let sigma = (void * (1.0 - void) / sc.iterations as f64).sqrt();
        assert!(
            outage > void - 3.0 * sigma,
            "coverage outage {outage} below void bound {void}"
        );
    }

    #[test]
    fn no_other_ues_means_no_interferers() {
        let sc = ScenarioConfig {
            lambda_ue_per_km2: 0.0,
            iterations: 50,
            master_seed: 9,
            bs_array: ArrayShape::new(2, 2),
            ue_array: ArrayShape::new(2, 2),
            ..ScenarioConfig::default()
        };
        let t = table_28();
        let mut saw_served = false;
        for i in 0..sc.iterations {
            let r = run_iteration(&sc, &t, i);
            if r.is_served() {
                saw_served = true;
                assert_eq!(r.budget.interferer_states.total(), 0);
                assert_eq!(r.budget.inr_db, f64::NEG_INFINITY);
                assert!(r.interferers.is_empty());
            }
        }
        assert!(saw_served);
    }

    #[test]
    fn interferer_counts_match_active_bs_accounting() {
        let sc = small_scenario();
        let t = table_28();
        for i in 0..50 {
            let r = run_iteration(&sc, &t, i);
            if r.is_served() {
                assert_eq!(r.budget.interferer_states.total() as usize, r.interferers.len());
                // budget inr must equal recomputing from the recorded links
                let powers: Vec<LinkPower> = r
                    .interferers
                    .iter()
                    .map(|l| LinkPower {
                        pathloss_db: l.pathloss_db,
                        gain_linear: l.gain_linear,
                    })
                    .collect();
                let inr = crate::network::compute_inr(
                    sc.tx_power_dbm,
                    &powers,
                    sc.noise_power_dbm(),
                );
                if inr.is_finite() {
                    assert!((inr - r.budget.inr_db).abs() < 1e-9);
                } else {
                    assert_eq!(inr, r.budget.inr_db);
                }
            }
        }
    }

    #[test]
    fn campaign_aggregates_and_conditions_on_served() {
        let cfg = SimConfig::new(small_scenario(), vec![table_28()]).unwrap();
        let r = run_campaign(&cfg).unwrap();
        assert_eq!(r.iterations, 200);
        assert_eq!(r.inr_ecdf.len() as u64, r.served_count);
        assert_eq!(r.sinr_ecdf.len() as u64, r.served_count);
        let expect_outage = 1.0 - r.served_count as f64 / r.iterations as f64;
        assert!((r.coverage_outage_fraction - expect_outage).abs() < 1e-15);
        // SINR <= SNR sample by sample implies the same for quantiles
        assert!(r.sinr_ecdf.quantile(0.5) <= r.snr_ecdf.quantile(0.5) + 1e-12);
    }

    #[test]
    fn campaign_can_include_outage_drops_as_neg_infinity() {
        let mut sc = small_scenario();
        sc.ecdf_include_coverage_outage = true;
        sc.lambda_bs_per_km2 = 5.0; // plenty of outage drops
        sc.iterations = 300;
        let cfg = SimConfig::new(sc, vec![table_28()]).unwrap();
        let r = run_campaign(&cfg).unwrap();
        assert_eq!(r.inr_ecdf.len() as u64, r.iterations);
        assert!(r.inr_ecdf.samples()[0] == f64::NEG_INFINITY || r.coverage_outage_fraction == 0.0);
    }

    #[test]
    fn no_coverage_is_an_error() {
        let sc = ScenarioConfig {
            lambda_bs_per_km2: 1e-9,
            lambda_ue_per_km2: 1.0,
            iterations: 5,
            master_seed: 1,
            ..ScenarioConfig::default()
        };
        let cfg = SimConfig::new(sc, vec![table_28()]).unwrap();
        match run_campaign(&cfg) {
            Err(EngineError::NoCoverage { iterations: 5 }) => {}
            other => panic!("expected NoCoverage, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_all_los_interferers_fill_the_table() {
        let mk = |idx: u64, inr: f64, los: u32| IterationResult {
            index: idx,
            budget: LinkBudget::served(
                0,
                LinkState::Los,
                30.0,
                &LinkPower {
                    pathloss_db: 100.0,
                    gain_linear: 10f64.powf((inr + 100.0 - 30.0 - 80.0) / 10.0),
                },
                &[],
                StateCounts {
                    los,
                    nlos: 0,
                    outage: 0,
                },
                -80.0,
            ),
            interferers: Vec::new(),
        };
        // give them distinct INRs via distinct budget fields
        let mut results = Vec::new();
        for i in 0..100u64 {
            let mut r = mk(i, 0.0, 3);
            r.budget.inr_db = i as f64 / 10.0;
            results.push(r);
        }
        let table = interferer_state_table(&results, 0.12);
        assert!((table.bottom.los_fraction - 1.0).abs() < 1e-12);
        assert_eq!(table.bottom.nlos_fraction, 0.0);
        assert_eq!(table.bottom.outage_fraction, 0.0);
        assert!((table.upper.los_fraction - 1.0).abs() < 1e-12);
        assert_eq!(table.bottom.n_interferers, 12 * 3);
        assert_eq!(table.upper.n_interferers, 88 * 3);
    }

    #[test]
    fn sweep_single_density_matches_direct_campaign() {
        let cfg = SimConfig::new(small_scenario(), vec![table_28()]).unwrap();
        let direct = run_campaign(&cfg).unwrap();
        let rows = density_sweep(&cfg, &[cfg.scenario.lambda_bs_per_km2]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].sinr_p5_db, direct.sinr_ecdf.quantile(0.05));
        assert_eq!(rows[0].sinr_p50_db, direct.sinr_ecdf.quantile(0.50));
        assert_eq!(rows[0].inr_p50_db, direct.inr_ecdf.quantile(0.50));
    }

    #[test]
    fn sweep_repeated_density_gives_identical_rows() {
        let mut sc = small_scenario();
        sc.iterations = 100;
        let cfg = SimConfig::new(sc, vec![table_28()]).unwrap();
        let rows = density_sweep(&cfg, &[60.0, 60.0]).unwrap();
        assert_eq!(rows[0], rows[1]);
    }

    proptest! {
        #[test]
        fn ecdf_is_monotone_and_bounded(
            mut xs in proptest::collection::vec(-100.0f64..100.0, 1..200),
            probe in -120.0f64..120.0,
        ) {
            let e = Ecdf::new(xs.clone());
            let f = e.eval(probe);
            prop_assert!((0.0..=1.0).contains(&f));
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert_eq!(e.eval(*xs.last().unwrap()), 1.0);
            // monotone: F at a smaller probe never exceeds F at a larger one
            let f_lo = e.eval(probe - 5.0);
            prop_assert!(f_lo <= f);
        }

        #[test]
        fn quantile_is_a_sample_and_ordered(
            xs in proptest::collection::vec(-50.0f64..50.0, 1..100),
            p in 0.01f64..1.0,
        ) {
            let e = Ecdf::new(xs.clone());
            let q = e.quantile(p);
            prop_assert!(xs.contains(&q));
            prop_assert!(e.quantile(0.01) <= e.quantile(1.0));
        }
    }
}
