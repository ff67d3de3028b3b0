//! Association, blind scheduling, and the per-drop link budget.
//!
//! Power bookkeeping follows one rule: every term of the SINR/INR ratios is
//! converted to linear milliwatts, summed, and only the final ratios go back
//! to dB. Outage links carry infinite pathloss, which makes their linear
//! received power exactly zero.

use crate::channel::LinkState;
use serde::{Deserialize, Serialize};

/// Associate a UE to the BS with the smallest pathloss.
///
/// `pathloss_db[b]` is the UE's pathloss toward BS `b`, with `f64::INFINITY`
/// for outage links. Returns `None` when every link is in outage (coverage
/// outage). Ties break toward the lowest BS index.
pub fn associate(pathloss_db: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, &pl) in pathloss_db.iter().enumerate() {
        if pl.is_finite() {
            match best {
                Some((_, b)) if b <= pl => {}
                _ => best = Some((idx, pl)),
            }
        }
    }
    best.map(|(idx, _)| idx)
}

/// Full-buffer blind scheduling: every BS with at least one associated UE
/// picks one of them uniformly at random and transmits; BSs with none stay
/// silent.
///
/// `associations[u]` is UE `u`'s serving BS (or `None` for unserved UEs).
/// Returns, per BS, the scheduled UE index or `None` for a silent BS.
pub fn schedule_blind<R: rand::Rng>(
    n_bs: usize,
    associations: &[Option<usize>],
    rng: &mut R,
) -> Vec<Option<usize>> {
    let mut per_bs: Vec<Vec<usize>> = vec![Vec::new(); n_bs];
    for (ue, assoc) in associations.iter().enumerate() {
        if let Some(bs) = *assoc {
            per_bs[bs].push(ue);
        }
    }
    per_bs
        .iter()
        .map(|ues| {
            if ues.is_empty() {
                None
            } else {
                Some(ues[rng.random_range(0..ues.len())])
            }
        })
        .collect()
}

/// Received-power description of one link at the typical UE: the pathloss
/// draw and the beamforming gain under the drop's actual beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPower {
    pub pathloss_db: f64,
    pub gain_linear: f64,
}

impl LinkPower {
    /// Pathloss-and-beamforming received power for a transmit power in dBm,
    /// in linear milliwatts. Exactly zero for infinite pathloss.
    pub fn rx_power_mw(&self, tx_power_dbm: f64) -> f64 {
        10f64.powf((tx_power_dbm - self.pathloss_db) / 10.0) * self.gain_linear
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// SINR at the typical UE in dB:
/// `10*log10(S / (sum_k I_k + N))` with all terms in linear milliwatts.
pub fn compute_sinr(
    tx_power_dbm: f64,
    serving: &LinkPower,
    interferers: &[LinkPower],
    noise_dbm: f64,
) -> f64 {
    let signal = serving.rx_power_mw(tx_power_dbm);
    let interference: f64 = interferers.iter().map(|l| l.rx_power_mw(tx_power_dbm)).sum();
    mw_to_dbm(signal / (interference + dbm_to_mw(noise_dbm)))
}

/// INR at the typical UE in dB: `10*log10(sum_k I_k / N)`. Negative infinity
/// when the interferer set is empty or entirely in outage.
pub fn compute_inr(tx_power_dbm: f64, interferers: &[LinkPower], noise_dbm: f64) -> f64 {
    let interference: f64 = interferers.iter().map(|l| l.rx_power_mw(tx_power_dbm)).sum();
    mw_to_dbm(interference / dbm_to_mw(noise_dbm))
}

/// Interferer counts by link state toward the typical UE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCounts {
    pub los: u32,
    pub nlos: u32,
    pub outage: u32,
}

impl StateCounts {
    pub fn record(&mut self, state: LinkState) {
        match state {
            LinkState::Los => self.los += 1,
            LinkState::Nlos => self.nlos += 1,
            LinkState::Outage => self.outage += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.los + self.nlos + self.outage
    }
}

/// The link-budget record of one drop at the typical UE.
///
/// For coverage-outage drops (`serving_bs == None`) the signal and ratio
/// fields are NaN; the drop is counted separately and excluded from the
/// default distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub serving_bs: Option<usize>,
    pub serving_state: Option<LinkState>,
    pub received_signal_dbm: f64,
    /// Negative infinity when no interferer contributes power.
    pub interference_dbm: f64,
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub inr_db: f64,
    pub sinr_db: f64,
    pub interferer_states: StateCounts,
}

impl LinkBudget {
    /// Budget for a served drop. Interferer entries must already encode
    /// outage as infinite pathloss; `interferer_states` counts every active
    /// non-serving BS, including outage ones.
    pub fn served(
        serving_bs: usize,
        serving_state: LinkState,
        tx_power_dbm: f64,
        serving: &LinkPower,
        interferers: &[LinkPower],
        interferer_states: StateCounts,
        noise_dbm: f64,
    ) -> Self {
        let signal_mw = serving.rx_power_mw(tx_power_dbm);
        let interference_mw: f64 = interferers
            .iter()
            .map(|l| l.rx_power_mw(tx_power_dbm))
            .sum();
        let noise_mw = dbm_to_mw(noise_dbm);
        Self {
            serving_bs: Some(serving_bs),
            serving_state: Some(serving_state),
            received_signal_dbm: mw_to_dbm(signal_mw),
            interference_dbm: mw_to_dbm(interference_mw),
            noise_dbm,
            snr_db: mw_to_dbm(signal_mw / noise_mw),
            inr_db: mw_to_dbm(interference_mw / noise_mw),
            sinr_db: mw_to_dbm(signal_mw / (interference_mw + noise_mw)),
            interferer_states,
        }
    }

    pub fn coverage_outage(noise_dbm: f64, interferer_states: StateCounts) -> Self {
        Self {
            serving_bs: None,
            serving_state: None,
            received_signal_dbm: f64::NAN,
            interference_dbm: f64::NAN,
            noise_dbm,
            snr_db: f64::NAN,
            inr_db: f64::NAN,
            sinr_db: f64::NAN,
            interferer_states,
        }
    }

    pub fn is_served(&self) -> bool {
        self.serving_bs.is_some()
    }
}
