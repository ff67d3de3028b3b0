//! Per-link channel sampling: three-state link classification, log-distance
//! pathloss with lognormal shadowing, and the cluster/subpath MIMO channel
//! matrix.
//!
//! Small-scale power is normalized so that `E[||H||_F^2] = n_tx * n_rx`;
//! pathloss is kept separate and applied in the link budget. Distances are
//! 3-D (planar separation plus the BS/UE height difference), which also keeps
//! `log10(d)` finite for co-located nodes. Cluster center azimuths are drawn
//! uniformly; cluster elevations follow the table's
//! [`ClusterElevationMode`](crate::params::ClusterElevationMode) (horizon by
//! default, geometric ray optionally); subpaths scatter around their cluster
//! center with the configured RMS spreads.

use crate::beamforming::array_response;
use crate::deployment::Point2;
use crate::linalg::CMat;
use crate::params::{ArrayShape, ChannelParams};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Propagation state of one BS-UE link for one drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkState {
    Los,
    Nlos,
    Outage,
}

impl LinkState {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkState::Los => "los",
            LinkState::Nlos => "nlos",
            LinkState::Outage => "outage",
        }
    }
}

/// Geometry of one link, precomputed from endpoint positions and heights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Planar separation in meters.
    pub horizontal_m: f64,
    /// 3-D separation in meters; this is the distance pathloss and link
    /// state are evaluated at.
    pub distance_m: f64,
    /// Elevation of the departure ray at the transmitter, radians from
    /// horizontal (negative = pointing down toward the UE).
    pub aod_elevation: f64,
    /// Elevation of the arrival ray at the receiver, radians from horizontal.
    pub aoa_elevation: f64,
}

impl LinkGeometry {
    pub fn between(bs: &Point2, ue: &Point2, params: &ChannelParams) -> Self {
        let horizontal_m = bs.distance(ue);
        let dz = params.bs_height_m - params.ue_height_m;
        Self {
            horizontal_m,
            distance_m: horizontal_m.hypot(dz),
            aod_elevation: (-dz).atan2(horizontal_m),
            aoa_elevation: dz.atan2(horizontal_m),
        }
    }
}

/// One subpath: angle offsets relative to the cluster center plus its
/// complex small-scale gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subpath {
    pub aod_azimuth_offset: f64,
    pub aod_elevation_offset: f64,
    pub aoa_azimuth_offset: f64,
    pub aoa_elevation_offset: f64,
    pub gain: Complex64,
}

/// One scattering cluster with its center angles and subpaths.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Fraction of small-scale power carried by this cluster, in (0, 1].
    pub power_fraction: f64,
    pub aod_azimuth: f64,
    pub aod_elevation: f64,
    pub aoa_azimuth: f64,
    pub aoa_elevation: f64,
    pub subpaths: Vec<Subpath>,
}

/// Everything sampled for one link in one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    pub state: LinkState,
    pub distance_m: f64,
    /// Infinite for `Outage`.
    pub pathloss_db: f64,
    pub clusters: Vec<Cluster>,
    /// `n_rx x n_tx`; `None` for `Outage`.
    pub h_matrix: Option<CMat>,
    pub tx_array: ArrayShape,
    pub rx_array: ArrayShape,
}

impl ChannelInstance {
    /// Cluster with the largest power fraction (lowest index on ties).
    pub fn strongest_cluster(&self) -> Option<&Cluster> {
        self.clusters.iter().fold(None, |best, c| match best {
            Some(b) if b.power_fraction >= c.power_fraction => Some(b),
            _ => Some(c),
        })
    }
}

/// Draw the LoS/NLoS/Outage state from the distance-dependent three-point
/// distribution of the loaded table.
pub fn sample_link_state<R: Rng>(
    distance_m: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> LinkState {
    assert!(distance_m >= 0.0, "distance must be >= 0");
    let p_los = params.link_state.p_los(distance_m);
    let p_out = params.link_state.p_outage(distance_m);
    let u: f64 = rng.random();
    if u < p_los {
        LinkState::Los
    } else if u < p_los + p_out {
        LinkState::Outage
    } else {
        LinkState::Nlos
    }
}

/// Log-distance pathloss with a fresh shadowing draw, dB.
///
/// Must not be called for `Outage` links; outage short-circuits to infinite
/// pathloss upstream.
pub fn pathloss_db<R: Rng>(
    distance_m: f64,
    state: LinkState,
    params: &ChannelParams,
    rng: &mut R,
) -> f64 {
    assert!(distance_m > 0.0, "distance must be > 0");
    let law = match state {
        LinkState::Los => &params.los,
        LinkState::Nlos => &params.nlos,
        LinkState::Outage => panic!("pathloss_db called on an Outage link"),
    };
    let shadowing = if law.shadowing_sigma_db > 0.0 {
        Normal::new(0.0, law.shadowing_sigma_db)
            .expect("valid shadowing sigma")
            .sample(rng)
    } else {
        0.0
    };
    law.intercept_db + law.slope * 10.0 * distance_m.log10() + shadowing
}

/// Sample the cluster/subpath structure of one non-outage link.
///
/// Cluster count is `max(1, Poisson(mean))`; raw cluster powers follow
/// `U^(r-1) * 10^(-Z/10)` and are normalized to sum to one; per-cluster
/// subpath counts are uniform integers; subpath angle offsets are normal
/// with the configured RMS spreads; subpath gains split the cluster power
/// equally with i.i.d. uniform phases.
pub fn sample_clusters<R: Rng>(
    geometry: &LinkGeometry,
    params: &ChannelParams,
    rng: &mut R,
) -> Vec<Cluster> {
    let model = &params.clusters;
    let count = if model.mean_count > 0.0 {
        (Poisson::new(model.mean_count)
            .expect("valid cluster mean")
            .sample(rng) as usize)
            .max(1)
    } else {
        1
    };

    let mut raw_powers = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.random();
        let z = if model.lognormal_sigma_db > 0.0 {
            Normal::new(0.0, model.lognormal_sigma_db)
                .expect("valid cluster sigma")
                .sample(rng)
        } else {
            0.0
        };
        raw_powers.push(u.powf(model.decay_exponent - 1.0) * 10f64.powf(-z / 10.0));
    }
    let total: f64 = raw_powers.iter().sum();

    let deg = PI / 180.0;
    let spreads = &params.angular_spreads;
    let offset_dist = |sigma_deg: f64| -> Option<Normal<f64>> {
        if sigma_deg > 0.0 {
            Some(Normal::new(0.0, sigma_deg * deg).expect("valid spread"))
        } else {
            None
        }
    };
    let aod_az_off = offset_dist(spreads.aod_azimuth_deg);
    let aod_el_off = offset_dist(spreads.aod_elevation_deg);
    let aoa_az_off = offset_dist(spreads.aoa_azimuth_deg);
    let aoa_el_off = offset_dist(spreads.aoa_elevation_deg);

    let (aod_el_center, aoa_el_center) = match params.cluster_elevation_mode {
        crate::params::ClusterElevationMode::Horizon => (0.0, 0.0),
        crate::params::ClusterElevationMode::Geometric => {
            (geometry.aod_elevation, geometry.aoa_elevation)
        }
    };

    let mut clusters = Vec::with_capacity(count);
    for raw in raw_powers {
        let power_fraction = if total > 0.0 { raw / total } else { 1.0 / count as f64 };
        let aod_azimuth = rng.random_range(-PI..PI);
        let aoa_azimuth = rng.random_range(-PI..PI);
        let n_subpaths =
            rng.random_range(params.subpaths.min_per_cluster..=params.subpaths.max_per_cluster);
        let amp = (power_fraction / n_subpaths as f64).sqrt();
        let mut subpaths = Vec::with_capacity(n_subpaths);
        for _ in 0..n_subpaths {
            let aod_azimuth_offset = aod_az_off.map_or(0.0, |n| n.sample(rng));
            let aod_elevation_offset = aod_el_off.map_or(0.0, |n| n.sample(rng));
            let aoa_azimuth_offset = aoa_az_off.map_or(0.0, |n| n.sample(rng));
            let aoa_elevation_offset = aoa_el_off.map_or(0.0, |n| n.sample(rng));
            let phase = rng.random_range(0.0..2.0 * PI);
            subpaths.push(Subpath {
                aod_azimuth_offset,
                aod_elevation_offset,
                aoa_azimuth_offset,
                aoa_elevation_offset,
                gain: Complex64::from_polar(amp, phase),
            });
        }
        clusters.push(Cluster {
            power_fraction,
            aod_azimuth,
            aod_elevation: aod_el_center,
            aoa_azimuth,
            aoa_elevation: aoa_el_center,
            subpaths,
        });
    }
    clusters
}

/// Accumulate the channel matrix `H = sum_p g_p a_rx(p) a_tx(p)^H` from a
/// cluster set, `n_rx x n_tx`.
pub fn channel_matrix_from_clusters(
    clusters: &[Cluster],
    tx_array: &ArrayShape,
    rx_array: &ArrayShape,
) -> CMat {
    let mut h = CMat::zeros(rx_array.n_elements(), tx_array.n_elements());
    for cluster in clusters {
        for sp in &cluster.subpaths {
            let a_tx = array_response(
                tx_array,
                cluster.aod_azimuth + sp.aod_azimuth_offset,
                cluster.aod_elevation + sp.aod_elevation_offset,
            );
            let a_rx = array_response(
                rx_array,
                cluster.aoa_azimuth + sp.aoa_azimuth_offset,
                cluster.aoa_elevation + sp.aoa_elevation_offset,
            );
            h.add_scaled_outer(sp.gain, &a_rx, &a_tx);
        }
    }
    h
}

/// Sample the full small-scale channel of a non-outage link and assemble the
/// per-link record. The pathloss is passed in because it is drawn by
/// [`pathloss_db`] as part of association, before matrices exist.
pub fn sample_channel_matrix<R: Rng>(
    geometry: &LinkGeometry,
    state: LinkState,
    pathloss_db: f64,
    params: &ChannelParams,
    tx_array: &ArrayShape,
    rx_array: &ArrayShape,
    rng: &mut R,
) -> ChannelInstance {
    assert!(
        state != LinkState::Outage,
        "sample_channel_matrix called on an Outage link"
    );
    let clusters = sample_clusters(geometry, params, rng);
    let h = channel_matrix_from_clusters(&clusters, tx_array, rx_array);
    ChannelInstance {
        state,
        distance_m: geometry.distance_m,
        pathloss_db,
        clusters,
        h_matrix: Some(h),
        tx_array: *tx_array,
        rx_array: *rx_array,
    }
}
