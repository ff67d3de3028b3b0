//! Uniform planar array responses, steering beams, and beamforming gain.
//!
//! Angle convention, used everywhere in this crate: azimuth in [-pi, pi)
//! measured from the x-axis, elevation measured from the horizontal plane
//! (positive up). The array response of a `rows x cols` UPA with element
//! pitch `s` (in wavelengths) is
//!
//! ```text
//! a(az, el)[r, c] = exp(j * 2*pi * s * (r*sin(el) + c*cos(el)*sin(az)))
//! ```
//!
//! Elements are isotropic; all gain comes from the array factor. The ideal
//! UPA keeps its back-to-front symmetric lobe (`a(az) == a(pi - az)`), so
//! interference through the mirror lobe is part of the model.

use crate::channel::ChannelInstance;
use crate::linalg::CMat;
use crate::params::ArrayShape;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Unit-norm transmit/receive beamforming vectors for one link.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPair {
    pub w_tx: Vec<Complex64>,
    pub w_rx: Vec<Complex64>,
}

impl BeamPair {
    pub fn new(w_tx: Vec<Complex64>, w_rx: Vec<Complex64>) -> Self {
        debug_assert!((crate::linalg::norm_sq(&w_tx).sqrt() - 1.0).abs() < 1e-12);
        debug_assert!((crate::linalg::norm_sq(&w_rx).sqrt() - 1.0).abs() < 1e-12);
        Self { w_tx, w_rx }
    }
}

/// UPA array response (unit-modulus entries), indexed `r * cols + c`.
pub fn array_response(shape: &ArrayShape, azimuth: f64, elevation: f64) -> Vec<Complex64> {
    let s = shape.element_spacing_wavelengths;
    let row_phase = 2.0 * PI * s * elevation.sin();
    let col_phase = 2.0 * PI * s * elevation.cos() * azimuth.sin();
    let mut v = Vec::with_capacity(shape.n_elements());
    for r in 0..shape.rows {
        for c in 0..shape.cols {
            let phase = row_phase * r as f64 + col_phase * c as f64;
            v.push(Complex64::from_polar(1.0, phase));
        }
    }
    v
}

/// Norm-one steering beam: the unit-norm `w` maximizing `|w^H a(az, el)|`,
/// which is the array response itself scaled to unit norm (the Hermitian
/// inner product supplies the phase conjugation).
pub fn steering_beam(shape: &ArrayShape, azimuth: f64, elevation: f64) -> Vec<Complex64> {
    let n = shape.n_elements() as f64;
    let scale = 1.0 / n.sqrt();
    array_response(shape, azimuth, elevation)
        .into_iter()
        .map(|z| z * scale)
        .collect()
}

/// Beamforming gain of a link: `|w_rx^H H w_tx|^2`, linear scale.
pub fn beamforming_gain(h: &CMat, pair: &BeamPair) -> f64 {
    assert_eq!(
        (h.rows(), h.cols()),
        (pair.w_rx.len(), pair.w_tx.len()),
        "beam/channel dimension mismatch: H is {}x{}, w_rx has {}, w_tx has {}",
        h.rows(),
        h.cols(),
        pair.w_rx.len(),
        pair.w_tx.len()
    );
    h.quadratic_form(&pair.w_rx, &pair.w_tx).norm_sqr()
}

/// Steering beams pointed at the departure/arrival center angles of the
/// strongest-power cluster. This is the default "perfectly aligned" rule for
/// a serving link; its own transmit beam is what an interfering transmitter
/// points at its scheduled user.
pub fn align_beams(channel: &ChannelInstance) -> BeamPair {
    let cluster = channel
        .strongest_cluster()
        .expect("align_beams requires a non-outage channel");
    let w_tx = steering_beam(&channel.tx_array, cluster.aod_azimuth, cluster.aod_elevation);
    let w_rx = steering_beam(&channel.rx_array, cluster.aoa_azimuth, cluster.aoa_elevation);
    BeamPair::new(w_tx, w_rx)
}

/// Diagnostic alternative to [`align_beams`]: the gain-optimal pair from the
/// dominant singular vectors of `H`, found by power iteration on `H^H H`.
pub fn svd_beams(h: &CMat) -> BeamPair {
    let n_tx = h.cols();
    let n_rx = h.rows();
    let mut v: Vec<Complex64> =
        vec![Complex64::new(1.0 / (n_tx as f64).sqrt(), 0.0); n_tx];
    let mut sigma_sq = 0.0_f64;
    for _ in 0..200 {
        let u = h.mul_vec(&v);
        let mut w = h.mul_vec_adjoint(&u);
        let norm = crate::linalg::norm_sq(&w).sqrt();
        if norm == 0.0 {
            // zero channel: any beams give zero gain
            return BeamPair::new(v, vec![Complex64::new(1.0 / (n_rx as f64).sqrt(), 0.0); n_rx]);
        }
        for z in &mut w {
            *z /= norm;
        }
        let prev = sigma_sq;
        sigma_sq = norm;
        v = w;
        if (sigma_sq - prev).abs() <= 1e-14 * sigma_sq.max(1.0) {
            break;
        }
    }
    let mut u = h.mul_vec(&v);
    let un = crate::linalg::norm_sq(&u).sqrt();
    if un > 0.0 {
        for z in &mut u {
            *z /= un;
        }
    } else {
        u = vec![Complex64::new(1.0 / (n_rx as f64).sqrt(), 0.0); n_rx];
    }
    BeamPair::new(v, u)
}
