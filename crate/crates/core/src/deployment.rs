//! Poisson point process deployment of base stations and user terminals.
//!
//! Both populations live on a disc centered on the typical receiver at the
//! origin. Sampling is count-then-place: the point count is Poisson with mean
//! `density * area`, and each point is uniform on the disc via the
//! `r = R * sqrt(u)` radial transform, which together give the exact PPP law.

use crate::params::ScenarioConfig;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x_m: f64,
    pub y_m: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x_m: 0.0, y_m: 0.0 };

    pub fn new(x_m: f64, y_m: f64) -> Self {
        Self { x_m, y_m }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }

    pub fn norm(&self) -> f64 {
        self.x_m.hypot(self.y_m)
    }
}

/// Draw one homogeneous PPP realization on a disc of radius `radius_m`
/// centered at the origin. Density is points per square kilometer.
pub fn sample_ppp<R: Rng>(density_per_km2: f64, radius_m: f64, rng: &mut R) -> Vec<Point2> {
    assert!(density_per_km2 >= 0.0, "density must be >= 0");
    assert!(radius_m > 0.0, "radius must be > 0");
    let area_km2 = PI * (radius_m / 1000.0).powi(2);
    let mean = density_per_km2 * area_km2;
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("valid Poisson mean").sample(rng) as usize
    } else {
        0
    };
    (0..count)
        .map(|_| {
            let r = radius_m * rng.random::<f64>().sqrt();
            let theta = rng.random_range(-PI..PI);
            Point2::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

/// One Monte Carlo drop's node positions. The typical receiver is always
/// `ue_positions[0]` at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bs_positions: Vec<Point2>,
    pub ue_positions: Vec<Point2>,
}

impl Deployment {
    /// BS set at `lambda_bs`, UE set at `lambda_ue` with the typical UE
    /// prepended at the origin. An empty BS draw is a valid deployment.
    pub fn sample<R: Rng>(config: &ScenarioConfig, rng: &mut R) -> Self {
        let bs_positions = sample_ppp(config.lambda_bs_per_km2, config.region_radius_m, rng);
        let mut ue_positions = Vec::with_capacity(1);
        ue_positions.push(Point2::ORIGIN);
        if config.lambda_ue_per_km2 > 0.0 {
            ue_positions.extend(sample_ppp(
                config.lambda_ue_per_km2,
                config.region_radius_m,
                rng,
            ));
        }
        Self {
            bs_positions,
            ue_positions,
        }
    }

    pub fn n_bs(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn n_ue(&self) -> usize {
        self.ue_positions.len()
    }

    /// Debug/plotting dump: one `x_m,y_m,kind` row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_m,y_m,kind\n");
        for p in &self.bs_positions {
            let _ = writeln!(out, "{},{},bs", p.x_m, p.y_m);
        }
        for p in &self.ue_positions {
            let _ = writeln!(out, "{},{},ue", p.x_m, p.y_m);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Disc radius whose area is exactly 1 km^2.
    const UNIT_AREA_RADIUS_M: f64 = 564.189_583_547_756_3;

    #[test]
    fn poisson_mean_matches_density_times_area() {
        let mut r = rng(7);
        let draws = 50_000;
        let density = 120.0;
        let mean: f64 = (0..draws)
            .map(|_| sample_ppp(density, UNIT_AREA_RADIUS_M, &mut r).len() as f64)
            .sum::<f64>()
            / draws as f64;
        // Poisson standard-error bound: 3 * sqrt(lambda / n)
        let bound = 3.0 * (density / draws as f64).sqrt();
        assert!(
            (mean - density).abs() < bound,
            "sample mean {mean} outside {density} +/- {bound}"
        );
    }

    #[test]
    fn expected_count_30_on_unit_area() {
        let mut r = rng(3);
        let draws = 20_000;
        let mean: f64 = (0..draws)
            .map(|_| sample_ppp(30.0, UNIT_AREA_RADIUS_M, &mut r).len() as f64)
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 30.0).abs() < 3.0 * (30.0f64 / draws as f64).sqrt());
    }

    #[test]
    fn mean_cell_radius_at_density_30_is_about_103m() {
        // sqrt(1 / (pi * lambda)) in km, the mean-area-equivalent cell radius.
        let radius_m = (1.0 / (PI * 30.0)).sqrt() * 1000.0;
        assert!((radius_m - 103.0).abs() < 1.0, "got {radius_m}");
    }

    #[test]
    fn points_stay_inside_disc() {
        let mut r = rng(11);
        for _ in 0..100 {
            for p in sample_ppp(200.0, 250.0, &mut r) {
                assert!(p.norm() <= 250.0 + 1e-9);
            }
        }
    }

    #[test]
    fn typical_ue_is_element_zero_at_origin() {
        let cfg = ScenarioConfig::default();
        for seed in 0..20 {
            let d = Deployment::sample(&cfg, &mut rng(seed));
            assert_eq!(d.ue_positions[0], Point2::ORIGIN);
        }
    }

    #[test]
    fn empty_bs_draw_is_valid() {
        let cfg = ScenarioConfig {
            lambda_bs_per_km2: 1e-6,
            lambda_ue_per_km2: 1e-6,
            ..ScenarioConfig::default()
        };
        let mut saw_empty = false;
        for seed in 0..50 {
            let d = Deployment::sample(&cfg, &mut rng(seed));
            saw_empty |= d.bs_positions.is_empty();
            assert_eq!(d.ue_positions[0], Point2::ORIGIN);
        }
        assert!(saw_empty, "tiny density should produce empty BS draws");
    }

    #[test]
    fn ue_count_mean_includes_typical() {
        let cfg = ScenarioConfig {
            lambda_ue_per_km2: 300.0,
            region_radius_m: UNIT_AREA_RADIUS_M,
            ..ScenarioConfig::default()
        };
        let mut r = rng(5);
        let draws = 20_000;
        let mean: f64 = (0..draws)
            .map(|_| Deployment::sample(&cfg, &mut r).n_ue() as f64)
            .sum::<f64>()
            / draws as f64;
        let bound = 3.0 * (300.0f64 / draws as f64).sqrt();
        assert!((mean - 301.0).abs() < bound, "mean {mean}");
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = ScenarioConfig::default();
        let a = Deployment::sample(&cfg, &mut rng(42));
        let b = Deployment::sample(&cfg, &mut rng(42));
        assert_eq!(a, b);
        // bit-for-bit on the coordinates
        for (pa, pb) in a.bs_positions.iter().zip(b.bs_positions.iter()) {
            assert_eq!(pa.x_m.to_bits(), pb.x_m.to_bits());
            assert_eq!(pa.y_m.to_bits(), pb.y_m.to_bits());
        }
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let cfg = ScenarioConfig::default();
        let d = Deployment::sample(&cfg, &mut rng(1));
        let csv = d.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x_m,y_m,kind"));
        assert_eq!(csv.lines().count(), 1 + d.n_bs() + d.n_ue());
    }
}
