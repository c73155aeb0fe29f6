//! Spatial process samplers: the Poisson line process carrying 1D Poisson
//! vehicles (a Cox process), the binomial UAV field on a disk, and the
//! deterministic deployment builder for S, R, D1, D2.
//!
//! Fields are sampled in receiver-centered coordinates: the origin is the
//! ground projection of whichever node measures the interference, which is
//! also the reference point of the analytical Laplace transforms.

use rand::Rng;

use crate::channel::NodeKind;
use crate::config::{Platform, Role, SystemConfig};
use crate::error::{Error, Result};

/// A line in the plane: perpendicular distance from the origin and the
/// angle of the perpendicular foot, which together identify it uniquely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub perp_distance: f64,
    pub angle: f64,
}

impl Line {
    /// The fixed line through the origin spanning the x-axis.
    pub fn x_axis() -> Self {
        Line {
            perp_distance: 0.0,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }

    /// Foot of the perpendicular from the origin.
    pub fn foot(&self) -> [f64; 2] {
        [
            self.perp_distance * self.angle.cos(),
            self.perp_distance * self.angle.sin(),
        ]
    }

    /// Unit direction along the line.
    pub fn direction(&self) -> [f64; 2] {
        [-self.angle.sin(), self.angle.cos()]
    }

    /// Point at signed arclength `t` from the perpendicular foot.
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        let f = self.foot();
        let d = self.direction();
        [f[0] + t * d[0], f[1] + t * d[1]]
    }
}

/// One vehicle of a Cox field, tagged with its parent line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vehicle {
    pub position: [f64; 2],
    pub line_index: usize,
}

/// A sampled realization of the line-and-vehicle field. The fixed line L0
/// is always stored at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxField {
    pub lines: Vec<Line>,
    pub vehicles: Vec<Vehicle>,
}

impl CoxField {
    pub fn vehicles_on(&self, line_index: usize) -> impl Iterator<Item = &Vehicle> {
        self.vehicles
            .iter()
            .filter(move |v| v.line_index == line_index)
    }
}

/// A sampled UAV field: exactly N_U points at common altitude.
#[derive(Debug, Clone, PartialEq)]
pub struct UavField {
    pub positions: Vec<[f64; 3]>,
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = rand_distr::Poisson::new(mean).expect("positive finite mean");
    rand_distr::Distribution::sample(&dist, rng) as usize
}

/// Sample the line process in the ball of radius `window_radius`: line
/// count is Poisson(2 pi lambda_l window_radius) over the representation
/// space R+ x [0, 2pi), distances and angles uniform.
pub fn sample_plp<R: Rng + ?Sized>(lambda_l: f64, window_radius: f64, rng: &mut R) -> Vec<Line> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let count = poisson_count(lambda_l * two_pi * window_radius, rng);
    (0..count)
        .map(|_| Line {
            perp_distance: rng.random::<f64>() * window_radius,
            angle: rng.random::<f64>() * two_pi,
        })
        .collect()
}

/// Sample vehicle offsets along one line: Poisson(2 lambda_v extent) points
/// placed uniformly within `extent` of the perpendicular foot.
pub fn sample_ppp_on_line<R: Rng + ?Sized>(
    line: &Line,
    lambda_v: f64,
    extent: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    let count = poisson_count(lambda_v * 2.0 * extent, rng);
    (0..count)
        .map(|_| line.point_at((2.0 * rng.random::<f64>() - 1.0) * extent))
        .collect()
}

/// Sample the full vehicle field: the line process plus the fixed line,
/// each line carrying its own 1D Poisson vehicles over the window.
pub fn sample_cox<R: Rng + ?Sized>(
    lambda_l: f64,
    lambda_v: f64,
    window_radius: f64,
    fixed_line: Line,
    rng: &mut R,
) -> CoxField {
    let mut lines = vec![fixed_line];
    lines.extend(sample_plp(lambda_l, window_radius, rng));
    let mut vehicles = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        for position in sample_ppp_on_line(line, lambda_v, window_radius, rng) {
            vehicles.push(Vehicle {
                position,
                line_index: idx,
            });
        }
    }
    CoxField { lines, vehicles }
}

/// Sample exactly `n_uav` UAVs uniformly on the disk of radius `l` at
/// altitude `h_uav` (radial CDF r^2 / L^2).
pub fn sample_bpp_disk<R: Rng + ?Sized>(n_uav: u64, l: f64, h_uav: f64, rng: &mut R) -> UavField {
    let two_pi = 2.0 * std::f64::consts::PI;
    let positions = (0..n_uav)
        .map(|_| {
            let r = l * rng.random::<f64>().sqrt();
            let phi = two_pi * rng.random::<f64>();
            [r * phi.cos(), r * phi.sin(), h_uav]
        })
        .collect();
    UavField { positions }
}

/// Node placement for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    pub source: [f64; 3],
    pub relay: [f64; 3],
    pub d1: [f64; 3],
    pub d2: [f64; 3],
    pub source_kind: NodeKind,
    pub relay_kind: NodeKind,
    pub platform: Platform,
    pub role: Role,
}

impl Deployment {
    pub fn destination(&self, first: bool) -> [f64; 3] {
        if first {
            self.d1
        } else {
            self.d2
        }
    }
}

/// Build the deterministic S / R / D1 / D2 placement. Destinations sit on
/// the x-axis at the configured ground separations; the relay's horizontal
/// position is the midpoint of the S-D1 segment. With the platform as
/// relay, S and the destinations are vehicles; with the platform as
/// source, S is lifted to platform height and a vehicle relays.
pub fn build_deployment(cfg: &SystemConfig) -> Result<Deployment> {
    let g = &cfg.geometry;
    if !(g.d_sd1 > 0.0) {
        return Err(Error::invalid("geometry.d_sd1", "must be > 0"));
    }
    if !(g.d_sd2 > 0.0) {
        return Err(Error::invalid("geometry.d_sd2", "must be > 0"));
    }
    for (path, h) in [
        ("geometry.h_ntfp", g.h_ntfp),
        ("geometry.h_rsu", g.h_rsu),
        ("geometry.h_uav", g.h_uav),
        ("geometry.h_vehicle", g.h_vehicle),
    ] {
        if h < 0.0 {
            return Err(Error::invalid(path, "must be >= 0"));
        }
    }

    let platform_kind = match cfg.scenario.platform {
        Platform::Ntfp => NodeKind::Ntfp,
        Platform::Rsu => NodeKind::Rsu,
    };
    let h_platform = cfg.platform_height();
    let hv = g.h_vehicle;
    let mid_x = 0.5 * g.d_sd1;

    let deployment = match cfg.scenario.role {
        Role::Relay => Deployment {
            source: [0.0, 0.0, hv],
            relay: [mid_x, 0.0, h_platform],
            d1: [g.d_sd1, 0.0, hv],
            d2: [g.d_sd2, 0.0, hv],
            source_kind: NodeKind::Vehicle,
            relay_kind: platform_kind,
            platform: cfg.scenario.platform,
            role: cfg.scenario.role,
        },
        Role::Source => Deployment {
            source: [0.0, 0.0, h_platform],
            relay: [mid_x, 0.0, hv],
            d1: [g.d_sd1, 0.0, hv],
            d2: [g.d_sd2, 0.0, hv],
            source_kind: platform_kind,
            relay_kind: NodeKind::Vehicle,
            platform: cfg.scenario.platform,
            role: cfg.scenario.role,
        },
    };
    Ok(deployment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn plp_zero_intensity_is_empty() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_plp(0.0, 1e4, &mut rng).is_empty());
    }

    #[test]
    fn plp_mean_count_and_angle_range() {
        let reps = 10_000;
        let mut total = 0usize;
        for i in 0..reps {
            let mut rng = RngStream::new(3, i).rng();
            let lines = sample_plp(1e-3, 1e4, &mut rng);
            total += lines.len();
            for line in &lines {
                assert!((0.0..2.0 * std::f64::consts::PI).contains(&line.angle));
                assert!((0.0..=1e4).contains(&line.perp_distance));
            }
        }
        let mean = total as f64 / reps as f64;
        let expect = 2.0 * std::f64::consts::PI * 10.0;
        let sigma = (expect / reps as f64).sqrt();
        assert!(
            (mean - expect).abs() < 3.0 * sigma,
            "mean {mean} vs {expect}"
        );
    }

    #[test]
    fn ppp_on_line_points_lie_on_line() {
        let mut rng = RngStream::new(5, 0).rng();
        let line = Line {
            perp_distance: 321.0,
            angle: 1.234,
        };
        let pts = sample_ppp_on_line(&line, 5e-3, 1e4, &mut rng);
        assert!(!pts.is_empty());
        let f = line.foot();
        let n = [line.angle.cos(), line.angle.sin()];
        for p in pts {
            // Offset from the foot must be orthogonal to the normal.
            let d = [(p[0] - f[0]), (p[1] - f[1])];
            let off = d[0] * n[0] + d[1] * n[1];
            assert!(off.abs() < 1e-9, "point off its line by {off}");
        }
    }

    #[test]
    fn ppp_mean_count() {
        let reps = 10_000;
        let line = Line::x_axis();
        let mut total = 0usize;
        for i in 0..reps {
            let mut rng = RngStream::new(7, i).rng();
            total += sample_ppp_on_line(&line, 5e-4, 1e4, &mut rng).len();
        }
        let mean = total as f64 / reps as f64;
        let sigma = (10.0 / reps as f64).sqrt();
        assert!((mean - 10.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn cox_keeps_fixed_line_and_campbell_mean() {
        let reps = 10_000;
        let mut total_vehicles = 0usize;
        for i in 0..reps {
            let mut rng = RngStream::new(29, i).rng();
            let field = sample_cox(1e-3, 5e-4, 1e4, Line::x_axis(), &mut rng);
            assert_eq!(field.lines[0], Line::x_axis());
            total_vehicles += field.vehicles.len();
        }
        let mean = total_vehicles as f64 / reps as f64;
        // (2 pi lambda_l W + 1) lines, each with 2 W lambda_v vehicles.
        let mu_line = 10.0;
        let mu_lines = 2.0 * std::f64::consts::PI * 10.0;
        let expect = (mu_lines + 1.0) * mu_line;
        let var = (mu_lines + 1.0) * mu_line + mu_lines * mu_line * mu_line;
        let sigma = (var / reps as f64).sqrt();
        assert!(
            (mean - expect).abs() < 3.0 * sigma,
            "mean {mean} vs {expect}"
        );
    }

    #[test]
    fn cox_empty_when_both_intensities_zero() {
        let mut rng = RngStream::new(13, 0).rng();
        let field = sample_cox(0.0, 0.0, 1e4, Line::x_axis(), &mut rng);
        assert_eq!(field.lines.len(), 1);
        assert!(field.vehicles.is_empty());
    }

    #[test]
    fn bpp_exact_count_and_altitude() {
        let mut rng = RngStream::new(17, 0).rng();
        let field = sample_bpp_disk(500, 1e4, 150.0, &mut rng);
        assert_eq!(field.positions.len(), 500);
        for p in &field.positions {
            assert_eq!(p[2], 150.0);
            assert!((p[0] * p[0] + p[1] * p[1]).sqrt() <= 1e4);
        }
        assert!(sample_bpp_disk(0, 1e4, 150.0, &mut rng)
            .positions
            .is_empty());
    }

    /// Asymptotic Kolmogorov CCDF Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 l^2}.
    fn ks_pvalue(d: f64, n: usize) -> f64 {
        let sqrt_n = (n as f64).sqrt();
        let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
        let mut sum = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
            sum += if k % 2 == 1 { term } else { -term };
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }

    #[test]
    fn bpp_radial_cdf_is_r_squared() {
        let n = 100_000u64;
        let l = 1.0;
        let mut rng = RngStream::new(19, 0).rng();
        let field = sample_bpp_disk(n, l, 0.0, &mut rng);
        let mut dist: Vec<f64> = field
            .positions
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .collect();
        dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d_stat: f64 = 0.0;
        for (i, r) in dist.iter().enumerate() {
            let f = (r / l).powi(2);
            let hi = (i as f64 + 1.0) / n as f64 - f;
            let lo = f - i as f64 / n as f64;
            d_stat = d_stat.max(hi.max(lo));
        }
        let p = ks_pvalue(d_stat, n as usize);
        assert!(p > 0.01, "KS p-value {p} (D = {d_stat})");
    }

    #[test]
    fn samplers_are_deterministic_per_stream() {
        let field_a = sample_cox(
            1e-3,
            5e-4,
            1e4,
            Line::x_axis(),
            &mut RngStream::new(23, 4).rng(),
        );
        let field_b = sample_cox(
            1e-3,
            5e-4,
            1e4,
            Line::x_axis(),
            &mut RngStream::new(23, 4).rng(),
        );
        assert_eq!(field_a, field_b);
        let uav_a = sample_bpp_disk(100, 1e4, 150.0, &mut RngStream::new(23, 5).rng());
        let uav_b = sample_bpp_disk(100, 1e4, 150.0, &mut RngStream::new(23, 5).rng());
        assert_eq!(uav_a, uav_b);
    }

    #[test]
    fn deployment_relay_configuration() {
        let cfg = SystemConfig::default();
        let dep = build_deployment(&cfg).unwrap();
        assert_eq!(dep.relay, [110.0, 0.0, 500.0]);
        assert_eq!(dep.d1, [220.0, 0.0, 0.0]);
        assert_eq!(dep.d2, [230.0, 0.0, 0.0]);
        assert_eq!(dep.relay_kind, NodeKind::Ntfp);
        assert_eq!(dep.source_kind, NodeKind::Vehicle);

        let mut rsu = cfg.clone();
        rsu.set_path("scenario.platform", "rsu").unwrap();
        let dep = build_deployment(&rsu).unwrap();
        assert_eq!(dep.relay[2], 10.0);
        assert_eq!(dep.relay_kind, NodeKind::Rsu);
    }

    #[test]
    fn deployment_source_configuration() {
        let mut cfg = SystemConfig::default();
        cfg.set_path("scenario.role", "source").unwrap();
        let dep = build_deployment(&cfg).unwrap();
        assert_eq!(dep.source[2], 500.0);
        assert_eq!(dep.source_kind, NodeKind::Ntfp);
        assert_eq!(dep.relay, [110.0, 0.0, 0.0]);
        assert_eq!(dep.relay_kind, NodeKind::Vehicle);
    }

    #[test]
    fn degenerate_distance_rejected() {
        let mut cfg = SystemConfig::default();
        cfg.geometry.d_sd1 = 0.0;
        assert!(matches!(
            build_deployment(&cfg),
            Err(Error::InvalidConfig { .. })
        ));
    }
}
