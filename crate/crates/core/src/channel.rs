//! Per-link propagation: power-law path loss, Nakagami-m fading, the two
//! LOS-probability models, link classification, and the two-level sectored
//! beamforming gain model with Gaussian beam-steering error.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::erf;

/// LOS / NLOS channel state of one link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LosState {
    Los,
    Nlos,
}

/// Nakagami-m and path-loss parameters per LOS state. The m values must be
/// integers: the outage layer's binomial expansion requires it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    pub m_los: u32,
    pub m_nlos: u32,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
}

impl FadingParams {
    pub fn m(&self, state: LosState) -> u32 {
        match state {
            LosState::Los => self.m_los,
            LosState::Nlos => self.m_nlos,
        }
    }

    pub fn alpha(&self, state: LosState) -> f64 {
        match state {
            LosState::Los => self.alpha_los,
            LosState::Nlos => self.alpha_nlos,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_los < 1 {
            return Err(Error::invalid(
                "fading.m_los",
                "Nakagami m must be a positive integer (Alzer expansion)",
            ));
        }
        if self.m_nlos < 1 {
            return Err(Error::invalid(
                "fading.m_nlos",
                "Nakagami m must be a positive integer (Alzer expansion)",
            ));
        }
        if !(self.alpha_los > 0.0) {
            return Err(Error::invalid("fading.alpha_los", "must be > 0"));
        }
        if !(self.alpha_nlos >= self.alpha_los) {
            return Err(Error::invalid("fading.alpha_nlos", "must be >= alpha_los"));
        }
        Ok(())
    }
}

/// LOS-probability model of one link class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosModel {
    /// Distance-based urban blockage model for ground-to-ground links:
    /// P_LOS(r) = exp(-beta * r) with r the inter-node distance.
    Terrestrial { beta: f64 },
    /// Elevation-based sigmoid model for ground-to-air links:
    /// P_LOS = 1 / (1 + a * exp(-b * (theta_deg - a))).
    Aerial { a: f64, b: f64 },
    /// High-altitude links free of blockage.
    AlwaysLos,
    /// Forced-NLOS override used for validation runs.
    AlwaysNlos,
}

/// Environment parameters feeding [`LosModel`] construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosParams {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub mode: LosMode,
}

/// Global override for link LOS classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LosMode {
    /// Per-link probabilistic mixture (the physical model).
    #[default]
    Mixed,
    ForceLos,
    ForceNlos,
}

/// What a node is; decides which LOS model its links use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Vehicle,
    Rsu,
    Ntfp,
    Uav,
}

impl NodeKind {
    pub fn is_aerial(&self) -> bool {
        matches!(self, NodeKind::Ntfp | NodeKind::Uav)
    }
}

/// One transmitter-receiver link: endpoints with node kinds, plus the
/// derived quantities the LOS models consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub kind_a: NodeKind,
    pub kind_b: NodeKind,
}

impl LinkSpec {
    pub fn new(a: [f64; 3], kind_a: NodeKind, b: [f64; 3], kind_b: NodeKind) -> Self {
        LinkSpec {
            a,
            b,
            kind_a,
            kind_b,
        }
    }

    pub fn distance(&self) -> f64 {
        let dx = self.a[0] - self.b[0];
        let dy = self.a[1] - self.b[1];
        let dz = self.a[2] - self.b[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn ground_distance(&self) -> f64 {
        let dx = self.a[0] - self.b[0];
        let dy = self.a[1] - self.b[1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn altitude_delta(&self) -> f64 {
        (self.a[2] - self.b[2]).abs()
    }

    /// Elevation angle in degrees: atan(altitude delta / ground distance),
    /// 90 degrees for a link straight up.
    pub fn elevation_deg(&self) -> f64 {
        self.altitude_delta()
            .atan2(self.ground_distance())
            .to_degrees()
    }
}

/// LOS model for a link between two node kinds: ground-ground links are
/// distance-based, ground-air links elevation-based, and air-air links
/// (UAV to NTFP) are always LOS.
pub fn classify_link(kind_a: NodeKind, kind_b: NodeKind, params: &LosParams) -> LosModel {
    match params.mode {
        LosMode::ForceLos => return LosModel::AlwaysLos,
        LosMode::ForceNlos => return LosModel::AlwaysNlos,
        LosMode::Mixed => {}
    }
    match (kind_a.is_aerial(), kind_b.is_aerial()) {
        (false, false) => LosModel::Terrestrial { beta: params.beta },
        (true, true) => LosModel::AlwaysLos,
        _ => LosModel::Aerial {
            a: params.a,
            b: params.b,
        },
    }
}

/// LOS probability of a link under the given model.
pub fn p_los(model: &LosModel, link: &LinkSpec) -> f64 {
    p_los_geometry(
        model,
        link.distance(),
        link.ground_distance(),
        link.altitude_delta(),
    )
}

/// LOS probability from raw link geometry. `distance` is the 3D inter-node
/// distance (terrestrial model), `ground` and `delta_h` feed the elevation
/// angle (aerial model).
pub fn p_los_geometry(model: &LosModel, distance: f64, ground: f64, delta_h: f64) -> f64 {
    match model {
        LosModel::Terrestrial { beta } => (-beta * distance).exp(),
        LosModel::Aerial { a, b } => {
            let theta_deg = delta_h.atan2(ground).to_degrees();
            1.0 / (1.0 + a * (-b * (theta_deg - a)).exp())
        }
        LosModel::AlwaysLos => 1.0,
        LosModel::AlwaysNlos => 0.0,
    }
}

/// Power-law attenuation d^(-alpha).
pub fn path_loss(distance: f64, alpha: f64) -> Result<f64> {
    if distance <= 0.0 {
        return Err(Error::DegenerateLink);
    }
    Ok(pow_neg(distance, alpha))
}

/// r^-alpha with fast paths for the common integer exponents.
#[inline]
pub(crate) fn pow_neg(r: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / (r * r)
    } else if alpha == 4.0 {
        let r2 = r * r;
        1.0 / (r2 * r2)
    } else {
        r.powf(-alpha)
    }
}

/// Unit-mean Nakagami-m power draw: Gamma(shape m, scale 1/m), sampled as
/// an Erlang sum of exponentials (m is integer by construction).
pub fn sample_fading_power<R: Rng + ?Sized>(m: u32, rng: &mut R) -> f64 {
    debug_assert!(m >= 1);
    let mut log_prod = 0.0f64;
    for _ in 0..m {
        // 1 - U avoids ln(0); U in [0, 1).
        log_prod += (1.0 - rng.random::<f64>()).ln();
    }
    -log_prod / m as f64
}

/// Sectored antenna pattern with Gaussian steering error on the main links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformingConfig {
    /// Main-lobe linear power gain G.
    pub main_gain: f64,
    /// Side-lobe linear power gain g.
    pub side_gain: f64,
    /// Main-lobe beam width, radians.
    pub theta_bf: f64,
    /// Beam-steering error standard deviation, radians.
    pub sigma_e: f64,
}

impl BeamformingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.side_gain > 0.0) {
            return Err(Error::invalid("beamforming.side_gain", "must be > 0"));
        }
        if !(self.main_gain >= self.side_gain) {
            return Err(Error::invalid(
                "beamforming.main_gain",
                "must be >= side_gain",
            ));
        }
        if !(self.theta_bf > 0.0 && self.theta_bf < 2.0 * std::f64::consts::PI) {
            return Err(Error::invalid(
                "beamforming.theta_bf",
                "must be in (0, 2pi)",
            ));
        }
        if !(self.sigma_e >= 0.0) {
            return Err(Error::invalid("beamforming.sigma_e", "must be >= 0"));
        }
        Ok(())
    }

    /// The three composite gain levels of an interfering link.
    pub fn gain_levels(&self) -> [f64; 3] {
        [
            self.main_gain * self.main_gain,
            self.main_gain * self.side_gain,
            self.side_gain * self.side_gain,
        ]
    }
}

/// Gain distribution of an interfering link whose beam angles are uniform:
/// (G*G, G*g, g*g) with probabilities ((t/2pi)^2, 2(t/2pi)(1-t/2pi),
/// (1-t/2pi)^2) for t = theta_bf.
pub fn interferer_gain_distribution(cfg: &BeamformingConfig) -> [(f64, f64); 3] {
    let q = cfg.theta_bf / (2.0 * std::f64::consts::PI);
    let gains = cfg.gain_levels();
    [
        (gains[0], q * q),
        (gains[1], 2.0 * q * (1.0 - q)),
        (gains[2], (1.0 - q) * (1.0 - q)),
    ]
}

/// Probability that one end of a main link stays aligned despite steering
/// error: F_|e|(theta_bf / 2) = erf((theta_bf/2) / (sqrt(2) sigma_e)).
pub fn main_link_alignment_prob(cfg: &BeamformingConfig) -> f64 {
    if cfg.sigma_e == 0.0 {
        return 1.0;
    }
    erf(0.5 * cfg.theta_bf / (std::f64::consts::SQRT_2 * cfg.sigma_e))
}

/// Main-link gain branches: composite gain and mixture weight, for both
/// ends aligned, exactly one aligned, and neither aligned.
pub fn main_gain_branches(cfg: &BeamformingConfig) -> [(f64, f64); 3] {
    let f = main_link_alignment_prob(cfg);
    let gains = cfg.gain_levels();
    [
        (gains[0], f * f),
        (gains[1], 2.0 * f * (1.0 - f)),
        (gains[2], (1.0 - f) * (1.0 - f)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use proptest::prelude::*;

    fn table_beamforming() -> BeamformingConfig {
        BeamformingConfig {
            main_gain: 63.0,
            side_gain: 0.63,
            theta_bf: 30.0f64.to_radians(),
            sigma_e: 10.0f64.to_radians(),
        }
    }

    #[test]
    fn path_loss_power_law() {
        assert_eq!(path_loss(1.0, 2.0).unwrap(), 1.0);
        assert!((path_loss(100.0, 2.0).unwrap() - 1e-4).abs() < 1e-18);
        assert!((path_loss(100.0, 4.0).unwrap() - 1e-8).abs() < 1e-22);
        assert!(matches!(path_loss(0.0, 2.0), Err(Error::DegenerateLink)));
    }

    #[test]
    fn terrestrial_los_reference() {
        let model = LosModel::Terrestrial { beta: 0.0095 };
        let link = LinkSpec::new(
            [0.0; 3],
            NodeKind::Vehicle,
            [100.0, 0.0, 0.0],
            NodeKind::Vehicle,
        );
        assert!((p_los(&model, &link) - 0.38674).abs() < 1e-5);
        let zero = LinkSpec::new([0.0; 3], NodeKind::Vehicle, [0.0; 3], NodeKind::Vehicle);
        assert_eq!(p_los(&model, &zero), 1.0);
    }

    #[test]
    fn aerial_los_reference() {
        let model = LosModel::Aerial { a: 11.95, b: 0.136 };
        // 45-degree elevation: h = 500 over ground distance 500.
        let link = LinkSpec::new(
            [0.0, 0.0, 500.0],
            NodeKind::Ntfp,
            [500.0, 0.0, 0.0],
            NodeKind::Vehicle,
        );
        assert!((p_los(&model, &link) - 0.88236).abs() < 1e-4);
        // Straight up: elevation 90 degrees.
        let up = LinkSpec::new(
            [0.0, 0.0, 150.0],
            NodeKind::Uav,
            [0.0, 0.0, 0.0],
            NodeKind::Vehicle,
        );
        assert_eq!(up.elevation_deg(), 90.0);
    }

    #[test]
    fn classification_by_node_kind() {
        let params = LosParams {
            beta: 0.0095,
            a: 11.95,
            b: 0.136,
            mode: LosMode::Mixed,
        };
        assert!(matches!(
            classify_link(NodeKind::Vehicle, NodeKind::Vehicle, &params),
            LosModel::Terrestrial { .. }
        ));
        assert!(matches!(
            classify_link(NodeKind::Vehicle, NodeKind::Rsu, &params),
            LosModel::Terrestrial { .. }
        ));
        assert!(matches!(
            classify_link(NodeKind::Vehicle, NodeKind::Ntfp, &params),
            LosModel::Aerial { .. }
        ));
        assert!(matches!(
            classify_link(NodeKind::Uav, NodeKind::Ntfp, &params),
            LosModel::AlwaysLos
        ));
        let forced = LosParams {
            mode: LosMode::ForceNlos,
            ..params
        };
        assert!(matches!(
            classify_link(NodeKind::Uav, NodeKind::Ntfp, &forced),
            LosModel::AlwaysNlos
        ));
    }

    #[test]
    fn gain_distribution_reference() {
        let probs = interferer_gain_distribution(&table_beamforming());
        assert!((probs[0].1 - 1.0 / 144.0).abs() < 1e-12);
        assert!((probs[1].1 - 22.0 / 144.0).abs() < 1e-12);
        assert!((probs[2].1 - 121.0 / 144.0).abs() < 1e-12);
        assert!((probs[0].0 - 63.0 * 63.0).abs() < 1e-9);

        let omni = BeamformingConfig {
            theta_bf: 2.0 * std::f64::consts::PI - 1e-15,
            ..table_beamforming()
        };
        let p = interferer_gain_distribution(&omni);
        assert!((p[0].1 - 1.0).abs() < 1e-12 && p[1].1.abs() < 1e-12 && p[2].1.abs() < 1e-12);
    }

    #[test]
    fn alignment_prob_reference() {
        let cfg = table_beamforming();
        assert!((main_link_alignment_prob(&cfg) - 0.86639).abs() < 1e-4);
        let perfect = BeamformingConfig {
            sigma_e: 0.0,
            ..cfg
        };
        assert_eq!(main_link_alignment_prob(&perfect), 1.0);
        let hopeless = BeamformingConfig {
            sigma_e: 1e9,
            ..cfg
        };
        assert!(main_link_alignment_prob(&hopeless) < 1e-9);
    }

    #[test]
    fn fading_unit_mean_and_rayleigh_tail() {
        let n = 1_000_000usize;
        for m in [1u32, 2, 4] {
            let mut rng = RngStream::new(7, m as u64).rng();
            let mut sum = 0.0;
            let mut above = 0usize;
            for _ in 0..n {
                let h = sample_fading_power(m, &mut rng);
                sum += h;
                if h > 1.0 {
                    above += 1;
                }
            }
            let mean = sum / n as f64;
            let tol = 3.0 / ((m as f64) * n as f64).sqrt();
            assert!((mean - 1.0).abs() < tol, "m={m} mean={mean}");
            if m == 1 {
                // Rayleigh power CCDF at 1 is e^{-1}.
                let p = above as f64 / n as f64;
                assert!((p - (-1.0f64).exp()).abs() < 3.0 * (0.37 * 0.63 / n as f64).sqrt());
            }
        }
    }

    #[test]
    fn fading_variance_matches_gamma() {
        let n = 1_000_000usize;
        let mut rng = RngStream::new(11, 0).rng();
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..n {
            let h = sample_fading_power(2, &mut rng);
            sum += h;
            sumsq += h * h;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        // Gamma(m, 1/m) variance is 1/m = 0.5; std error of the sample
        // variance is about sqrt(2/m^2 + ...)/sqrt(n), loose 3-sigma below.
        assert!((var - 0.5).abs() < 0.005, "var={var}");
    }

    proptest! {
        #[test]
        fn gain_probs_sum_to_one(theta in 1e-3f64..6.2) {
            let cfg = BeamformingConfig { theta_bf: theta, ..table_beamforming() };
            let p = interferer_gain_distribution(&cfg);
            let total: f64 = p.iter().map(|(_, w)| w).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|(_, w)| *w >= 0.0));
        }

        #[test]
        fn p_los_in_unit_interval(d in 0.0f64..5e4, h in 0.0f64..2e3) {
            let link = LinkSpec::new([0.0, 0.0, h], NodeKind::Ntfp, [d, 0.0, 0.0], NodeKind::Vehicle);
            for model in [
                LosModel::Terrestrial { beta: 0.0095 },
                LosModel::Aerial { a: 11.95, b: 0.136 },
                LosModel::AlwaysLos,
                LosModel::AlwaysNlos,
            ] {
                let p = p_los(&model, &link);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }

        #[test]
        fn terrestrial_monotone_decreasing(r in 1.0f64..1e4, d in 1.0f64..100.0) {
            let m = LosModel::Terrestrial { beta: 0.0095 };
            let near = p_los_geometry(&m, r, r, 0.0);
            let far = p_los_geometry(&m, r + d, r + d, 0.0);
            prop_assert!(far < near);
        }

        #[test]
        fn aerial_monotone_in_elevation(g in 1.0f64..1e4, h in 1.0f64..2e3, dh in 1.0f64..500.0) {
            let m = LosModel::Aerial { a: 11.95, b: 0.136 };
            let low = p_los_geometry(&m, 0.0, g, h);
            let high = p_los_geometry(&m, 0.0, g, h + dh);
            prop_assert!(high > low);
        }
    }
}
