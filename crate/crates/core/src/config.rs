//! Scenario parameterization: every knob of the system model with defaults
//! matching the reference simulation parameters, dotted-path access for
//! sweeps and flat config files, validation with field-level messages, and
//! a stable config hash for result provenance.

use std::fmt;

use crate::channel::{BeamformingConfig, FadingParams, LosMode, LosParams};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

/// Which infrastructure platform assists the link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Platform {
    Ntfp,
    Rsu,
}

/// Whether the platform relays between vehicles or acts as the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Relay,
    Source,
}

/// Transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scheme {
    Dt,
    Rt,
    Ht,
}

/// Multiple access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Noma,
    Oma,
}

/// NOMA user selector: D1 is the high-priority low-rate user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum User {
    D1,
    D2,
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Platform::Ntfp => "ntfp",
            Platform::Rsu => "rsu",
        })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Dt => "dt",
            Scheme::Rt => "rt",
            Scheme::Ht => "ht",
        })
    }
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Access::Noma => "noma",
            Access::Oma => "oma",
        })
    }
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            User::D1 => "d1",
            User::D2 => "d2",
        })
    }
}

/// NOMA power split, target rates, and residual SIC fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaConfig {
    /// Power fraction of the high-priority user D1.
    pub a1: f64,
    /// Target rate of D1, bits/s.
    pub r1: f64,
    /// Target rate of D2, bits/s.
    pub r2: f64,
    /// Residual fraction of D1's power left after SIC at D2; 0 is perfect.
    pub gamma: f64,
}

impl NomaConfig {
    pub fn a2(&self) -> f64 {
        1.0 - self.a1
    }
}

/// Beamforming knobs in config units (angles in degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    pub main_gain: f64,
    pub side_gain: f64,
    pub theta_bf_deg: f64,
    pub sigma_e_deg: f64,
}

/// Node placement and interference-field geometry, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    /// Ground separation between S and D1.
    pub d_sd1: f64,
    /// Ground separation between S and D2.
    pub d_sd2: f64,
    pub h_ntfp: f64,
    pub h_rsu: f64,
    pub h_uav: f64,
    pub h_vehicle: f64,
    /// UAV disk radius L.
    pub disk_radius: f64,
    /// Simulation window radius for lines and vehicles.
    pub window_radius: f64,
    /// Line intensity, lines per meter of perpendicular distance.
    pub lambda_l: f64,
    /// Vehicle intensity along each line, vehicles per meter.
    pub lambda_v: f64,
    /// Number of interfering UAVs (binomial, exact count).
    pub n_uav: u64,
}

/// Scenario selectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub platform: Platform,
    pub role: Role,
    pub scheme: Scheme,
    pub access: Access,
}

/// Full parameterization of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub noma: NomaConfig,
    pub fading: FadingParams,
    pub los: LosParams,
    pub beam: BeamParams,
    pub geometry: GeometryParams,
    pub scenario: Scenario,
    pub quadrature: QuadratureSpec,
}

impl Default for SystemConfig {
    /// Reference simulation parameters: R1 = 0.5, R2 = 1.5 bits/s,
    /// a1 = 0.8, perfect SIC, m_LOS = 2 / m_NLOS = 1, alpha 2 / 4,
    /// beta = 0.0095, (a, b) = (11.95, 0.136), lambda_L = 1e-3,
    /// lambda_V = 5e-4, 500 UAVs at 150 m on a 10 km disk, NTFP at 500 m,
    /// G = 63, g = 0.63, theta_BF = 30 deg, sigma_e = 10 deg, and
    /// ||S-D1|| = 220 m, ||S-D2|| = 230 m with the relay at the midpoint.
    fn default() -> Self {
        SystemConfig {
            noma: NomaConfig {
                a1: 0.8,
                r1: 0.5,
                r2: 1.5,
                gamma: 0.0,
            },
            fading: FadingParams {
                m_los: 2,
                m_nlos: 1,
                alpha_los: 2.0,
                alpha_nlos: 4.0,
            },
            los: LosParams {
                beta: 0.0095,
                a: 11.95,
                b: 0.136,
                mode: LosMode::Mixed,
            },
            beam: BeamParams {
                main_gain: 63.0,
                side_gain: 0.63,
                theta_bf_deg: 30.0,
                sigma_e_deg: 10.0,
            },
            geometry: GeometryParams {
                d_sd1: 220.0,
                d_sd2: 230.0,
                h_ntfp: 500.0,
                h_rsu: 10.0,
                h_uav: 150.0,
                h_vehicle: 0.0,
                disk_radius: 1e4,
                window_radius: 1e4,
                lambda_l: 1e-3,
                lambda_v: 5e-4,
                n_uav: 500,
            },
            scenario: Scenario {
                platform: Platform::Ntfp,
                role: Role::Relay,
                scheme: Scheme::Rt,
                access: Access::Noma,
            },
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Dotted parameter paths accepted by [`SystemConfig::set_path`], in the
/// canonical order used for hashing and serialization.
pub const PARAMETER_PATHS: &[&str] = &[
    "noma.a1",
    "noma.r1",
    "noma.r2",
    "noma.gamma",
    "fading.m_los",
    "fading.m_nlos",
    "fading.alpha_los",
    "fading.alpha_nlos",
    "los.beta",
    "los.a",
    "los.b",
    "los.mode",
    "beamforming.main_gain",
    "beamforming.side_gain",
    "beamforming.theta_bf_deg",
    "beamforming.sigma_e_deg",
    "geometry.d_sd1",
    "geometry.d_sd2",
    "geometry.h_ntfp",
    "geometry.h_rsu",
    "geometry.h_uav",
    "geometry.h_vehicle",
    "geometry.disk_radius",
    "geometry.window_radius",
    "geometry.lambda_l",
    "geometry.lambda_v",
    "geometry.n_uav",
    "scenario.platform",
    "scenario.role",
    "scenario.scheme",
    "scenario.access",
    "quadrature.rel_tol",
    "quadrature.abs_tol",
    "quadrature.max_subdivisions",
];

fn parse_f64(path: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(path, format!("cannot parse `{value}` as a number")))
}

fn parse_m(path: &str, value: &str) -> Result<u32> {
    let x = parse_f64(path, value)?;
    if x < 1.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
        return Err(Error::invalid(
            path,
            "Nakagami m must be a positive integer (Alzer expansion)",
        ));
    }
    Ok(x as u32)
}

fn parse_u64(path: &str, value: &str) -> Result<u64> {
    let x = parse_f64(path, value)?;
    if x < 0.0 || x.fract() != 0.0 {
        return Err(Error::invalid(path, "must be a nonnegative integer"));
    }
    Ok(x as u64)
}

impl SystemConfig {
    /// Set one field by dotted path from its text form.
    pub fn set_path(&mut self, path: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match path {
            "noma.a1" => self.noma.a1 = parse_f64(path, v)?,
            "noma.r1" => self.noma.r1 = parse_f64(path, v)?,
            "noma.r2" => self.noma.r2 = parse_f64(path, v)?,
            "noma.gamma" => self.noma.gamma = parse_f64(path, v)?,
            "fading.m_los" => self.fading.m_los = parse_m(path, v)?,
            "fading.m_nlos" => self.fading.m_nlos = parse_m(path, v)?,
            "fading.alpha_los" => self.fading.alpha_los = parse_f64(path, v)?,
            "fading.alpha_nlos" => self.fading.alpha_nlos = parse_f64(path, v)?,
            "los.beta" => self.los.beta = parse_f64(path, v)?,
            "los.a" => self.los.a = parse_f64(path, v)?,
            "los.b" => self.los.b = parse_f64(path, v)?,
            "los.mode" => {
                self.los.mode = match v {
                    "mixed" => LosMode::Mixed,
                    "force_los" => LosMode::ForceLos,
                    "force_nlos" => LosMode::ForceNlos,
                    _ => {
                        return Err(Error::invalid(
                            path,
                            "expected mixed | force_los | force_nlos",
                        ))
                    }
                }
            }
            "beamforming.main_gain" => self.beam.main_gain = parse_f64(path, v)?,
            "beamforming.side_gain" => self.beam.side_gain = parse_f64(path, v)?,
            "beamforming.theta_bf_deg" => self.beam.theta_bf_deg = parse_f64(path, v)?,
            "beamforming.sigma_e_deg" => self.beam.sigma_e_deg = parse_f64(path, v)?,
            "geometry.d_sd1" => self.geometry.d_sd1 = parse_f64(path, v)?,
            "geometry.d_sd2" => self.geometry.d_sd2 = parse_f64(path, v)?,
            "geometry.h_ntfp" => self.geometry.h_ntfp = parse_f64(path, v)?,
            "geometry.h_rsu" => self.geometry.h_rsu = parse_f64(path, v)?,
            "geometry.h_uav" => self.geometry.h_uav = parse_f64(path, v)?,
            "geometry.h_vehicle" => self.geometry.h_vehicle = parse_f64(path, v)?,
            "geometry.disk_radius" => self.geometry.disk_radius = parse_f64(path, v)?,
            "geometry.window_radius" => self.geometry.window_radius = parse_f64(path, v)?,
            "geometry.lambda_l" => self.geometry.lambda_l = parse_f64(path, v)?,
            "geometry.lambda_v" => self.geometry.lambda_v = parse_f64(path, v)?,
            "geometry.n_uav" => self.geometry.n_uav = parse_u64(path, v)?,
            "scenario.platform" => {
                self.scenario.platform = match v {
                    "ntfp" => Platform::Ntfp,
                    "rsu" => Platform::Rsu,
                    _ => return Err(Error::invalid(path, "expected ntfp | rsu")),
                }
            }
            "scenario.role" => {
                self.scenario.role = match v {
                    "relay" => Role::Relay,
                    "source" => Role::Source,
                    _ => return Err(Error::invalid(path, "expected relay | source")),
                }
            }
            "scenario.scheme" => {
                self.scenario.scheme = match v {
                    "dt" => Scheme::Dt,
                    "rt" => Scheme::Rt,
                    "ht" => Scheme::Ht,
                    _ => return Err(Error::invalid(path, "expected dt | rt | ht")),
                }
            }
            "scenario.access" => {
                self.scenario.access = match v {
                    "noma" => Access::Noma,
                    "oma" => Access::Oma,
                    _ => return Err(Error::invalid(path, "expected noma | oma")),
                }
            }
            "quadrature.rel_tol" => self.quadrature.rel_tol = parse_f64(path, v)?,
            "quadrature.abs_tol" => self.quadrature.abs_tol = parse_f64(path, v)?,
            "quadrature.max_subdivisions" => {
                self.quadrature.max_subdivisions = parse_u64(path, v)? as usize
            }
            _ => return Err(Error::UnknownPath(path.to_string())),
        }
        Ok(())
    }

    /// Current value of one field by dotted path, in its text form.
    pub fn get_path(&self, path: &str) -> Result<String> {
        let s = match path {
            "noma.a1" => format!("{:?}", self.noma.a1),
            "noma.r1" => format!("{:?}", self.noma.r1),
            "noma.r2" => format!("{:?}", self.noma.r2),
            "noma.gamma" => format!("{:?}", self.noma.gamma),
            "fading.m_los" => self.fading.m_los.to_string(),
            "fading.m_nlos" => self.fading.m_nlos.to_string(),
            "fading.alpha_los" => format!("{:?}", self.fading.alpha_los),
            "fading.alpha_nlos" => format!("{:?}", self.fading.alpha_nlos),
            "los.beta" => format!("{:?}", self.los.beta),
            "los.a" => format!("{:?}", self.los.a),
            "los.b" => format!("{:?}", self.los.b),
            "los.mode" => match self.los.mode {
                LosMode::Mixed => "mixed".into(),
                LosMode::ForceLos => "force_los".into(),
                LosMode::ForceNlos => "force_nlos".into(),
            },
            "beamforming.main_gain" => format!("{:?}", self.beam.main_gain),
            "beamforming.side_gain" => format!("{:?}", self.beam.side_gain),
            "beamforming.theta_bf_deg" => format!("{:?}", self.beam.theta_bf_deg),
            "beamforming.sigma_e_deg" => format!("{:?}", self.beam.sigma_e_deg),
            "geometry.d_sd1" => format!("{:?}", self.geometry.d_sd1),
            "geometry.d_sd2" => format!("{:?}", self.geometry.d_sd2),
            "geometry.h_ntfp" => format!("{:?}", self.geometry.h_ntfp),
            "geometry.h_rsu" => format!("{:?}", self.geometry.h_rsu),
            "geometry.h_uav" => format!("{:?}", self.geometry.h_uav),
            "geometry.h_vehicle" => format!("{:?}", self.geometry.h_vehicle),
            "geometry.disk_radius" => format!("{:?}", self.geometry.disk_radius),
            "geometry.window_radius" => format!("{:?}", self.geometry.window_radius),
            "geometry.lambda_l" => format!("{:?}", self.geometry.lambda_l),
            "geometry.lambda_v" => format!("{:?}", self.geometry.lambda_v),
            "geometry.n_uav" => self.geometry.n_uav.to_string(),
            "scenario.platform" => self.scenario.platform.to_string(),
            "scenario.role" => match self.scenario.role {
                Role::Relay => "relay".into(),
                Role::Source => "source".into(),
            },
            "scenario.scheme" => self.scenario.scheme.to_string(),
            "scenario.access" => self.scenario.access.to_string(),
            "quadrature.rel_tol" => format!("{:?}", self.quadrature.rel_tol),
            "quadrature.abs_tol" => format!("{:?}", self.quadrature.abs_tol),
            "quadrature.max_subdivisions" => self.quadrature.max_subdivisions.to_string(),
            _ => return Err(Error::UnknownPath(path.to_string())),
        };
        Ok(s)
    }

    /// Canonical text form: every parameter path with its value, one per
    /// line, in [`PARAMETER_PATHS`] order.
    pub fn canonical_string(&self) -> String {
        let mut out = String::new();
        for path in PARAMETER_PATHS {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&self.get_path(path).expect("all canonical paths resolve"));
            out.push('\n');
        }
        out
    }

    /// Stable 64-bit FNV-1a hash of the canonical form, hex-encoded.
    pub fn config_hash(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.canonical_string().bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }

    /// Parse a flat `path = value` config file body over the defaults.
    /// Lines starting with `#` and blank lines are ignored. Violations are
    /// aggregated rather than reported one at a time.
    pub fn from_flat_text(text: &str) -> Result<SystemConfig> {
        let mut cfg = SystemConfig::default();
        let mut violations = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((path, value)) = line.split_once('=') else {
                violations.push(Error::invalid(
                    format!("line {}", lineno + 1),
                    format!("expected `path = value`, got `{line}`"),
                ));
                continue;
            };
            if let Err(e) = cfg.set_path(path.trim(), value) {
                violations.push(e);
            }
        }
        if let Err(Error::ConfigReport(mut more)) = cfg.validate() {
            violations.append(&mut more);
        }
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::ConfigReport(violations))
        }
    }

    /// Check every invariant, aggregating all violations.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        check(
            &mut v,
            self.noma.a1 > 0.0 && self.noma.a1 < 1.0,
            "noma.a1",
            "a1 in (0,1)",
        );
        check(&mut v, self.noma.r1 > 0.0, "noma.r1", "must be > 0");
        check(&mut v, self.noma.r2 > 0.0, "noma.r2", "must be > 0");
        check(
            &mut v,
            (0.0..=1.0).contains(&self.noma.gamma),
            "noma.gamma",
            "must be in [0,1]",
        );
        if let Err(e) = self.fading.validate() {
            v.push(e);
        }
        check(&mut v, self.los.beta >= 0.0, "los.beta", "must be >= 0");
        check(&mut v, self.los.a > 0.0, "los.a", "must be > 0");
        check(&mut v, self.los.b > 0.0, "los.b", "must be > 0");
        if let Err(e) = self.beamforming().validate() {
            v.push(e);
        }
        check(
            &mut v,
            self.geometry.d_sd1 > 0.0,
            "geometry.d_sd1",
            "must be > 0",
        );
        check(
            &mut v,
            self.geometry.d_sd2 > 0.0,
            "geometry.d_sd2",
            "must be > 0",
        );
        check(
            &mut v,
            self.geometry.h_ntfp >= 0.0,
            "geometry.h_ntfp",
            "must be >= 0",
        );
        check(
            &mut v,
            self.geometry.h_rsu >= 0.0,
            "geometry.h_rsu",
            "must be >= 0",
        );
        check(
            &mut v,
            self.geometry.h_uav >= 0.0,
            "geometry.h_uav",
            "must be >= 0",
        );
        check(
            &mut v,
            self.geometry.h_vehicle >= 0.0,
            "geometry.h_vehicle",
            "must be >= 0",
        );
        check(
            &mut v,
            self.geometry.disk_radius > 0.0,
            "geometry.disk_radius",
            "must be > 0",
        );
        check(
            &mut v,
            self.geometry.window_radius > 0.0,
            "geometry.window_radius",
            "must be > 0",
        );
        check(
            &mut v,
            self.geometry.lambda_l >= 0.0,
            "geometry.lambda_l",
            "must be >= 0",
        );
        check(
            &mut v,
            self.geometry.lambda_v >= 0.0,
            "geometry.lambda_v",
            "must be >= 0",
        );
        if let Err(e) = self.quadrature.validate() {
            v.push(e);
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigReport(v))
        }
    }

    /// Beamforming parameters with angles converted to radians.
    pub fn beamforming(&self) -> BeamformingConfig {
        BeamformingConfig {
            main_gain: self.beam.main_gain,
            side_gain: self.beam.side_gain,
            theta_bf: self.beam.theta_bf_deg.to_radians(),
            sigma_e: self.beam.sigma_e_deg.to_radians(),
        }
    }

    /// Platform altitude for the active scenario.
    pub fn platform_height(&self) -> f64 {
        match self.scenario.platform {
            Platform::Ntfp => self.geometry.h_ntfp,
            Platform::Rsu => self.geometry.h_rsu,
        }
    }
}

fn check(v: &mut Vec<Error>, ok: bool, path: &str, message: &str) {
    if !ok {
        v.push(Error::invalid(path, message));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_reference_values() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.noma.a1, 0.8);
        assert_eq!(cfg.noma.r1, 0.5);
        assert_eq!(cfg.geometry.n_uav, 500);
        assert_eq!(cfg.beam.theta_bf_deg, 30.0);
        assert_eq!(cfg.fading.m_los, 2);
        assert_eq!(cfg.fading.m_nlos, 1);
    }

    #[test]
    fn empty_file_yields_defaults() {
        let cfg = SystemConfig::from_flat_text("").unwrap();
        assert_eq!(cfg, SystemConfig::default());
    }

    #[test]
    fn flat_text_roundtrip() {
        let cfg = SystemConfig::default();
        let text = cfg.canonical_string();
        let parsed = SystemConfig::from_flat_text(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.config_hash(), cfg.config_hash());
    }

    #[test]
    fn unknown_path_is_reported() {
        let err = SystemConfig::from_flat_text("noma.a9 = 0.5\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("noma.a9"), "{text}");
    }

    #[test]
    fn a1_out_of_range_is_reported() {
        let err = SystemConfig::from_flat_text("noma.a1 = 1.2\n").unwrap_err();
        assert!(err.to_string().contains("a1 in (0,1)"));
    }

    #[test]
    fn fractional_m_is_rejected_with_alzer_message() {
        let err = SystemConfig::from_flat_text("fading.m_los = 2.5\n").unwrap_err();
        assert!(
            err.to_string()
                .contains("positive integer (Alzer expansion)"),
            "{err}"
        );
    }

    #[test]
    fn violations_aggregate() {
        let err = SystemConfig::from_flat_text("noma.a1 = 1.2\ngeometry.d_sd1 = -5\n").unwrap_err();
        match err {
            Error::ConfigReport(v) => assert_eq!(v.len(), 2),
            other => panic!("expected aggregated report, got {other}"),
        }
    }

    #[test]
    fn hash_changes_with_values() {
        let a = SystemConfig::default();
        let mut b = a.clone();
        b.set_path("noma.r1", "0.6").unwrap();
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn every_path_resolves_both_ways() {
        let mut cfg = SystemConfig::default();
        for path in PARAMETER_PATHS {
            let value = cfg.get_path(path).unwrap();
            cfg.set_path(path, &value).unwrap();
        }
        assert_eq!(cfg, SystemConfig::default());
    }
}
