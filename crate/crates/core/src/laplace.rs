//! Laplace transforms of the interference sources seen by a receiver: the
//! vehicles on the receiver's own line, the vehicles on all other lines,
//! and the UAV field. Each transform supports the LOS-state mixture and
//! the sectored-gain marks of the interfering links; the per-interferer
//! mixture sits inside the kernel, so one evaluation covers the marked
//! process exactly.
//!
//! All transforms are composed in log space: the line sources contribute
//! exponents and the UAV source contributes N_U * ln(inner integral),
//! which keeps precision when the UAV count is large.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::RwLock;

use crate::channel::{
    interferer_gain_distribution, p_los_geometry, BeamformingConfig, FadingParams, LosModel,
    NodeKind,
};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};

/// Structural form of one interference source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// 1D Poisson vehicles on the receiver's own line.
    FixedLine,
    /// Poisson line process carrying 1D Poisson vehicles.
    CoxLines,
    /// Binomial UAV field on a disk.
    UavBpp,
}

/// Everything needed to evaluate one source's Laplace transform: process
/// intensities, receiver-relative geometry, fading, the LOS model of the
/// interferer-to-receiver links, and optional sectored-gain marks.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSourceSpec {
    pub kind: SourceKind,
    /// Vehicles per meter (line sources).
    pub lambda_v: f64,
    /// Lines per meter of perpendicular distance (Cox source).
    pub lambda_l: f64,
    /// UAV count (BPP source).
    pub n_uav: u64,
    /// Receiver height above the vehicle plane (line sources).
    pub z: f64,
    /// |receiver plane - UAV plane| (BPP source).
    pub delta_h: f64,
    /// UAV disk radius L.
    pub disk_radius: f64,
    /// Window truncation radius for the line sources; analysis and
    /// Monte-Carlo share it so they stay comparable.
    pub window_radius: f64,
    pub fading: FadingParams,
    pub los: LosModel,
    /// When present, interferer gains are marked per the sectored model;
    /// when absent the gain is 1.
    pub beamforming: Option<BeamformingConfig>,
}

impl InterferenceSourceSpec {
    pub fn fixed_line(
        lambda_v: f64,
        z: f64,
        window_radius: f64,
        fading: FadingParams,
        los: LosModel,
    ) -> Self {
        InterferenceSourceSpec {
            kind: SourceKind::FixedLine,
            lambda_v,
            lambda_l: 0.0,
            n_uav: 0,
            z,
            delta_h: 0.0,
            disk_radius: 0.0,
            window_radius,
            fading,
            los,
            beamforming: None,
        }
    }

    pub fn cox_lines(
        lambda_l: f64,
        lambda_v: f64,
        z: f64,
        window_radius: f64,
        fading: FadingParams,
        los: LosModel,
    ) -> Self {
        InterferenceSourceSpec {
            kind: SourceKind::CoxLines,
            lambda_v,
            lambda_l,
            n_uav: 0,
            z,
            delta_h: 0.0,
            disk_radius: 0.0,
            window_radius,
            fading,
            los,
            beamforming: None,
        }
    }

    pub fn uav_bpp(
        n_uav: u64,
        disk_radius: f64,
        delta_h: f64,
        fading: FadingParams,
        los: LosModel,
    ) -> Self {
        InterferenceSourceSpec {
            kind: SourceKind::UavBpp,
            lambda_v: 0.0,
            lambda_l: 0.0,
            n_uav,
            z: 0.0,
            delta_h,
            disk_radius,
            window_radius: 0.0,
            fading,
            los,
            beamforming: None,
        }
    }

    /// Single fixed fading state (m, alpha) with no LOS mixing.
    pub fn with_fixed_fading(mut self, m: u32, alpha: f64) -> Self {
        self.fading = FadingParams {
            m_los: m,
            m_nlos: m,
            alpha_los: alpha,
            alpha_nlos: alpha,
        };
        self.los = LosModel::AlwaysNlos;
        self
    }

    pub fn with_beamforming(mut self, bf: BeamformingConfig) -> Self {
        self.beamforming = Some(bf);
        self
    }

    /// log L(s) of this source.
    pub fn log_laplace(&self, s: f64, quad: &QuadratureSpec) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::invalid(
                "laplace.s",
                "transform argument must be >= 0",
            ));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let kernel = KernelCtx::new(self);
        match self.kind {
            SourceKind::FixedLine => log_laplace_fixed_line(self, &kernel, s, quad),
            SourceKind::CoxLines => log_laplace_cox_lines(self, &kernel, s, quad),
            SourceKind::UavBpp => log_laplace_uav_bpp(self, &kernel, s, quad),
        }
    }

    pub fn laplace(&self, s: f64, quad: &QuadratureSpec) -> Result<f64> {
        Ok(self.log_laplace(s, quad)?.exp())
    }
}

/// Precomputed gain levels and probabilities for kernel evaluation.
struct KernelCtx {
    gains: [(f64, f64); 3],
    n_gains: usize,
    fading: FadingParams,
    los: LosModel,
}

impl KernelCtx {
    fn new(spec: &InterferenceSourceSpec) -> Self {
        let (gains, n_gains) = match &spec.beamforming {
            Some(bf) => (interferer_gain_distribution(bf), 3),
            None => ([(1.0, 1.0), (0.0, 0.0), (0.0, 0.0)], 1),
        };
        KernelCtx {
            gains,
            n_gains,
            fading: spec.fading,
            los: spec.los,
        }
    }

    /// 1 - E_K E_state E_h[exp(-s K |h|^2 r^-alpha)] for one interferer at
    /// 3D distance `r3d`; `ground` and `delta_h` feed the LOS model.
    /// Computed as a weighted sum of positive terms, so there is no
    /// cancellation when the kernel is close to 1.
    fn one_minus_kernel(&self, s: f64, r3d: f64, ground: f64, delta_h: f64) -> f64 {
        let p = p_los_geometry(&self.los, r3d, ground, delta_h);
        let mut acc = 0.0;
        for (gain, weight) in self.gains.iter().take(self.n_gains) {
            let sk = s * gain;
            if p > 0.0 {
                acc += weight
                    * p
                    * one_minus_single(sk, r3d, self.fading.m_los, self.fading.alpha_los);
            }
            if p < 1.0 {
                acc += weight
                    * (1.0 - p)
                    * one_minus_single(sk, r3d, self.fading.m_nlos, self.fading.alpha_nlos);
            }
        }
        acc
    }
}

/// 1 - (1 + s r^-alpha / m)^-m for integer m, via the all-positive
/// binomial expansion q = (1+t)^m - 1 = sum_j C(m,j) t^j, giving
/// q / (1 + q) with no cancellation at either end.
fn one_minus_single(s: f64, r: f64, m: u32, alpha: f64) -> f64 {
    let t = s * crate::channel::pow_neg(r, alpha) / m as f64;
    if !t.is_finite() {
        return 1.0;
    }
    let q = match m {
        1 => t,
        2 => t * (2.0 + t),
        _ => {
            let mut q = 0.0;
            let mut coeff = 1.0;
            let mut tp = 1.0;
            for j in 1..=m {
                coeff = coeff * (m + 1 - j) as f64 / j as f64;
                tp *= t;
                q += coeff * tp;
                if !q.is_finite() {
                    return 1.0;
                }
            }
            q
        }
    };
    if q.is_infinite() {
        return 1.0;
    }
    q / (1.0 + q)
}

/// Integrate f over [0, upper] through the exact shifted-log map
/// x = x0 (e^t - 1). The interference kernels have knees at scales spread
/// over many decades; in the mapped domain they are single-scale and the
/// adaptive rule converges in a handful of segments.
fn integrate_log_scaled<F: Fn(f64) -> f64>(f: F, upper: f64, quad: &QuadratureSpec) -> Result<f64> {
    let x0 = upper * 1e-10;
    let t_max = (1.0 + upper / x0).ln();
    integrate(
        |t| {
            let et = t.exp();
            f(x0 * (et - 1.0)) * x0 * et
        },
        0.0,
        t_max,
        quad,
    )
}

fn log_laplace_fixed_line(
    spec: &InterferenceSourceSpec,
    kernel: &KernelCtx,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if spec.lambda_v <= 0.0 {
        return Ok(0.0);
    }
    let z = spec.z;
    let z2 = z * z;
    let integral = integrate_log_scaled(
        |x| kernel.one_minus_kernel(s, (x * x + z2).sqrt(), x, z),
        spec.window_radius,
        quad,
    )?;
    Ok(-spec.lambda_v * 2.0 * integral)
}

fn log_laplace_cox_lines(
    spec: &InterferenceSourceSpec,
    kernel: &KernelCtx,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if spec.lambda_l <= 0.0 || spec.lambda_v <= 0.0 {
        return Ok(0.0);
    }
    let z2 = spec.z * spec.z;
    let w = spec.window_radius;
    // Inner tolerance budget: an absolute error e in the per-line exponent
    // perturbs the outer integrand by at most lambda_v * e, so the floor
    // sits well below the outer tolerance without chasing absolute
    // precision on the tiny far-line exponents.
    let inner_quad = QuadratureSpec {
        rel_tol: (quad.rel_tol * 10.0).min(1e-6),
        abs_tol: quad.abs_tol.max(1e-8),
        ..*quad
    };
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = integrate_log_scaled(
        |y| {
            let inner = integrate_log_scaled(
                |x| {
                    let h2 = x * x + y * y;
                    kernel.one_minus_kernel(s, (h2 + z2).sqrt(), h2.sqrt(), spec.z)
                },
                w,
                &inner_quad,
            );
            match inner {
                Ok(v) => -(-spec.lambda_v * 2.0 * v).exp_m1(),
                Err(e) => {
                    inner_failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        w,
        quad,
    )?;
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    Ok(-2.0 * std::f64::consts::PI * spec.lambda_l * outer)
}

fn log_laplace_uav_bpp(
    spec: &InterferenceSourceSpec,
    kernel: &KernelCtx,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if spec.n_uav == 0 {
        return Ok(0.0);
    }
    let dh = spec.delta_h;
    let dh2 = dh * dh;
    let l2 = spec.disk_radius * spec.disk_radius;
    let upper = (dh2 + l2).sqrt();
    // Integrate 1 - kernel against the 3D-distance pdf 2u/L^2; the kernel
    // integral itself is then 1 - deficit, exact when s = 0.
    let deficit = integrate(
        |u| {
            let ground = (u * u - dh2).max(0.0).sqrt();
            kernel.one_minus_kernel(s, u, ground, dh) * 2.0 * u / l2
        },
        dh,
        upper,
        quad,
    )?;
    let deficit = deficit.clamp(0.0, 1.0);
    Ok(spec.n_uav as f64 * (-deficit).ln_1p())
}

/// Laplace transform of the interference from the vehicles on the
/// receiver's own line.
pub fn laplace_fixed_line(
    spec: &InterferenceSourceSpec,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    debug_assert_eq!(spec.kind, SourceKind::FixedLine);
    spec.laplace(s, quad)
}

/// Laplace transform of the interference from the vehicles on all the
/// other lines.
pub fn laplace_cox_lines(
    spec: &InterferenceSourceSpec,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    debug_assert_eq!(spec.kind, SourceKind::CoxLines);
    spec.laplace(s, quad)
}

/// Laplace transform of the UAV interference.
pub fn laplace_uav_bpp(
    spec: &InterferenceSourceSpec,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    debug_assert_eq!(spec.kind, SourceKind::UavBpp);
    spec.laplace(s, quad)
}

/// Laplace transform with the LOS-state mixture of the source's links;
/// same machinery for all three structural forms.
pub fn laplace_lsm(spec: &InterferenceSourceSpec, s: f64, quad: &QuadratureSpec) -> Result<f64> {
    spec.laplace(s, quad)
}

/// Product transform over independent sources, with each source carrying
/// the sectored-gain marks: the fixed interferer gain K multiplies the
/// interference power, so it enters each kernel as s * K weighted by P_K.
pub fn laplace_composite(
    specs: &[InterferenceSourceSpec],
    beamforming: &BeamformingConfig,
    s: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut log_sum = 0.0;
    for spec in specs {
        let marked = spec.clone().with_beamforming(*beamforming);
        log_sum += marked.log_laplace(s, quad)?;
    }
    Ok(log_sum.exp())
}

/// The composite transform H_q(s) of everything a receiver hears, with a
/// concurrent memo keyed by (source index, s bits). Memoization is
/// semantically invisible: entries are pure function values.
pub struct CompositeLaplace {
    specs: Vec<InterferenceSourceSpec>,
    quad: QuadratureSpec,
    cache: RwLock<HashMap<(usize, u64), f64>>,
}

impl CompositeLaplace {
    pub fn new(specs: Vec<InterferenceSourceSpec>, quad: QuadratureSpec) -> Self {
        CompositeLaplace {
            specs,
            quad,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn specs(&self) -> &[InterferenceSourceSpec] {
        &self.specs
    }

    pub fn log_eval(&self, s: f64) -> Result<f64> {
        let mut total = 0.0;
        for (idx, spec) in self.specs.iter().enumerate() {
            let key = (idx, s.to_bits());
            let hit = self.cache.read().expect("cache lock").get(&key).copied();
            let value = match hit {
                Some(v) => v,
                None => {
                    let v = spec.log_laplace(s, &self.quad)?;
                    self.cache.write().expect("cache lock").insert(key, v);
                    v
                }
            };
            total += value;
        }
        Ok(total)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok(self.log_eval(s)?.exp())
    }
}

/// The three interference sources heard by a receiver of the given kind
/// and altitude, with per-source LOS models chosen by link class and the
/// scenario's sectored-gain marks attached.
pub fn receiver_sources(
    cfg: &SystemConfig,
    receiver_kind: NodeKind,
    receiver_altitude: f64,
) -> Vec<InterferenceSourceSpec> {
    use crate::channel::classify_link;
    let g = &cfg.geometry;
    let z = (receiver_altitude - g.h_vehicle).abs();
    let delta_h = (receiver_altitude - g.h_uav).abs();
    let vehicle_los = classify_link(NodeKind::Vehicle, receiver_kind, &cfg.los);
    let uav_los = classify_link(NodeKind::Uav, receiver_kind, &cfg.los);
    let bf = cfg.beamforming();
    vec![
        InterferenceSourceSpec::fixed_line(g.lambda_v, z, g.window_radius, cfg.fading, vehicle_los)
            .with_beamforming(bf),
        InterferenceSourceSpec::cox_lines(
            g.lambda_l,
            g.lambda_v,
            z,
            g.window_radius,
            cfg.fading,
            vehicle_los,
        )
        .with_beamforming(bf),
        InterferenceSourceSpec::uav_bpp(g.n_uav, g.disk_radius, delta_h, cfg.fading, uav_los)
            .with_beamforming(bf),
    ]
}
