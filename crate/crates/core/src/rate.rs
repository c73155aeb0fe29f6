//! Average achievable rate: the expected log2(1 + SIR) of each user under
//! the scheme-specific ceilings, computed by integrating the total success
//! probability over the rate axis. Every integrand value is itself a
//! mixture of hop success probabilities, evaluated with the same Laplace
//! machinery as the outage layer.

use std::cell::RefCell;

use crate::config::{NomaConfig, Scheme, SystemConfig, User};
use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::outage::{HopId, OutageModel, SirThresholds};

/// Controls for the rate-axis integration.
#[derive(Debug, Clone, Copy)]
pub struct RateIntegralSpec {
    /// Relative tolerance on the rate axis. Each node triggers nested
    /// Laplace quadratures, so this is looser than the inner tolerances.
    pub rel_tol: f64,
    /// Upper limit standing in for an infinite ceiling (perfect SIC, D2).
    pub cap_for_infinite: f64,
    /// The integrand must have decayed below this at the cap.
    pub tail_threshold: f64,
    pub max_subdivisions: usize,
}

impl Default for RateIntegralSpec {
    fn default() -> Self {
        RateIntegralSpec {
            rel_tol: 1e-6,
            cap_for_infinite: 30.0,
            tail_threshold: 1e-8,
            max_subdivisions: 400,
        }
    }
}

fn ratio(t: f64, denom: f64) -> Option<f64> {
    (denom > 0.0).then(|| t / denom)
}

/// Threshold ratio of user `user` at raw SIR threshold `t`.
fn g_of(noma: &NomaConfig, user: User, t: f64) -> Option<f64> {
    match user {
        User::D1 => ratio(t, noma.a1 - t * noma.a2()),
        User::D2 => ratio(t, noma.a2() - noma.gamma * t * noma.a1),
    }
}

/// Finite integration ceiling for the user's rate axis; D2's ceiling is
/// infinite under perfect SIC and replaced by the cap.
fn ceiling(noma: &NomaConfig, user: User, half: bool, spec: &RateIntegralSpec) -> (f64, bool) {
    let scale = if half { 0.5 } else { 1.0 };
    let ratio_cap = match user {
        User::D1 => noma.a1 / noma.a2(),
        User::D2 => {
            if noma.gamma > 0.0 {
                noma.a2() / (noma.gamma * noma.a1)
            } else {
                return (spec.cap_for_infinite, true);
            }
        }
    };
    let t = scale * (1.0 + ratio_cap).log2();
    if t > spec.cap_for_infinite {
        (spec.cap_for_infinite, true)
    } else {
        (t, false)
    }
}

struct RateIntegrand<'a, F: Fn(f64) -> Result<f64>> {
    f: F,
    failure: &'a RefCell<Option<Error>>,
}

impl<'a, F: Fn(f64) -> Result<f64>> RateIntegrand<'a, F> {
    fn eval(&self, u: f64) -> f64 {
        match (self.f)(u) {
            Ok(v) => {
                assert!(
                    (-1e-9..=1.0 + 1e-9).contains(&v),
                    "success integrand left [0,1]: {v} at u={u}"
                );
                v.clamp(0.0, 1.0)
            }
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }
}

fn integrate_success<F: Fn(f64) -> Result<f64>>(
    f: F,
    upper: f64,
    capped: bool,
    spec: &RateIntegralSpec,
    quad_base: &QuadratureSpec,
) -> Result<f64> {
    let failure = RefCell::new(None);
    let integrand = RateIntegrand {
        f,
        failure: &failure,
    };
    if capped {
        let tail = integrand.eval(upper);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        if tail > spec.tail_threshold {
            return Err(Error::NonConvergence {
                achieved: tail,
                required: spec.tail_threshold,
                subdivisions: 0,
            });
        }
    }
    let quad = QuadratureSpec {
        rel_tol: spec.rel_tol,
        abs_tol: 1e-9,
        max_subdivisions: spec.max_subdivisions,
        ..*quad_base
    };
    // The success integrand has a flat non-analytic corner at the ceiling
    // (every derivative vanishes); integrating in v with u = upper (1 -
    // e^-v) stretches the corner out so the adaptive rule converges in a
    // few segments instead of bisecting into it.
    let v_max = -(1e-11f64).ln();
    let value = integrate(
        |v| {
            let ev = (-v).exp();
            integrand.eval(upper * (1.0 - ev)) * upper * ev
        },
        0.0,
        v_max,
        &quad,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value)
}

fn sd_hop(user: User) -> HopId {
    match user {
        User::D1 => HopId::Sd1,
        User::D2 => HopId::Sd2,
    }
}

fn rd_hop(user: User) -> HopId {
    match user {
        User::D1 => HopId::Rd1,
        User::D2 => HopId::Rd2,
    }
}

/// AAR under direct transmission: integral of the direct-link success
/// probability at threshold 2^u - 1 up to the user's ceiling.
pub fn aar_dt(model: &OutageModel, user: User, spec: &RateIntegralSpec) -> Result<f64> {
    let noma = model.config().noma;
    let (upper, capped) = ceiling(&noma, user, false, spec);
    integrate_success(
        |u| model.hop_success(sd_hop(user), g_of(&noma, user, (2f64).powf(u) - 1.0)),
        upper,
        capped,
        spec,
        &model.config().quadrature,
    )
}

/// AAR under relay transmission: both hops must carry 2^(2u) - 1, and the
/// ceiling is halved.
pub fn aar_rt(model: &OutageModel, user: User, spec: &RateIntegralSpec) -> Result<f64> {
    let noma = model.config().noma;
    let (upper, capped) = ceiling(&noma, user, true, spec);
    integrate_success(
        |u| {
            let g = g_of(&noma, user, (2f64).powf(2.0 * u) - 1.0);
            Ok(model.hop_success(HopId::Sr, g)? * model.hop_success(rd_hop(user), g)?)
        },
        upper,
        capped,
        spec,
        &model.config().quadrature,
    )
}

/// AAR under hybrid transmission, blending the relay-decoded branch (the
/// better of the relayed path and the halved-rate direct path) with the
/// retransmission branch, weighted by the relay's decode probability at
/// the configured rate targets.
pub fn aar_ht(model: &OutageModel, user: User, spec: &RateIntegralSpec) -> Result<f64> {
    let noma = model.config().noma;
    let th = SirThresholds::new(&noma);
    let quad = &model.config().quadrature;

    let p_decode = match user {
        User::D1 => model.hop_success(HopId::Sr, th.g1_rt)?,
        User::D2 => model.hop_success(HopId::Sr, th.gmax_rt)?,
    };

    let (upper, capped) = ceiling(&noma, user, true, spec);
    let decode_branch = integrate_success(
        |u| {
            let g = g_of(&noma, user, (2f64).powf(2.0 * u) - 1.0);
            let pa = model.hop_success(HopId::Sr, g)?;
            let pb = model.hop_success(rd_hop(user), g)?;
            // Direct reception at the doubled rate.
            let pc = model.hop_success(sd_hop(user), g)?;
            Ok(pa * pb + pc - pa * pb * pc)
        },
        upper,
        capped,
        spec,
        quad,
    )?;

    // Retransmission branch: 0.5 log2(1 + 2 SIR) > u, i.e. threshold
    // (2^(2u) - 1) / 2 on the direct link.
    let ratio_cap = match user {
        User::D1 => Some(noma.a1 / noma.a2()),
        User::D2 => (noma.gamma > 0.0).then(|| noma.a2() / (noma.gamma * noma.a1)),
    };
    let (nd_upper, nd_capped) = match ratio_cap {
        Some(r) => {
            let t = 0.5 * (1.0 + 2.0 * r).log2();
            if t > spec.cap_for_infinite {
                (spec.cap_for_infinite, true)
            } else {
                (t, false)
            }
        }
        None => (spec.cap_for_infinite, true),
    };
    let nondecode_branch = integrate_success(
        |u| {
            model.hop_success(
                sd_hop(user),
                g_of(&noma, user, 0.5 * ((2f64).powf(2.0 * u) - 1.0)),
            )
        },
        nd_upper,
        nd_capped,
        spec,
        quad,
    )?;

    Ok(p_decode * decode_branch + (1.0 - p_decode) * nondecode_branch)
}

/// AAR at the configured scheme.
pub fn aar(model: &OutageModel, user: User, spec: &RateIntegralSpec) -> Result<f64> {
    match model.config().scenario.scheme {
        Scheme::Dt => aar_dt(model, user, spec),
        Scheme::Rt => aar_rt(model, user, spec),
        Scheme::Ht => aar_ht(model, user, spec),
    }
}

/// Convenience wrapper building the model.
pub fn aar_for(cfg: &SystemConfig, user: User) -> Result<f64> {
    let model = OutageModel::new(cfg)?;
    aar(&model, user, &RateIntegralSpec::default())
}
