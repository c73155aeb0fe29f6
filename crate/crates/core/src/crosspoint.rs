//! Closed-form NOMA-versus-OMA cross-point values: the rate, power
//! coefficient, and SIC-residual levels at which the two access schemes
//! perform equally. On one side of a feasible cross-point NOMA wins, on
//! the other OMA does; both outage expressions flow through the identical
//! Laplace composite, so equality at the cross-point is exact.

use crate::config::{Access, NomaConfig, Scheme, SystemConfig, User};
use crate::error::{Error, Result};
use crate::outage::OutageModel;

/// Which cross-point a result carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrosspointKind {
    R1cDt,
    A1cDt,
    R1cRt,
    A1cRt,
    R2cDt,
    A2cDt,
    GammaCDt,
    R2cRt,
    A2cRt,
    GammaCRt,
    R1cHt,
}

/// Active branch of the two-user cross-point formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossBranch {
    /// The first user's decode constraint dominates (G1 > G2).
    G1Dominant,
    /// The second user's own constraint dominates (G2 >= G1).
    G2Dominant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosspointResult {
    pub value: f64,
    pub kind: CrosspointKind,
    pub feasible: bool,
    pub branch: Option<CrossBranch>,
}

impl CrosspointResult {
    fn new(value: f64, kind: CrosspointKind, feasible: bool) -> Self {
        CrosspointResult {
            value,
            kind,
            feasible,
            branch: None,
        }
    }
}

/// What is given when querying a user-1 cross-point.
#[derive(Debug, Clone, Copy)]
pub enum Given {
    /// Power coefficient a1; the result is the rate cross-point R1c.
    PowerA1(f64),
    /// Rate R1; the result is the power cross-point a1c.
    RateR1(f64),
}

fn check_scheme(scheme: Scheme) -> Result<()> {
    if scheme == Scheme::Ht {
        return Err(Error::invalid(
            "crosspoint.scheme",
            "no closed form for HT; use the bisection cross-point",
        ));
    }
    Ok(())
}

/// Rate and power cross-points for the first user. The RT rate form is
/// exactly half the DT one.
pub fn crosspoint_user1(scheme: Scheme, given: Given) -> Result<CrosspointResult> {
    check_scheme(scheme)?;
    match given {
        Given::PowerA1(a1) => {
            if !(a1 > 0.0 && a1 < 1.0) {
                return Err(Error::invalid("noma.a1", "a1 in (0,1)"));
            }
            let disc = (1.0 - 4.0 * a1 * (1.0 - a1)).max(0.0);
            let full = ((1.0 + disc.sqrt()) / (2.0 * (1.0 - a1))).log2();
            let (value, kind) = match scheme {
                Scheme::Dt => (full, CrosspointKind::R1cDt),
                Scheme::Rt => (0.5 * full, CrosspointKind::R1cRt),
                Scheme::Ht => unreachable!(),
            };
            Ok(CrosspointResult::new(value, kind, value > 1e-9))
        }
        Given::RateR1(r1) => {
            if !(r1 > 0.0) {
                return Err(Error::invalid("noma.r1", "must be > 0"));
            }
            let (t, theta, kind) = match scheme {
                Scheme::Dt => (
                    (2f64).powf(r1) - 1.0,
                    (2f64).powf(2.0 * r1) - 1.0,
                    CrosspointKind::A1cDt,
                ),
                Scheme::Rt => (
                    (2f64).powf(2.0 * r1) - 1.0,
                    (2f64).powf(4.0 * r1) - 1.0,
                    CrosspointKind::A1cRt,
                ),
                Scheme::Ht => unreachable!(),
            };
            let value = t * (1.0 + theta) / (theta * (1.0 + t));
            Ok(CrosspointResult::new(value, kind, value < 1.0))
        }
    }
}

/// DT / RT thresholds of the second user's formulas.
fn user2_parts(scheme: Scheme, noma: &NomaConfig) -> (f64, f64) {
    match scheme {
        Scheme::Dt => ((2f64).powf(noma.r1) - 1.0, noma.gamma),
        // RT doubles the rate exponents; gamma is unchanged.
        Scheme::Rt => ((2f64).powf(2.0 * noma.r1) - 1.0, noma.gamma),
        Scheme::Ht => unreachable!(),
    }
}

/// Rate cross-point R2c for the second user. When the first user's decode
/// constraint dominates, the crossing sits where Theta2 = G1; otherwise it
/// is the positive root of the quadratic in T2 from G2 = Theta2.
pub fn crosspoint_user2_rate(scheme: Scheme, noma: &NomaConfig) -> Result<CrosspointResult> {
    check_scheme(scheme)?;
    let a1 = noma.a1;
    let a2 = noma.a2();
    let (t1, gamma) = user2_parts(scheme, noma);
    let kind = if scheme == Scheme::Dt {
        CrosspointKind::R2cDt
    } else {
        CrosspointKind::R2cRt
    };
    let rate_scale = if scheme == Scheme::Dt { 1.0 } else { 0.5 };

    let g1 = (a1 - t1 * a2 > 0.0).then(|| t1 / (a1 - t1 * a2));

    // Positive root of gamma a1 T^2 + (2 gamma a1 - a2) T + (1 - 2 a2) = 0.
    let qa = gamma * a1;
    let qb = 2.0 * gamma * a1 - a2;
    let qc = 1.0 - 2.0 * a2;
    let g2_root = if qa == 0.0 {
        (qb != 0.0).then(|| -qc / qb).filter(|t| *t >= 0.0)
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        (disc >= 0.0)
            .then(|| (-qb + disc.sqrt()) / (2.0 * qa))
            .filter(|t| *t >= 0.0)
    };

    // Branch on which constraint binds at its own crossing.
    let branch = match (g1, g2_root) {
        (Some(g1v), Some(t2c)) => {
            let g2_at_cross = if a2 - gamma * t2c * a1 > 0.0 {
                t2c / (a2 - gamma * t2c * a1)
            } else {
                f64::INFINITY
            };
            if g1v > g2_at_cross {
                CrossBranch::G1Dominant
            } else {
                CrossBranch::G2Dominant
            }
        }
        (Some(_), None) => CrossBranch::G1Dominant,
        _ => CrossBranch::G2Dominant,
    };

    let (value, feasible) = match branch {
        CrossBranch::G1Dominant => match g1 {
            // Theta2 = G1: R2 = (scale/2) log2(1 + G1) with Theta2 = 2^(2 R2 / scale) - 1.
            Some(g1v) => {
                let r2 = rate_scale * 0.5 * (1.0 + g1v).log2();
                (r2, r2 > 1e-9)
            }
            None => (f64::INFINITY, false),
        },
        CrossBranch::G2Dominant => match g2_root {
            Some(t2c) => {
                let r2 = rate_scale * (1.0 + t2c).log2();
                (r2, r2 > 1e-9)
            }
            None => (f64::INFINITY, false),
        },
    };
    Ok(CrosspointResult {
        value,
        kind,
        feasible,
        branch: Some(branch),
    })
}

/// Power cross-point for the second user: the a1 bound of the active
/// branch of max(G1, G2) < Theta2.
pub fn crosspoint_user2_power(scheme: Scheme, noma: &NomaConfig) -> Result<CrosspointResult> {
    check_scheme(scheme)?;
    let (t1, gamma) = user2_parts(scheme, noma);
    let (t2, theta2) = match scheme {
        Scheme::Dt => ((2f64).powf(noma.r2) - 1.0, (2f64).powf(2.0 * noma.r2) - 1.0),
        Scheme::Rt => (
            (2f64).powf(2.0 * noma.r2) - 1.0,
            (2f64).powf(4.0 * noma.r2) - 1.0,
        ),
        Scheme::Ht => unreachable!(),
    };
    let kind = if scheme == Scheme::Dt {
        CrosspointKind::A2cDt
    } else {
        CrosspointKind::A2cRt
    };

    // Upper bound from G2 < Theta2 and lower bound from G1 < Theta2.
    let upper = (theta2 - t2) / (theta2 * (1.0 + gamma * t2));
    let lower = t1 * (1.0 + theta2) / (theta2 * (1.0 + t1));
    // The binding bound at the current a1 decides the reported branch.
    let (value, branch) = if noma.a1 >= upper {
        (upper, CrossBranch::G2Dominant)
    } else {
        (lower, CrossBranch::G1Dominant)
    };
    let feasible = value > 0.0 && value < 1.0 && lower < upper;
    Ok(CrosspointResult {
        value,
        kind,
        feasible,
        branch: Some(branch),
    })
}

/// SIC-residual cross-point gamma_c = (Theta2 - T2 - a1 Theta2) /
/// (a1 Theta2 T2). Negative means NOMA cannot outperform OMA for the
/// second user at any SIC quality; values above 1 are reported clamped
/// since gamma cannot exceed 1.
pub fn crosspoint_gamma(scheme: Scheme, noma: &NomaConfig) -> Result<CrosspointResult> {
    check_scheme(scheme)?;
    let (t2, theta2, kind) = match scheme {
        Scheme::Dt => (
            (2f64).powf(noma.r2) - 1.0,
            (2f64).powf(2.0 * noma.r2) - 1.0,
            CrosspointKind::GammaCDt,
        ),
        Scheme::Rt => (
            (2f64).powf(2.0 * noma.r2) - 1.0,
            (2f64).powf(4.0 * noma.r2) - 1.0,
            CrosspointKind::GammaCRt,
        ),
        Scheme::Ht => unreachable!(),
    };
    let raw = (theta2 - t2 - noma.a1 * theta2) / (noma.a1 * theta2 * t2);
    if raw <= 0.0 {
        Ok(CrosspointResult::new(raw, kind, false))
    } else {
        Ok(CrosspointResult::new(raw.min(1.0), kind, true))
    }
}

/// Numerical HT rate cross-point for the first user, bracketed by the RT
/// and DT closed forms (HT sits between the two). Bisects the analytical
/// OP difference; feasible = false when the bracket holds no sign change.
pub fn crosspoint_ht_rate_user1(cfg: &SystemConfig) -> Result<CrosspointResult> {
    let model = OutageModel::new(cfg)?;
    let rt = crosspoint_user1(Scheme::Rt, Given::PowerA1(cfg.noma.a1))?.value;
    let dt = crosspoint_user1(Scheme::Dt, Given::PowerA1(cfg.noma.a1))?.value;
    let diff = |r1: f64| -> Result<f64> {
        let noma = NomaConfig { r1, ..cfg.noma };
        let noma_op = model.op_for(Scheme::Ht, Access::Noma, User::D1, &noma)?;
        let oma_op = model.op_for(Scheme::Ht, Access::Oma, User::D1, &noma)?;
        Ok(noma_op - oma_op)
    };
    let (mut lo, mut hi) = (rt, dt);
    let (mut f_lo, f_hi) = (diff(lo)?, diff(hi)?);
    if f_lo * f_hi > 0.0 {
        return Ok(CrosspointResult::new(
            0.5 * (lo + hi),
            CrosspointKind::R1cHt,
            false,
        ));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-9 {
            break;
        }
        let f_mid = diff(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(CrosspointResult::new(
        0.5 * (lo + hi),
        CrosspointKind::R1cHt,
        true,
    ))
}
