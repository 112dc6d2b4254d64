//! Scalar searches used by the analysis tasks: locating fidelity peaks,
//! measuring their width at half maximum, and finding the decoherence rate
//! where a figure of merit crosses a threshold.
//!
//! All searches work on a caller-supplied evaluator so they stay agnostic of
//! how the underlying curve is produced.

use crate::error::{Error, Result};

/// Grid resolution of the initial peak scan.
const PEAK_GRID: usize = 400;
/// Bracket width at which golden-section refinement stops.
const PEAK_BRACKET_TOL: f64 = 1e-8;
/// Bracket width at which half-level bisection stops.
const LEVEL_BRACKET_TOL: f64 = 1e-8;

/// What a search located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    /// A local maximum of a time curve.
    Peak,
    /// Full width of a peak at half its height.
    HalfWidth,
    /// The decoherence rate where a figure of merit crosses a threshold.
    RateThreshold,
}

/// A located critical point together with the evidence for it.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub kind: CriticalKind,
    /// The location: peak time, width, or rate.
    pub value: f64,
    /// The curve value there: peak height, half level, or figure of merit.
    pub objective: f64,
    /// Final enclosing interval (for widths: the two crossing times).
    pub bracket: (f64, f64),
    /// Width of the final bracket(s).
    pub residual: f64,
}

fn eval<F: Fn(f64) -> Result<f64>>(f: &F, t: f64) -> Result<f64> {
    let v = f(t)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("objective returned {v} at {t}")))
    }
}

/// Locate the maximum of `f` inside `(lo, hi)`: a 400-point grid scan picks
/// the best bracket, then golden-section refinement narrows it below 1e-8.
pub fn find_peak<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64) -> Result<CriticalPoint> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Argument(format!("bad search window ({lo}, {hi})")));
    }
    let n = PEAK_GRID;
    let step = (hi - lo) / n as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n {
        let v = eval(&f, lo + step * i as f64)?;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = lo + step * (best_i + 1).min(n) as f64;

    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(&f, c)?;
    let mut fd = eval(&f, d)?;
    while b - a > PEAK_BRACKET_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(&f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(&f, d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok(CriticalPoint {
        kind: CriticalKind::Peak,
        value: t,
        objective: eval(&f, t)?,
        bracket: (a, b),
        residual: b - a,
    })
}

fn bisect_level<F: Fn(f64) -> Result<f64>>(
    f: &F,
    level: f64,
    mut inside: f64,
    mut outside: f64,
) -> Result<f64> {
    // invariant: f(inside) >= level > f(outside)
    while (outside - inside).abs() > LEVEL_BRACKET_TOL {
        let mid = 0.5 * (inside + outside);
        if eval(f, mid)? >= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Full width of the peak at `t_peak` (height `peak_value`) at half maximum.
/// Crossings are bracketed by walking outward up to `radius` on each side,
/// then bisected below 1e-8.
pub fn fwhm<F: Fn(f64) -> Result<f64>>(
    f: F,
    t_peak: f64,
    peak_value: f64,
    radius: f64,
) -> Result<CriticalPoint> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Argument(format!("search radius {radius} must be positive")));
    }
    if !(peak_value.is_finite() && t_peak.is_finite()) {
        return Err(Error::Argument("peak location and value must be finite".into()));
    }
    let level = peak_value / 2.0;
    let steps = PEAK_GRID;
    let step = radius / steps as f64;

    let mut crossings = [0.0f64; 2];
    for (side, sign) in [(0usize, -1.0f64), (1usize, 1.0f64)] {
        let mut inside = t_peak;
        let mut found = None;
        for k in 1..=steps {
            let t = t_peak + sign * step * k as f64;
            if eval(&f, t)? < level {
                found = Some(t);
                break;
            }
            inside = t;
        }
        let outside = found.ok_or_else(|| {
            Error::Search(format!(
                "no half-level crossing within {radius} {} of the peak",
                if side == 0 { "left" } else { "right" }
            ))
        })?;
        crossings[side] = bisect_level(&f, level, inside, outside)?;
    }
    let (t_left, t_right) = (crossings[0], crossings[1]);
    Ok(CriticalPoint {
        kind: CriticalKind::HalfWidth,
        value: t_right - t_left,
        objective: level,
        bracket: (t_left, t_right),
        residual: 2.0 * LEVEL_BRACKET_TOL,
    })
}

/// Find the rate where `merit` (a decreasing function of the rate) crosses
/// `threshold`, by bisection on [0, hi] down to bracket width `tol`.
pub fn critical_gamma<F: Fn(f64) -> Result<f64>>(
    merit: F,
    threshold: f64,
    hi: f64,
    tol: f64,
) -> Result<CriticalPoint> {
    if !(hi > 0.0 && hi.is_finite()) {
        return Err(Error::Argument(format!("upper rate bound {hi} must be positive")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Argument(format!("tolerance {tol} must be positive")));
    }
    if eval(&merit, 0.0)? <= threshold {
        return Err(Error::Search(format!(
            "merit at rate 0 already at or below threshold {threshold}"
        )));
    }
    if eval(&merit, hi)? >= threshold {
        return Err(Error::Search(format!(
            "merit at rate {hi} still above threshold {threshold}"
        )));
    }
    let mut lo = 0.0f64;
    let mut up = hi;
    while up - lo > tol {
        let mid = 0.5 * (lo + up);
        if eval(&merit, mid)? > threshold {
            lo = mid;
        } else {
            up = mid;
        }
    }
    let g = 0.5 * (lo + up);
    Ok(CriticalPoint {
        kind: CriticalKind::RateThreshold,
        value: g,
        objective: eval(&merit, g)?,
        bracket: (lo, up),
        residual: up - lo,
    })
}
