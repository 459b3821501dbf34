//! Williamson (G-) transform, its inversion and the truncated moments.
//!
//! With `F̄ = 1 − F` and `α > 0`:
//!
//! | symbol | definition |
//! |---|---|
//! | `G_F(x)` | `∫₀^x (1 − (t/x)^α) dF(t) = α x^{−α} ∫₀^x t^{α−1} F(t) dt` |
//! | `Ḡ_F(x)` | `1 − G_F(x) = α x^{−α} W_α(x)` |
//! | `H_α(x)` | `∫₀^x y^α dF(y) = α W_α(x) − x^α F̄(x)` |
//! | `W_α(x)` | `∫₀^x y^{α−1} F̄(y) dy` |
//! | `W̄_α(x)` | `∫_x^∞ y^{α−1} F̄(y) dy` |
//! | `H̄_α(x)` | `m(α) − H_α(x) = α W̄_α(x) + x^α F̄(x)` |
//! | `m(α)` | `H_α(∞) = α W_α(∞)` |
//!
//! Only `F` and `F̄` are integrated, never `dF`, so atoms need no special
//! treatment and tabulated laws need no density. The transform integrals
//! are taken in the variable `v = (t/x)^α`, where `G_F(x) = ∫₀¹ F(x v^{1/α}) dv`
//! has a fixed domain and no endpoint singularity.

use serde::{Deserialize, Serialize};

use crate::distlib::{DistModel, KendallParam};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Improper, QuadratureSpec};

/// Values of every transform at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformBundle {
    pub x: f64,
    pub g: f64,
    pub gbar: f64,
    pub h_alpha: f64,
    pub w_alpha: f64,
    pub wbar_alpha: f64,
    pub hbar_alpha: f64,
    pub moment: f64,
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("x must be positive and finite, got {x}")))
    }
}

// Breakpoints in t on [0, x]: dyadic down to scale 1, plus the kinks of F.
// Without the dyadic cuts a tail concentrated near 0 is invisible to the
// first Gauss-Kronrod pass once x is large.
fn t_breakpoints(dist: &DistModel, x: f64) -> Vec<f64> {
    let mut cuts = vec![0.0, x];
    let mut t = 0.5 * x;
    while t > 0.5 {
        cuts.push(t);
        t *= 0.5;
    }
    let kinks = dist.kinks();
    if kinks.len() <= 16 {
        cuts.extend(kinks.into_iter().filter(|&k| k > 0.0 && k < x));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn v_breakpoints(dist: &DistModel, alpha: f64, x: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = t_breakpoints(dist, x)
        .into_iter()
        .map(|t| (t / x).powf(alpha))
        .collect();
    *cuts.last_mut().expect("two cuts at least") = 1.0;
    cuts.dedup();
    cuts
}

fn integrate_pieces<F: Fn(f64) -> f64>(f: F, cuts: &[f64], quad: &QuadratureSpec) -> Result<f64> {
    cuts.windows(2).map(|w| integrate(&f, w[0], w[1], quad)).sum()
}

/// `G_F(x)`: closed form when available, otherwise `∫₀¹ F(x v^{1/α}) dv`.
pub fn g_transform(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_x(x)?;
    if let Some(g) = dist.closed_g(x, alpha) {
        return Ok(g);
    }
    let inv = 1.0 / alpha.get();
    let cuts = v_breakpoints(dist, alpha.get(), x);
    integrate_pieces(|v| dist.cdf(x * v.powf(inv)), &cuts, quad).map(|g| g.clamp(0.0, 1.0))
}

/// `Ḡ_F(x)` from the tail integral `∫₀¹ F̄(x v^{1/α}) dv`, or its closed form.
pub fn gbar_transform(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_x(x)?;
    if let Some(gb) = dist.closed_gbar(x, alpha) {
        return Ok(gb);
    }
    let inv = 1.0 / alpha.get();
    let cuts = v_breakpoints(dist, alpha.get(), x);
    integrate_pieces(|v| dist.tail(x * v.powf(inv)), &cuts, quad).map(|g| g.clamp(0.0, 1.0))
}

/// `x^α Ḡ_F(x)` through `m(α) − α W̄_α(x)`; free of cancellation for large `x`.
pub fn gbar_scaled(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_x(x)?;
    let m = moment(dist, alpha, quad)?;
    let w = alpha.get() * tail_moment_wbar(dist, alpha, x, quad)?;
    Ok(m - w)
}

/// `W_α(x) = ∫₀^x t^{α−1} F̄(t) dt`, integrated in `t` directly.
pub fn lower_moment_w(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_x(x)?;
    let a = alpha.get();
    if let Some(gb) = dist.closed_gbar(x, alpha) {
        return Ok(x.powf(a) * gb / a);
    }
    let cuts = t_breakpoints(dist, x);
    integrate_pieces(|t| t.powf(a - 1.0) * dist.tail(t), &cuts, quad)
}

/// `H_α(x) = α W_α(x) − x^α F̄(x)`, written as `x^α (Ḡ − F̄)` or `x^α (F − G)`
/// whichever pair is smaller.
pub fn truncated_moment_h(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_x(x)?;
    if let Some(h) = dist.closed_h(x, alpha) {
        return Ok(h);
    }
    let xa = x.powf(alpha.get());
    let f = dist.cdf(x);
    let h = if f < 0.5 {
        xa * (f - g_transform(dist, alpha, x, quad)?)
    } else {
        xa * (gbar_transform(dist, alpha, x, quad)? - dist.tail(x))
    };
    Ok(h.max(0.0))
}

fn infinite_moment(dist: &DistModel, alpha: KendallParam, detail: String) -> Error {
    Error::InfiniteMoment {
        alpha: alpha.get(),
        detail: format!(" for {}{detail}", dist.name()),
    }
}

/// `W̄_α(x) = ∫_x^∞ y^{α−1} F̄(y) dy` for `x ≥ 0`.
pub fn tail_moment_wbar(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter(format!("x must be nonnegative and finite, got {x}")));
    }
    if dist.moment_exists(alpha) == Some(false) {
        return Err(infinite_moment(dist, alpha, String::new()));
    }
    if let Some(w) = dist.closed_wbar(x, alpha) {
        return Ok(w);
    }
    let a = alpha.get();
    // Far out the integral is tiny, so the absolute tolerance follows x^α F̄(x).
    let scale = x.powf(a) * dist.tail(x);
    let spec = QuadratureSpec {
        abs_tol: if scale > 0.0 { quad.abs_tol.min(quad.rel_tol * scale) } else { quad.abs_tol },
        ..*quad
    };
    match integrate_to_infinity(|y| y.powf(a - 1.0) * dist.tail(y), x, &spec)? {
        Improper::Converged(v) => Ok(v),
        Improper::Diverged { reached, .. } => Err(infinite_moment(
            dist,
            alpha,
            format!(" (tail integral still growing at y = {reached:e})"),
        )),
    }
}

/// `H̄_α(x) = α W̄_α(x) + x^α F̄(x)`.
pub fn tail_moment_hbar(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let a = alpha.get();
    Ok(a * tail_moment_wbar(dist, alpha, x, quad)? + x.powf(a) * dist.tail(x))
}

/// `m(α)`.
pub fn moment(dist: &DistModel, alpha: KendallParam, quad: &QuadratureSpec) -> Result<f64> {
    if dist.moment_exists(alpha) == Some(false) {
        return Err(infinite_moment(dist, alpha, String::new()));
    }
    if let Some(m) = dist.closed_moment(alpha) {
        return Ok(m);
    }
    Ok(alpha.get() * tail_moment_wbar(dist, alpha, 0.0, quad)?)
}

/// All transforms at `x`, each evaluated on its own route.
pub fn bundle(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<TransformBundle> {
    let wbar = tail_moment_wbar(dist, alpha, x, quad)?;
    Ok(TransformBundle {
        x,
        g: g_transform(dist, alpha, x, quad)?,
        gbar: gbar_transform(dist, alpha, x, quad)?,
        h_alpha: truncated_moment_h(dist, alpha, x, quad)?,
        w_alpha: lower_moment_w(dist, alpha, x, quad)?,
        wbar_alpha: wbar,
        hbar_alpha: alpha.get() * wbar + x.powf(alpha.get()) * dist.tail(x),
        moment: moment(dist, alpha, quad)?,
    })
}

/// `B(x) = G_B(x) + (x/α) G_B′(x)` with an analytic derivative.
pub fn invert_g_analytic(g: f64, g_prime: f64, alpha: KendallParam, x: f64) -> f64 {
    g + x / alpha.get() * g_prime
}

/// `B(x) = G_B(x) + (x/α) G_B′(x)` with `G_B′` from central differences.
///
/// The step is `h = x·ε^{1/3}`; the estimates at `h` and `h/2` must agree to
/// `1e−6` relative (in units of `B`), else [`Error::DerivativeFailure`].
pub fn invert_g<G: Fn(f64) -> f64>(g: G, alpha: KendallParam, x: f64) -> Result<f64> {
    check_x(x)?;
    let h = x * f64::EPSILON.cbrt();
    let central = |h: f64| (g(x + h) - g(x - h)) / (2.0 * h);
    let coarse = central(h);
    let fine = central(0.5 * h);
    let scale = x / alpha.get();
    let b = g(x) + scale * fine;
    if !b.is_finite() || (scale * (coarse - fine)).abs() > 1e-6 * b.abs().max(1.0) {
        return Err(Error::DerivativeFailure { x, coarse, fine });
    }
    Ok(b)
}

/// Transform evaluator with `m(α)` resolved once.
#[derive(Debug, Clone)]
pub struct Williamson<'a> {
    dist: &'a DistModel,
    alpha: KendallParam,
    quad: QuadratureSpec,
    moment: f64,
}

/// Transform values at `x` in the scaled form used by the renewal formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    pub x: f64,
    /// `x^α`
    pub x_alpha: f64,
    pub cdf: f64,
    pub tail: f64,
    pub g: f64,
    pub gbar: f64,
    /// `x^α Ḡ_F(x)`
    pub s: f64,
    /// `α W̄_α(x) = m(α) − x^α Ḡ_F(x)`
    pub w: f64,
    /// `x^α F̄(x)`
    pub t: f64,
    pub h: f64,
    pub moment: f64,
}

impl<'a> Williamson<'a> {
    pub fn new(dist: &'a DistModel, alpha: KendallParam, quad: QuadratureSpec) -> Result<Self> {
        let moment = moment(dist, alpha, &quad)?;
        Ok(Self {
            dist,
            alpha,
            quad,
            moment,
        })
    }

    pub fn dist(&self) -> &'a DistModel {
        self.dist
    }

    pub fn alpha(&self) -> KendallParam {
        self.alpha
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn moment(&self) -> f64 {
        self.moment
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        g_transform(self.dist, self.alpha, x, &self.quad)
    }

    pub fn gbar(&self, x: f64) -> Result<f64> {
        gbar_transform(self.dist, self.alpha, x, &self.quad)
    }

    /// Picks, for each quantity, the route that avoids cancellation at `x`.
    pub fn state(&self, x: f64) -> Result<ScaledState> {
        check_x(x)?;
        let a = self.alpha.get();
        let m = self.moment;
        let x_alpha = x.powf(a);
        let cdf = self.dist.cdf(x);
        let tail = self.dist.tail(x);
        let w = a * tail_moment_wbar(self.dist, self.alpha, x, &self.quad)?;

        let (s, gbar) = if let Some(gb) = self.dist.closed_gbar(x, self.alpha) {
            if w <= 0.5 * m {
                (m - w, gb)
            } else {
                (x_alpha * gb, gb)
            }
        } else if w <= 0.5 * m {
            let s = m - w;
            (s, s / x_alpha)
        } else {
            let gb = self.gbar(x)?;
            (x_alpha * gb, gb)
        };

        let g = match self.dist.closed_g(x, self.alpha) {
            Some(g) => g,
            None if gbar < 0.5 => 1.0 - gbar,
            None => self.g(x)?,
        };
        let t = x_alpha * tail;
        let h = match self.dist.closed_h(x, self.alpha) {
            Some(h) => h,
            None if cdf < 0.5 => x_alpha * (cdf - g),
            None => s - t,
        };

        Ok(ScaledState {
            x,
            x_alpha,
            cdf,
            tail,
            g,
            gbar,
            s,
            w,
            t,
            h: h.max(0.0),
            moment: m,
        })
    }
}
