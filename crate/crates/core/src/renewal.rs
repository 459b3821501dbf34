//! The Kendall renewal function `R(x) = Σ_{n≥0} F^{⊠n}(x) = 2/Ḡ − F̄/Ḡ²`.
//!
//! When `m(α) < ∞` everything is evaluated through the scaled quantities
//! `s = x^α Ḡ = m − αW̄`, `w = αW̄` and `t = x^α F̄`:
//!
//! - `R = x^α (2s − t)/s²`
//! - `R − 2x^α/m = x^α (2w/(sm) − t/s²)`
//!
//! so neither the tiny `Ḡ` nor the leading `2x^α/m` is ever subtracted.
//! `R⋆ = R − 1` (renewals excluding time zero) is not exposed separately.

use serde::{Deserialize, Serialize};

use crate::distlib::{DistModel, KendallParam};
use crate::error::{Error, Result};
use crate::kendall::{nfold, TransformPair};
use crate::quadrature::QuadratureSpec;
use crate::special::{binomial_excess, CompensatedSum};
use crate::williamson::{ScaledState, Williamson};

/// Evaluator for `R` and its companions on one `(F, α)` pair.
#[derive(Debug, Clone)]
pub struct Renewal<'a> {
    dist: &'a DistModel,
    alpha: KendallParam,
    quad: QuadratureSpec,
    // None when m(α) is infinite; evaluation then goes through Ḡ directly.
    scaled: Option<Williamson<'a>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub terms: u32,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlackwellEntry {
    pub y: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalReport {
    pub x: f64,
    pub r: f64,
    pub r_prime: Option<f64>,
    pub blackwell: Option<Vec<BlackwellEntry>>,
    pub partial_sum: Option<PartialSum>,
    pub elementary_residual: f64,
}

/// `Σ_{n>N} n zⁿ⁻¹`, which dominates `Σ_{n>N} F^{⊠n}` since `F^{⊠n} ≤ nGⁿ⁻¹`.
pub fn series_tail_bound(z: f64, one_minus_z: f64, terms: u32) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let n = terms as f64;
    let zn = z.powf(n);
    ((n + 1.0) * zn - n * zn * z) / (one_minus_z * one_minus_z)
}

impl<'a> Renewal<'a> {
    pub fn new(dist: &'a DistModel, alpha: KendallParam, quad: QuadratureSpec) -> Result<Self> {
        let scaled = match Williamson::new(dist, alpha, quad) {
            Ok(w) => Some(w),
            Err(Error::InfiniteMoment { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            dist,
            alpha,
            quad,
            scaled,
        })
    }

    /// Like [`Renewal::new`] but insists on `m(α) < ∞`.
    pub fn with_finite_moment(
        dist: &'a DistModel,
        alpha: KendallParam,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        let w = Williamson::new(dist, alpha, quad)?;
        Ok(Self {
            dist,
            alpha,
            quad,
            scaled: Some(w),
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

    pub fn moment(&self) -> Option<f64> {
        self.scaled.as_ref().map(Williamson::moment)
    }

    fn require_moment(&self) -> Result<&Williamson<'a>> {
        self.scaled.as_ref().ok_or_else(|| Error::InfiniteMoment {
            alpha: self.alpha.get(),
            detail: format!(" for {}", self.dist.name()),
        })
    }

    pub fn state(&self, x: f64) -> Result<ScaledState> {
        self.require_moment()?.state(x)
    }

    fn finite_or_overflow(&self, x: f64, v: f64) -> Result<f64> {
        if v.is_finite() {
            return Ok(v);
        }
        Err(Error::Overflow {
            x,
            largest_safe_x: self.largest_safe_x(x),
        })
    }

    // Geometric bisection for the largest x below `x` at which R is finite.
    fn largest_safe_x(&self, x: f64) -> f64 {
        let finite = |v: f64| self.value_unchecked(v).map(f64::is_finite).unwrap_or(false);
        let mut lo = 1.0f64.min(0.5 * x);
        if !finite(lo) {
            return 0.0;
        }
        let mut hi = x;
        for _ in 0..80 {
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if finite(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn value_unchecked(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(1.0);
        }
        match &self.scaled {
            Some(w) => {
                let st = w.state(x)?;
                Ok(st.x_alpha * ((2.0 * st.s - st.t) / (st.s * st.s)))
            }
            None => {
                let p = TransformPair::of(self.dist, self.alpha, x, &self.quad)?;
                let tail = self.dist.tail(x);
                Ok((2.0 * p.gbar - tail) / (p.gbar * p.gbar))
            }
        }
    }

    /// `R(x)`; `1` for `x ≤ 0`.
    pub fn value(&self, x: f64) -> Result<f64> {
        let v = self.value_unchecked(x)?;
        self.finite_or_overflow(x, v)
    }

    /// `R(x) − 2x^α/m(α)`.
    pub fn excess(&self, x: f64) -> Result<f64> {
        let st = self.state(x)?;
        let v = st.x_alpha * excess_bracket(&st);
        self.finite_or_overflow(x, v)
    }

    /// `R(x)/x^α − 2/m(α)`.
    pub fn elementary_residual(&self, x: f64) -> Result<f64> {
        let st = self.state(x)?;
        Ok(excess_bracket(&st))
    }

    /// `R − 2x^α/m − 2αx^αW̄_α/m² + x^{2α}F̄/m²`.
    pub fn second_order_residual(&self, x: f64) -> Result<f64> {
        let st = self.state(x)?;
        let v = st.x_alpha * second_order_bracket(&st);
        self.finite_or_overflow(x, v)
    }

    fn density(&self, x: f64) -> Result<f64> {
        self.dist.density(x).ok_or_else(|| Error::DensityRequired {
            family: self.dist.name(),
        })
    }

    /// `R′(x) = (2αx^{α−1}H_α/s²)(1 − t/s) + x^{2α}f/s²`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let f = self.density(x)?;
        if x <= 0.0 {
            return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
        }
        let a = self.alpha.get();
        let v = match &self.scaled {
            Some(w) => {
                let st = w.state(x)?;
                let s2 = st.s * st.s;
                2.0 * a * x.powf(a - 1.0) * st.h / s2 * (1.0 - st.t / st.s) + st.x_alpha * st.x_alpha * f / s2
            }
            None => {
                let p = TransformPair::of(self.dist, self.alpha, x, &self.quad)?;
                let gp = a / x * p.lift;
                let gb2 = p.gbar * p.gbar;
                2.0 * gp / gb2 * (1.0 - self.dist.tail(x) / p.gbar) + f / gb2
            }
        };
        self.finite_or_overflow(x, v)
    }

    /// `R′(x) − 2αx^{α−1}/m(α)` without forming either term.
    pub fn derivative_excess(&self, x: f64) -> Result<f64> {
        let (st, lead, dens) = self.derivative_excess_parts(x)?;
        let v = lead + dens / (st.s * st.s);
        self.finite_or_overflow(x, v)
    }

    // Splits R′ − 2αx^{α−1}/m as `lead + x^{2α}f/s²`; returns (state, lead, x^{2α}f).
    pub(crate) fn derivative_excess_parts(&self, x: f64) -> Result<(ScaledState, f64, f64)> {
        let f = self.density(x)?;
        let st = self.state(x)?;
        let a = self.alpha.get();
        let (s, t, w, m) = (st.s, st.t, st.w, st.moment);
        let scale = 2.0 * a * x.powf(a - 1.0);
        let lead = if st.cdf >= 0.5 {
            scale * ((s * w - t * m) / (s * s * m) - (s - t) * t / (s * s * s))
        } else {
            scale * (st.h * (s - t) / (s * s * s) - 1.0 / m)
        };
        Ok((st, lead, st.x_alpha * st.x_alpha * f))
    }

    /// `R(x + y) − R(x)`.
    pub fn blackwell_difference(&self, x: f64, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        if !(y > 0.0) {
            return Err(Error::InvalidParameter(format!("y must be >= 0, got {y}")));
        }
        if x <= 0.0 || self.scaled.is_none() {
            return Ok(self.value(x + y)? - self.value(x)?);
        }
        let (e0, e1, lead) = self.blackwell_parts(x, y)?;
        let v = e1 - e0 + lead;
        self.finite_or_overflow(x + y, v)
    }

    // (E(x), E(x+y), 2((x+y)^α − x^α)/m) with E = R − 2x^α/m.
    fn blackwell_parts(&self, x: f64, y: f64) -> Result<(f64, f64, f64)> {
        let m = self.require_moment()?.moment();
        let a = self.alpha.get();
        let e0 = self.excess(x)?;
        let e1 = self.excess(x + y)?;
        let lead = 2.0 / m * x.powf(a) * (a * (y / x).ln_1p()).exp_m1();
        Ok((e0, e1, lead))
    }

    /// `x^{1−α}(R(x+y) − R(x)) − 2αy/m(α)`.
    pub fn blackwell_residual(&self, x: f64, y: f64) -> Result<f64> {
        let m = self.require_moment()?.moment();
        let a = self.alpha.get();
        if x <= 0.0 {
            return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
        }
        let e0 = self.excess(x)?;
        let e1 = self.excess(x + y)?;
        let v = x.powf(1.0 - a) * (e1 - e0) + 2.0 / m * x * binomial_excess(a, y / x);
        self.finite_or_overflow(x, v)
    }

    /// `Σ_{n=0}^{N} F^{⊠n}(x)` and a bound on the omitted terms.
    pub fn partial_sum(&self, x: f64, terms: u32) -> Result<PartialSum> {
        if x <= 0.0 {
            return Ok(PartialSum {
                terms,
                value: 1.0,
                bound: 0.0,
            });
        }
        let p = TransformPair::of(self.dist, self.alpha, x, &self.quad)?;
        let mut sum = CompensatedSum::default();
        sum.add(1.0);
        let mut gpow = 1.0;
        for n in 1..=terms {
            let k = n as f64 - 1.0;
            sum.add((gpow * (p.cdf + k * p.lift)).clamp(0.0, 1.0));
            gpow *= p.g;
            if gpow == 0.0 {
                break;
            }
        }
        Ok(PartialSum {
            terms,
            value: sum.value(),
            bound: series_tail_bound(p.g, p.gbar, terms),
        })
    }

    /// Smallest `N` (up to `max_terms`) whose series tail bound is below `target`.
    pub fn terms_for_bound(&self, x: f64, target: f64, max_terms: u32) -> Result<u32> {
        if x <= 0.0 {
            return Ok(1);
        }
        let p = TransformPair::of(self.dist, self.alpha, x, &self.quad)?;
        let mut n = 1u32;
        while series_tail_bound(p.g, p.gbar, n) >= target {
            if n >= max_terms {
                return Err(Error::Range { z: p.g });
            }
            n = n.saturating_mul(2).min(max_terms);
        }
        // Refine downward.
        let (mut lo, mut hi) = (n / 2, n);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if series_tail_bound(p.g, p.gbar, mid) < target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    pub fn report(&self, x: f64, ys: &[f64], partial_terms: Option<u32>) -> Result<RenewalReport> {
        let r_prime = if self.dist.has_density() {
            Some(self.derivative(x)?)
        } else {
            None
        };
        let blackwell = if ys.is_empty() {
            None
        } else {
            Some(
                ys.iter()
                    .map(|&y| {
                        Ok(BlackwellEntry {
                            y,
                            difference: self.blackwell_difference(x, y)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let partial_sum = partial_terms.map(|n| self.partial_sum(x, n)).transpose()?;
        Ok(RenewalReport {
            x,
            r: self.value(x)?,
            r_prime,
            blackwell,
            partial_sum,
            elementary_residual: self.elementary_residual(x)?,
        })
    }
}

pub(crate) fn excess_bracket(st: &ScaledState) -> f64 {
    let (s, w, t, m) = (st.s, st.w, st.t, st.moment);
    2.0 * w / (s * m) - t / (s * s)
}

pub(crate) fn second_order_bracket(st: &ScaledState) -> f64 {
    let (s, w, t, m) = (st.s, st.w, st.t, st.moment);
    let m2 = m * m;
    w * (2.0 * w / (s * m2) - t * (m + s) / (s * s * m2))
}

/// `R(x)`.
pub fn renewal_value(dist: &DistModel, alpha: KendallParam, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    if x <= 0.0 {
        return Ok(1.0);
    }
    Renewal::new(dist, alpha, *quad)?.value(x)
}

/// `R′(x)`; needs a density.
pub fn renewal_derivative(dist: &DistModel, alpha: KendallParam, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !dist.has_density() {
        return Err(Error::DensityRequired { family: dist.name() });
    }
    Renewal::new(dist, alpha, *quad)?.derivative(x)
}

/// `R(x + y) − R(x)`.
pub fn blackwell_difference(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    y: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Renewal::new(dist, alpha, *quad)?.blackwell_difference(x, y)
}

/// `(Σ_{n≤N} F^{⊠n}(x), bound on the rest)`.
pub fn renewal_partial_sum(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    terms: u32,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let p = Renewal::new(dist, alpha, *quad)?.partial_sum(x, terms)?;
    Ok((p.value, p.bound))
}

/// Series value recomputed term by term through [`nfold`]; slow, for cross-checks.
pub fn renewal_series_naive(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    terms: u32,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut s = CompensatedSum::default();
    for n in 0..=terms {
        s.add(nfold(dist, alpha, n, x, quad)?);
    }
    Ok(s.value())
}
