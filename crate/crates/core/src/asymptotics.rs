//! Limit constants of the renewal rate theorems and their numerical check.
//!
//! Each theorem states that some scaled quantity tends to a constant. A
//! [`LimitDiagnostic`] evaluates that quantity on a geometric grid, takes the
//! last value as the limit estimate, and passes when the estimate is within
//! tolerance of the constant and the residuals stop growing over the final
//! third of the grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distlib::{AuxFunction, DistModel, Family, KendallParam, TailClass};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::renewal::{excess_bracket, second_order_bracket, Renewal};

/// `x0, x0·ratio, …, x0·ratio^{count−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub ratio: f64,
    pub count: usize,
}

/// Smallest grid the verdict logic accepts.
pub const MIN_GRID_POINTS: usize = 8;

impl GridSpec {
    pub fn new(x0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(Error::InvalidParameter(format!("grid x0 must be > 0, got {x0}")));
        }
        if !(ratio.is_finite() && ratio > 1.0) {
            return Err(Error::InvalidParameter(format!("grid ratio must be > 1, got {ratio}")));
        }
        if count < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {count}"
            )));
        }
        let last = x0 * ratio.powf(count as f64);
        if !last.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid {x0}·{ratio}^{count} leaves the floating-point range"
            )));
        }
        Ok(Self { x0, ratio, count })
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.x0 * self.ratio.powi(k as i32)).collect()
    }
}

/// Grid of 16 points that starts where `x^α F̄(x) < 0.1` and doubles,
/// unless the tail underflows first; then the ratio shrinks so that the
/// last point is the last doubling with `F̄ ≥ 1e−300`.
pub fn default_grid(dist: &DistModel, alpha: KendallParam) -> GridSpec {
    const COUNT: usize = 16;
    let mut x0 = 1.0f64;
    while x0.powf(alpha.get()) * dist.tail(x0) >= 0.1 && x0 < 1e12 {
        x0 *= 2.0;
    }
    let mut last = x0;
    for _ in 1..COUNT {
        if dist.tail(2.0 * last) < 1e-300 {
            break;
        }
        last *= 2.0;
    }
    let ratio = if last > x0 {
        (last / x0).powf(1.0 / (COUNT - 1) as f64)
    } else {
        2.0
    };
    GridSpec {
        x0,
        ratio,
        count: COUNT,
    }
}

fn require_rv(alpha: f64, beta: f64) -> Result<()> {
    if beta > alpha {
        Ok(())
    } else {
        Err(Error::IncompatibleTailClass {
            theorem: "regularly varying rate".into(),
            reason: format!("needs beta > alpha, got beta = {beta}, alpha = {alpha}"),
        })
    }
}

/// `(3α − β)/((β − α)m²)`.
pub fn rv_rate_constant(alpha: f64, beta: f64, m: f64) -> Result<f64> {
    require_rv(alpha, beta)?;
    Ok((3.0 * alpha - beta) / ((beta - alpha) * m * m))
}

/// `2α(2α − β)/(m³(β − α)²)`.
pub fn rv_second_order_constant(alpha: f64, beta: f64, m: f64) -> Result<f64> {
    require_rv(alpha, beta)?;
    Ok(2.0 * alpha * (2.0 * alpha - beta) / (m * m * m * (beta - alpha) * (beta - alpha)))
}

/// `1/m²`.
pub fn gamma_rate_constant(m: f64) -> f64 {
    1.0 / (m * m)
}

/// `2α/m²`, the limit of `(x/g)·((x^αF̄)^{−1}(x^{−α}R − 2/m) + 1/m²)`.
pub fn gamma_second_order_constant(alpha: f64, m: f64) -> f64 {
    2.0 * alpha / (m * m)
}

/// `2αy/m`.
pub fn blackwell_constant(alpha: f64, m: f64, y: f64) -> f64 {
    2.0 * alpha * y / m
}

/// `C = (2α − β)(3α − β)/(m²(β − α))`.
pub fn derivative_rate_constant_rv(alpha: f64, beta: f64, m: f64) -> Result<f64> {
    require_rv(alpha, beta)?;
    Ok((2.0 * alpha - beta) * (3.0 * alpha - beta) / (m * m * (beta - alpha)))
}

/// `(−4α/m², 1)`.
pub fn derivative_rate_constants_gamma(alpha: f64, m: f64) -> (f64, f64) {
    (-4.0 * alpha / (m * m), 1.0)
}

/// Limit of the Blackwell rate for a regularly varying tail with
/// `x^{1+α}F̄(x) → D`:
///
/// - `D = 0`: `x·(x^{1−α}ΔR − 2αy/m) → 2α(α−1)y²/m`
/// - `0 < D ≤ ∞`: `(x^αF̄)^{−1}(x^{1−α}ΔR − 2αy/m) → Cy + 2α(α−1)y²/(Dm)`
pub fn blackwell_rate_rv(alpha: f64, m: f64, y: f64, d: f64, c: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!("D must be >= 0, got {d}")));
    }
    let quad_term = 2.0 * alpha * (alpha - 1.0) * y * y / m;
    Ok(if d == 0.0 {
        quad_term
    } else if d.is_infinite() {
        c * y
    } else {
        c * y + quad_term / d
    })
}

/// `2α(α−1)y²/m`.
pub fn blackwell_rate_gamma(alpha: f64, m: f64, y: f64) -> f64 {
    2.0 * alpha * (alpha - 1.0) * y * y / m
}

/// `R − 2x^α/m − 2αx^αW̄_α/m² + x^{2α}F̄/m²`.
pub fn second_order_residual(
    dist: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Renewal::with_finite_moment(dist, alpha, *quad)?.second_order_residual(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Elementary,
    RvRate,
    RvSecond,
    GammaRate,
    GammaRateSecond,
    Blackwell,
    DerivRv,
    DerivGammaC1,
    DerivGammaC2,
    BlackwellRateRv,
    BlackwellRateGamma,
    Example2Rate,
    Example3Rate,
    Example5Rate,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::Elementary,
        TheoremId::RvRate,
        TheoremId::RvSecond,
        TheoremId::GammaRate,
        TheoremId::GammaRateSecond,
        TheoremId::Blackwell,
        TheoremId::DerivRv,
        TheoremId::DerivGammaC1,
        TheoremId::DerivGammaC2,
        TheoremId::BlackwellRateRv,
        TheoremId::BlackwellRateGamma,
        TheoremId::Example2Rate,
        TheoremId::Example3Rate,
        TheoremId::Example5Rate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Elementary => "elementary",
            TheoremId::RvRate => "rv_rate",
            TheoremId::RvSecond => "rv_second",
            TheoremId::GammaRate => "gamma_rate",
            TheoremId::GammaRateSecond => "gamma_rate_second",
            TheoremId::Blackwell => "blackwell",
            TheoremId::DerivRv => "deriv_rv",
            TheoremId::DerivGammaC1 => "deriv_gamma_c1",
            TheoremId::DerivGammaC2 => "deriv_gamma_c2",
            TheoremId::BlackwellRateRv => "blackwell_rate_rv",
            TheoremId::BlackwellRateGamma => "blackwell_rate_gamma",
            TheoremId::Example2Rate => "example2_rate",
            TheoremId::Example3Rate => "example3_rate",
            TheoremId::Example5Rate => "example5_rate",
        }
    }

    /// Limits of second-order quantities get the looser default tolerance.
    pub fn is_second_order(self) -> bool {
        matches!(
            self,
            TheoremId::RvSecond | TheoremId::GammaRateSecond | TheoremId::DerivGammaC1
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem id {s:?}")))
    }
}

/// Optional inputs of [`run_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticExtras {
    /// Increment for the Blackwell statements.
    pub y: f64,
    /// Overrides the default pass tolerance.
    pub tolerance: Option<f64>,
    /// `lim x^{1+α}F̄(x)` when the family cannot supply it.
    pub d_limit: Option<f64>,
    /// Auxiliary function replacing the one carried by the tail class.
    pub aux: Option<AuxFunction>,
}

impl Default for DiagnosticExtras {
    fn default() -> Self {
        Self {
            y: 1.0,
            tolerance: None,
            d_limit: None,
            aux: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub tolerance: f64,
    /// Set when the verdict is a failure.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitDiagnostic {
    pub name: String,
    pub grid: Vec<f64>,
    pub scaled_values: Vec<f64>,
    pub constant: f64,
    pub est_limit: f64,
    pub residuals: Vec<f64>,
    pub verdict: Verdict,
    /// First grid point dropped because a tail fell below `1e−300`.
    pub truncated_at: Option<f64>,
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

impl LimitDiagnostic {
    /// `x,scaled_value,residual` rows after a `# theorem=… constant=…` line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# theorem={} constant={}\n", self.name, fmt17(self.constant));
        out.push_str("x,scaled_value,residual\n");
        for ((x, v), r) in self.grid.iter().zip(&self.scaled_values).zip(&self.residuals) {
            out.push_str(&format!("{},{},{}\n", fmt17(*x), fmt17(*v), fmt17(*r)));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed
    }

    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }
}

/// Default pass tolerance for a limit `constant`.
pub fn default_tolerance(theorem: TheoremId, constant: f64) -> f64 {
    let rel = if theorem.is_second_order() { 0.05 } else { 1e-2 };
    (rel * constant.abs()).max(5e-3)
}

/// `(passed, reason)` for a residual sequence.
pub fn judge(residuals: &[f64], tolerance: f64) -> (bool, Option<String>) {
    let Some(&last) = residuals.last() else {
        return (false, Some("empty grid".into()));
    };
    if !last.is_finite() || last.abs() > tolerance {
        return (
            false,
            Some(format!("final residual {last:e} exceeds tolerance {tolerance:e}")),
        );
    }
    let floor = 1e-3 * tolerance;
    let start = residuals.len() - residuals.len().div_ceil(3);
    for (k, pair) in residuals[start..].windows(2).enumerate() {
        if pair[1].abs() > 1.1 * pair[0].abs() + floor {
            return (
                false,
                Some(format!(
                    "residual grows at grid index {}: {:e} -> {:e}",
                    start + k + 1,
                    pair[0],
                    pair[1]
                )),
            );
        }
    }
    (true, None)
}

/// Largest deviation of `g(x + t·g(x))/g(x)` from 1 for `t = ±1`, and `g(x)/x`.
pub fn self_neglect_check(aux: &AuxFunction, x: f64) -> (f64, f64) {
    let g = aux.eval(x);
    let dev = [-1.0, 1.0]
        .iter()
        .map(|t| (aux.eval(x + t * g) / g - 1.0).abs())
        .fold(0.0, f64::max);
    (dev, g / x)
}

/// `x^{α+1}(F̄(x) − F̄(x + y))` along `xs`; its decay is the Blackwell hypothesis.
pub fn blackwell_hypothesis(dist: &DistModel, alpha: KendallParam, y: f64, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| x.powf(alpha.get() + 1.0) * (dist.tail(x) - dist.tail(x + y)))
        .collect()
}

fn rv_beta(dist: &DistModel, theorem: TheoremId, alpha: f64) -> Result<f64> {
    match dist.tail_class() {
        TailClass::RegularlyVarying { beta } if beta > alpha => Ok(beta),
        TailClass::RegularlyVarying { beta } => Err(Error::IncompatibleTailClass {
            theorem: theorem.to_string(),
            reason: format!("needs beta > alpha, got beta = {beta}, alpha = {alpha}"),
        }),
        other => Err(Error::IncompatibleTailClass {
            theorem: theorem.to_string(),
            reason: format!("needs a regularly varying tail, {} has {other:?}", dist.name()),
        }),
    }
}

fn gamma_aux(dist: &DistModel, theorem: TheoremId, extras: &DiagnosticExtras) -> Result<AuxFunction> {
    match dist.tail_class() {
        TailClass::Gamma { aux } => Ok(extras.aux.unwrap_or(aux)),
        other => Err(Error::IncompatibleTailClass {
            theorem: theorem.to_string(),
            reason: format!("needs a Gamma-class tail, {} has {other:?}", dist.name()),
        }),
    }
}

fn require_density(dist: &DistModel) -> Result<()> {
    if dist.has_density() {
        Ok(())
    } else {
        Err(Error::DensityRequired { family: dist.name() })
    }
}

/// Theorems whose hypotheses the model satisfies.
pub fn applicable_theorems(dist: &DistModel, alpha: KendallParam) -> Vec<TheoremId> {
    let a = alpha.get();
    let mut out = vec![TheoremId::Elementary, TheoremId::Blackwell];
    match dist.tail_class() {
        TailClass::RegularlyVarying { beta } if beta > a => {
            out.extend([TheoremId::RvRate, TheoremId::RvSecond]);
            if dist.has_density() {
                out.push(TheoremId::DerivRv);
                if dist.tail_power_limit(1.0 + a).is_some() {
                    out.push(TheoremId::BlackwellRateRv);
                }
            }
        }
        TailClass::Gamma { .. } => {
            out.extend([TheoremId::GammaRate, TheoremId::GammaRateSecond]);
            if dist.has_density() {
                out.extend([
                    TheoremId::DerivGammaC1,
                    TheoremId::DerivGammaC2,
                    TheoremId::BlackwellRateGamma,
                ]);
            }
        }
        _ => {}
    }
    match dist.family() {
        Family::Pareto { beta } if *beta > a => out.push(TheoremId::Example2Rate),
        Family::ExponentialUnit if a == 1.0 => out.push(TheoremId::Example3Rate),
        Family::KendallStable { exponent } if (exponent - a).abs() <= 1e-12 * a => {
            out.push(TheoremId::Example5Rate)
        }
        _ => {}
    }
    out.sort();
    out
}

// How a theorem's scaled quantity is computed at one grid point.
enum Quantity {
    Elementary,
    RvRate,
    RvSecond,
    GammaRate,
    GammaSecond(AuxFunction),
    Blackwell(f64),
    DerivRv,
    DerivGammaC1,
    DerivGammaC2,
    BlackwellRateRv { y: f64, d: f64 },
    BlackwellRateGamma(f64),
    Example3,
    Example5,
}

impl Quantity {
    // Divides by the tail (or density) at x.
    fn needs_tail(&self) -> bool {
        !matches!(
            self,
            Quantity::Elementary
                | Quantity::Blackwell(_)
                | Quantity::Example5
                | Quantity::BlackwellRateGamma(_)
        ) && !matches!(self, Quantity::BlackwellRateRv { d, .. } if *d == 0.0)
    }

    /// `(scaled_value, residual)`.
    fn eval(&self, r: &Renewal<'_>, x: f64, constant: f64) -> Result<(f64, f64)> {
        let a = r.alpha().get();
        let diff = |v: f64| (v, v - constant);
        Ok(match self {
            Quantity::Elementary => {
                let st = r.state(x)?;
                let scaled = (2.0 * st.s - st.t) / (st.s * st.s);
                (scaled, excess_bracket(&st))
            }
            Quantity::RvRate => {
                let st = r.state(x)?;
                diff(excess_bracket(&st) / st.t)
            }
            Quantity::RvSecond => {
                let st = r.state(x)?;
                diff(second_order_bracket(&st) / (st.t * st.t))
            }
            Quantity::GammaRate => {
                let st = r.state(x)?;
                diff(-excess_bracket(&st) / st.t)
            }
            Quantity::GammaSecond(aux) => {
                let st = r.state(x)?;
                diff(x / aux.eval(x) * gamma_second_bracket(&st))
            }
            Quantity::Example3 => {
                let st = r.state(x)?;
                diff(x * gamma_second_bracket(&st))
            }
            Quantity::Example5 => diff(r.excess(x)?),
            Quantity::Blackwell(y) => {
                let resid = r.blackwell_residual(x, *y)?;
                (constant + resid, resid)
            }
            Quantity::DerivRv => {
                let (st, lead, dens) = r.derivative_excess_parts(x)?;
                let d = lead + dens / (st.s * st.s);
                diff(d / (x.powf(a - 1.0) * st.t))
            }
            Quantity::DerivGammaC1 => {
                let (st, lead, dens) = r.derivative_excess_parts(x)?;
                let (s, w, m) = (st.s, st.w, st.moment);
                let v = lead + dens * w * (m + s) / (s * s * m * m);
                diff(v / (x.powf(a - 1.0) * st.t))
            }
            Quantity::DerivGammaC2 => {
                let (st, lead, dens) = r.derivative_excess_parts(x)?;
                let m = st.moment;
                diff(m * m * (lead + dens / (st.s * st.s)) / dens)
            }
            Quantity::BlackwellRateRv { y, d } => {
                let resid = r.blackwell_residual(x, *y)?;
                if *d == 0.0 {
                    diff(x * resid)
                } else {
                    let st = r.state(x)?;
                    diff(resid / st.t)
                }
            }
            Quantity::BlackwellRateGamma(y) => diff(x * r.blackwell_residual(x, *y)?),
        })
    }
}

// (x^αF̄)^{−1}(x^{−α}R − 2/m) + 1/m² = 2w/(smt) − w(m+s)/(s²m²)
fn gamma_second_bracket(st: &crate::williamson::ScaledState) -> f64 {
    let (s, w, t, m) = (st.s, st.w, st.t, st.moment);
    2.0 * w / (s * m * t) - w * (m + s) / (s * s * m * m)
}

/// Evaluates one theorem's scaled quantity on `grid` and issues a verdict.
pub fn run_diagnostic(
    dist: &DistModel,
    alpha: KendallParam,
    theorem: TheoremId,
    grid: &GridSpec,
    extras: &DiagnosticExtras,
    quad: &QuadratureSpec,
) -> Result<LimitDiagnostic> {
    let a = alpha.get();
    let renewal = Renewal::with_finite_moment(dist, alpha, *quad)?;
    let m = renewal.moment().expect("finite moment was required");
    let y = extras.y;

    let (quantity, constant) = match theorem {
        TheoremId::Elementary => (Quantity::Elementary, 2.0 / m),
        TheoremId::RvRate => {
            let beta = rv_beta(dist, theorem, a)?;
            (Quantity::RvRate, rv_rate_constant(a, beta, m)?)
        }
        TheoremId::RvSecond => {
            let beta = rv_beta(dist, theorem, a)?;
            (Quantity::RvSecond, rv_second_order_constant(a, beta, m)?)
        }
        TheoremId::GammaRate => {
            gamma_aux(dist, theorem, extras)?;
            (Quantity::GammaRate, gamma_rate_constant(m))
        }
        TheoremId::GammaRateSecond => {
            let aux = gamma_aux(dist, theorem, extras)?;
            (Quantity::GammaSecond(aux), gamma_second_order_constant(a, m))
        }
        TheoremId::Blackwell => (Quantity::Blackwell(y), blackwell_constant(a, m, y)),
        TheoremId::DerivRv => {
            let beta = rv_beta(dist, theorem, a)?;
            require_density(dist)?;
            (Quantity::DerivRv, derivative_rate_constant_rv(a, beta, m)?)
        }
        TheoremId::DerivGammaC1 => {
            gamma_aux(dist, theorem, extras)?;
            require_density(dist)?;
            (Quantity::DerivGammaC1, derivative_rate_constants_gamma(a, m).0)
        }
        TheoremId::DerivGammaC2 => {
            gamma_aux(dist, theorem, extras)?;
            require_density(dist)?;
            (Quantity::DerivGammaC2, derivative_rate_constants_gamma(a, m).1)
        }
        TheoremId::BlackwellRateRv => {
            let beta = rv_beta(dist, theorem, a)?;
            require_density(dist)?;
            let d = match extras.d_limit.or_else(|| dist.tail_power_limit(1.0 + a)) {
                Some(d) => d,
                None => {
                    return Err(Error::IncompatibleTailClass {
                        theorem: theorem.to_string(),
                        reason: "lim x^(1+alpha) tail(x) is unknown; supply it explicitly".into(),
                    })
                }
            };
            let c = derivative_rate_constant_rv(a, beta, m)?;
            (Quantity::BlackwellRateRv { y, d }, blackwell_rate_rv(a, m, y, d, c)?)
        }
        TheoremId::BlackwellRateGamma => {
            gamma_aux(dist, theorem, extras)?;
            require_density(dist)?;
            (Quantity::BlackwellRateGamma(y), blackwell_rate_gamma(a, m, y))
        }
        TheoremId::Example2Rate => match dist.family() {
            Family::Pareto { beta } if *beta > a => {
                (Quantity::RvRate, (2.0 * m - 3.0) / (m * m))
            }
            _ => {
                return Err(Error::IncompatibleTailClass {
                    theorem: theorem.to_string(),
                    reason: format!("needs a Pareto law with beta > alpha, got {}", dist.name()),
                })
            }
        },
        TheoremId::Example3Rate => match dist.family() {
            Family::ExponentialUnit if a == 1.0 => (Quantity::Example3, 2.0),
            _ => {
                return Err(Error::IncompatibleTailClass {
                    theorem: theorem.to_string(),
                    reason: format!("needs the unit exponential law with alpha = 1, got {}", dist.name()),
                })
            }
        },
        TheoremId::Example5Rate => match dist.family() {
            Family::KendallStable { exponent } if (exponent - a).abs() <= 1e-12 * a => {
                (Quantity::Example5, 0.5)
            }
            _ => {
                return Err(Error::IncompatibleTailClass {
                    theorem: theorem.to_string(),
                    reason: format!(
                        "needs the Kendall-stable law with exponent equal to alpha, got {}",
                        dist.name()
                    ),
                })
            }
        },
    };

    if let Quantity::GammaSecond(aux) = &quantity {
        let x_last = grid.points().last().copied().unwrap_or(grid.x0);
        let (dev, ratio) = self_neglect_check(aux, x_last);
        if dev > 0.1 || ratio > 0.5 {
            return Err(Error::IncompatibleTailClass {
                theorem: theorem.to_string(),
                reason: format!(
                    "auxiliary function is not self-neglecting on the grid (deviation {dev:e}, g(x)/x = {ratio:e})"
                ),
            });
        }
    }

    let mut xs = Vec::new();
    let mut scaled = Vec::new();
    let mut residuals = Vec::new();
    let mut truncated_at = None;
    for x in grid.points() {
        let tiny = match &quantity {
            Quantity::DerivGammaC2 => dist.density(x).unwrap_or(0.0) < 1e-300,
            q if q.needs_tail() => dist.tail(x) < 1e-300,
            _ => false,
        };
        if tiny {
            truncated_at = Some(x);
            break;
        }
        let (v, r) = quantity.eval(&renewal, x, constant)?;
        xs.push(x);
        scaled.push(v);
        residuals.push(r);
    }
    if xs.len() < MIN_GRID_POINTS {
        return Err(Error::FloatingPointBreakdown {
            needed: MIN_GRID_POINTS,
            largest_usable_x: xs.last().copied().unwrap_or(f64::NAN),
        });
    }

    let tolerance = extras.tolerance.unwrap_or_else(|| default_tolerance(theorem, constant));
    let (passed, reason) = judge(&residuals, tolerance);
    Ok(LimitDiagnostic {
        name: theorem.to_string(),
        est_limit: *scaled.last().expect("nonempty"),
        grid: xs,
        scaled_values: scaled,
        constant,
        residuals,
        verdict: Verdict {
            passed,
            tolerance,
            reason,
        },
        truncated_at,
    })
}
