//! Distribution models on `[0, ∞)`.
//!
//! Each model evaluates its CDF and its tail independently, so tails far
//! below `f64::EPSILON` stay representable. Built-in families also carry
//! closed forms for the Williamson transform and the α-moments, valid for
//! the Kendall exponent stated on each family.

mod tabulated;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{one_minus_expm1_ratio, one_minus_linear_exp};

pub use tabulated::{read_two_column_csv, Interpolation, TabulatedCdf};

/// The exponent α of the Kendall algebra.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct KendallParam(f64);

impl KendallParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha must be a positive finite number, got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for KendallParam {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<KendallParam> for f64 {
    fn from(p: KendallParam) -> f64 {
        p.0
    }
}

/// Auxiliary function `g` of a Gamma-class tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxFunction {
    Constant(f64),
    /// `scale · x^exponent`
    Power { scale: f64, exponent: f64 },
}

impl AuxFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            AuxFunction::Constant(c) => c,
            AuxFunction::Power { scale, exponent } => scale * x.powf(exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    /// `F̄ ∈ RV_{−β}`
    RegularlyVarying { beta: f64 },
    /// `F̄ ∈ Γ(g)`
    Gamma { aux: AuxFunction },
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DiracAtOne,
    /// `F̄(x) = x^{−β}` for `x ≥ 1`.
    Pareto { beta: f64 },
    ExponentialUnit,
    /// `F(x) = x^a` on `(0, 1]`.
    PowerLawUnit { exponent: f64 },
    /// `F(x) = (1 + x^{−a}) e^{−x^{−a}}`.
    KendallStable { exponent: f64 },
    Tabulated(TabulatedCdf),
}

/// Tag used by [`make_builtin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinFamily {
    DiracAtOne,
    Pareto,
    ExponentialUnit,
    PowerLawUnit,
    KendallStable,
}

/// Family parameters; `alpha` is the exponent for the power-law and
/// Kendall-stable families, and `beta` the Pareto index.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FamilyParams {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistModel {
    family: Family,
    tail_class: TailClass,
}

/// Builds a built-in family with all of its closed forms.
pub fn make_builtin(family: BuiltinFamily, params: FamilyParams) -> Result<DistModel> {
    let positive = |name: &str, v: Option<f64>| -> Result<f64> {
        match v {
            Some(v) if v.is_finite() && v > 0.0 => Ok(v),
            Some(v) => Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}"))),
            None => Err(Error::InvalidParameter(format!("{name} is required"))),
        }
    };
    Ok(match family {
        BuiltinFamily::DiracAtOne => DistModel::dirac_at_one(),
        BuiltinFamily::Pareto => DistModel::pareto(positive("beta", params.beta)?)?,
        BuiltinFamily::ExponentialUnit => DistModel::exponential_unit(),
        BuiltinFamily::PowerLawUnit => DistModel::power_law_unit(positive("alpha", params.alpha)?)?,
        BuiltinFamily::KendallStable => DistModel::kendall_stable(positive("alpha", params.alpha)?)?,
    })
}

/// Builds a model from sorted `(x, F(x))` pairs.
pub fn make_tabulated(points: &[(f64, f64)], interpolation: Interpolation) -> Result<DistModel> {
    Ok(DistModel::from_table(TabulatedCdf::new(points, interpolation)?))
}

fn same_exponent(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

impl DistModel {
    pub fn dirac_at_one() -> Self {
        Self {
            family: Family::DiracAtOne,
            tail_class: TailClass::Unspecified,
        }
    }

    pub fn pareto(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("Pareto beta must be > 0, got {beta}")));
        }
        Ok(Self {
            family: Family::Pareto { beta },
            tail_class: TailClass::RegularlyVarying { beta },
        })
    }

    pub fn exponential_unit() -> Self {
        Self {
            family: Family::ExponentialUnit,
            tail_class: TailClass::Gamma {
                aux: AuxFunction::Constant(1.0),
            },
        }
    }

    pub fn power_law_unit(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "power-law exponent must be > 0, got {exponent}"
            )));
        }
        Ok(Self {
            family: Family::PowerLawUnit { exponent },
            tail_class: TailClass::Unspecified,
        })
    }

    /// The tail is `x^{−2a}/2 · (1 + o(1))`, hence regularly varying with index `2a`.
    pub fn kendall_stable(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Kendall-stable exponent must be > 0, got {exponent}"
            )));
        }
        Ok(Self {
            family: Family::KendallStable { exponent },
            tail_class: TailClass::RegularlyVarying {
                beta: 2.0 * exponent,
            },
        })
    }

    pub fn from_table(table: TabulatedCdf) -> Self {
        Self {
            family: Family::Tabulated(table),
            tail_class: TailClass::Unspecified,
        }
    }

    pub fn with_tail_class(mut self, tail_class: TailClass) -> Self {
        self.tail_class = tail_class;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn tail_class(&self) -> TailClass {
        self.tail_class
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::DiracAtOne => "dirac1".into(),
            Family::Pareto { beta } => format!("pareto(beta={beta})"),
            Family::ExponentialUnit => "exp".into(),
            Family::PowerLawUnit { exponent } => format!("powerlaw(alpha={exponent})"),
            Family::KendallStable { exponent } => format!("kendallstable(alpha={exponent})"),
            Family::Tabulated(_) => "table".into(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 || x.is_nan() {
            return 0.0;
        }
        match &self.family {
            Family::DiracAtOne => {
                if x >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Pareto { beta } => {
                if x <= 1.0 {
                    0.0
                } else {
                    -(-beta * x.ln()).exp_m1()
                }
            }
            Family::ExponentialUnit => -(-x).exp_m1(),
            Family::PowerLawUnit { exponent } => {
                if x >= 1.0 {
                    1.0
                } else {
                    x.powf(*exponent)
                }
            }
            Family::KendallStable { exponent } => {
                if x == 0.0 {
                    return 0.0;
                }
                let z = x.powf(-exponent);
                if z < 0.5 {
                    1.0 - one_minus_linear_exp(z)
                } else {
                    (1.0 + z) * (-z).exp()
                }
            }
            Family::Tabulated(t) => t.cdf(x),
        }
    }

    pub fn tail(&self, x: f64) -> f64 {
        if x < 0.0 || x.is_nan() {
            return 1.0;
        }
        match &self.family {
            Family::DiracAtOne => {
                if x >= 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Family::Pareto { beta } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-beta)
                }
            }
            Family::ExponentialUnit => (-x).exp(),
            Family::PowerLawUnit { exponent } => {
                if x >= 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(*exponent)
                }
            }
            Family::KendallStable { exponent } => {
                if x == 0.0 {
                    return 1.0;
                }
                let z = x.powf(-exponent);
                if z < 0.5 {
                    one_minus_linear_exp(z)
                } else {
                    1.0 - (1.0 + z) * (-z).exp()
                }
            }
            Family::Tabulated(t) => t.tail(x),
        }
    }

    pub fn has_density(&self) -> bool {
        !matches!(self.family, Family::DiracAtOne)
    }

    /// Density, or `None` when the law has an atom.
    pub fn density(&self, x: f64) -> Option<f64> {
        if !self.has_density() {
            return None;
        }
        if x < 0.0 {
            return Some(0.0);
        }
        Some(match &self.family {
            Family::DiracAtOne => unreachable!(),
            Family::Pareto { beta } => {
                if x < 1.0 {
                    0.0
                } else {
                    beta * x.powf(-beta - 1.0)
                }
            }
            Family::ExponentialUnit => (-x).exp(),
            Family::PowerLawUnit { exponent } => {
                if x > 1.0 || x == 0.0 {
                    0.0
                } else {
                    exponent * x.powf(exponent - 1.0)
                }
            }
            Family::KendallStable { exponent } => {
                if x == 0.0 {
                    0.0
                } else {
                    exponent * x.powf(-2.0 * exponent - 1.0) * (-x.powf(-exponent)).exp()
                }
            }
            Family::Tabulated(t) => t.density(x),
        })
    }

    /// Analytic knowledge of whether `m(α)` is finite, when available.
    pub fn moment_exists(&self, alpha: KendallParam) -> Option<bool> {
        match &self.family {
            Family::Pareto { beta } => Some(*beta > alpha.get()),
            Family::KendallStable { exponent } => Some(2.0 * exponent > alpha.get()),
            Family::Tabulated(t) => (t.final_value() < 1.0).then_some(false),
            _ => Some(true),
        }
    }

    /// `G_F(x)` in closed form, when known for this α.
    pub fn closed_g(&self, x: f64, alpha: KendallParam) -> Option<f64> {
        let a = alpha.get();
        if x <= 0.0 {
            return Some(0.0);
        }
        match &self.family {
            Family::DiracAtOne => Some(if x >= 1.0 { -(-a * x.ln()).exp_m1() } else { 0.0 }),
            Family::Pareto { beta } if *beta > a => Some(if x <= 1.0 {
                0.0
            } else {
                let b = *beta;
                1.0 + (a / (b - a)) * x.powf(-b) - (b / (b - a)) * x.powf(-a)
            }),
            Family::ExponentialUnit if a == 1.0 => Some(one_minus_expm1_ratio(x)),
            Family::PowerLawUnit { exponent } if same_exponent(*exponent, a) => Some(if x <= 1.0 {
                0.5 * x.powf(a)
            } else {
                1.0 - 0.5 * x.powf(-a)
            }),
            Family::KendallStable { exponent } if same_exponent(*exponent, a) => {
                Some((-x.powf(-a)).exp())
            }
            _ => None,
        }
    }

    /// `Ḡ_F(x)` in closed form, when known for this α.
    pub fn closed_gbar(&self, x: f64, alpha: KendallParam) -> Option<f64> {
        let a = alpha.get();
        if x <= 0.0 {
            return Some(1.0);
        }
        match &self.family {
            Family::DiracAtOne => Some(if x >= 1.0 { x.powf(-a) } else { 1.0 }),
            Family::Pareto { beta } if *beta > a => Some(if x <= 1.0 {
                1.0
            } else {
                let b = *beta;
                (b / (b - a)) * x.powf(-a) - (a / (b - a)) * x.powf(-b)
            }),
            Family::ExponentialUnit if a == 1.0 => Some(-(-x).exp_m1() / x),
            Family::PowerLawUnit { exponent } if same_exponent(*exponent, a) => Some(if x <= 1.0 {
                1.0 - 0.5 * x.powf(a)
            } else {
                0.5 * x.powf(-a)
            }),
            Family::KendallStable { exponent } if same_exponent(*exponent, a) => {
                Some(-(-x.powf(-a)).exp_m1())
            }
            _ => None,
        }
    }

    /// `H_α(x) = ∫₀^x y^α dF(y)` in closed form, when known.
    pub fn closed_h(&self, x: f64, alpha: KendallParam) -> Option<f64> {
        let a = alpha.get();
        if x <= 0.0 {
            return Some(0.0);
        }
        match &self.family {
            Family::DiracAtOne => Some(if x >= 1.0 { 1.0 } else { 0.0 }),
            Family::Pareto { beta } if *beta > a => Some(if x <= 1.0 {
                0.0
            } else {
                let b = *beta;
                -(b / (b - a)) * ((a - b) * x.ln()).exp_m1()
            }),
            Family::PowerLawUnit { exponent } if same_exponent(*exponent, a) => {
                Some(if x <= 1.0 { 0.5 * x.powf(2.0 * a) } else { 0.5 })
            }
            Family::KendallStable { exponent } if same_exponent(*exponent, a) => {
                Some((-x.powf(-a)).exp())
            }
            _ => None,
        }
    }

    /// `W̄_α(x) = ∫_x^∞ y^{α−1} F̄(y) dy` in closed form, when known.
    pub fn closed_wbar(&self, x: f64, alpha: KendallParam) -> Option<f64> {
        let a = alpha.get();
        let x = x.max(0.0);
        match &self.family {
            Family::DiracAtOne => Some(if x >= 1.0 { 0.0 } else { -(a * x.ln()).exp_m1() / a }),
            Family::Pareto { beta } if *beta > a => {
                let b = *beta;
                Some(if x >= 1.0 {
                    x.powf(a - b) / (b - a)
                } else {
                    -(a * x.ln()).exp_m1() / a + 1.0 / (b - a)
                })
            }
            Family::ExponentialUnit if a == 1.0 => Some((-x).exp()),
            Family::PowerLawUnit { exponent } if same_exponent(*exponent, a) => Some(if x >= 1.0 {
                0.0
            } else {
                let u = -(a * x.ln()).exp_m1();
                u * u / (2.0 * a)
            }),
            Family::KendallStable { exponent } if same_exponent(*exponent, a) => {
                if x == 0.0 {
                    Some(1.0 / a)
                } else {
                    Some(one_minus_expm1_ratio(x.powf(-a)) / a)
                }
            }
            _ => None,
        }
    }

    /// `m(α)` in closed form, when known.
    pub fn closed_moment(&self, alpha: KendallParam) -> Option<f64> {
        let a = alpha.get();
        match &self.family {
            Family::DiracAtOne => Some(1.0),
            Family::Pareto { beta } if *beta > a => Some(beta / (beta - a)),
            Family::ExponentialUnit if a == 1.0 => Some(1.0),
            Family::PowerLawUnit { exponent } if same_exponent(*exponent, a) => Some(0.5),
            Family::KendallStable { exponent } if same_exponent(*exponent, a) => Some(1.0),
            _ => None,
        }
    }

    /// `lim x^p F̄(x)` when it is known analytically (`f64::INFINITY` allowed).
    pub fn tail_power_limit(&self, p: f64) -> Option<f64> {
        match &self.family {
            Family::DiracAtOne | Family::PowerLawUnit { .. } | Family::ExponentialUnit => Some(0.0),
            Family::Pareto { beta } => Some(if p < *beta {
                0.0
            } else if p == *beta {
                1.0
            } else {
                f64::INFINITY
            }),
            Family::KendallStable { exponent } => {
                let b = 2.0 * exponent;
                Some(if p < b {
                    0.0
                } else if p == b {
                    0.5
                } else {
                    f64::INFINITY
                })
            }
            Family::Tabulated(t) => (t.final_value() == 1.0).then_some(0.0),
        }
    }

    /// Points where the CDF or its derivative is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.family {
            Family::DiracAtOne | Family::Pareto { .. } | Family::PowerLawUnit { .. } => vec![1.0],
            Family::Tabulated(t) => t.points().map(|(x, _)| x).collect(),
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureSpec};

    fn builtins() -> Vec<DistModel> {
        vec![
            DistModel::dirac_at_one(),
            DistModel::pareto(2.0).unwrap(),
            DistModel::pareto(2.5).unwrap(),
            DistModel::exponential_unit(),
            DistModel::power_law_unit(1.0).unwrap(),
            DistModel::power_law_unit(2.0).unwrap(),
            DistModel::kendall_stable(1.0).unwrap(),
            DistModel::kendall_stable(2.0).unwrap(),
        ]
    }

    #[test]
    fn pareto_moment_at_one() {
        let d = make_builtin(BuiltinFamily::Pareto, FamilyParams { beta: Some(2.0), alpha: None })
            .unwrap();
        assert_eq!(d.closed_moment(KendallParam::new(1.0).unwrap()), Some(2.0));
    }

    #[test]
    fn power_law_moment_is_half() {
        let d = make_builtin(
            BuiltinFamily::PowerLawUnit,
            FamilyParams { alpha: Some(1.0), beta: None },
        )
        .unwrap();
        assert_eq!(d.closed_moment(KendallParam::new(1.0).unwrap()), Some(0.5));
    }

    #[test]
    fn dirac_has_no_mass_below_one() {
        let d = make_builtin(BuiltinFamily::DiracAtOne, FamilyParams::default()).unwrap();
        assert_eq!(d.cdf(0.5), 0.0);
        assert!(d.density(0.5).is_none());
    }

    #[test]
    fn invalid_parameters_name_the_constraint() {
        let err = make_builtin(BuiltinFamily::Pareto, FamilyParams { beta: Some(-1.0), alpha: None })
            .unwrap_err();
        assert!(err.to_string().contains("beta"));
        let err = make_builtin(BuiltinFamily::KendallStable, FamilyParams::default()).unwrap_err();
        assert!(err.to_string().contains("alpha"));
        assert!(KendallParam::new(0.0).is_err());
        assert!(KendallParam::new(f64::NAN).is_err());
    }

    #[test]
    fn pareto_tail_class_index_is_beta() {
        let d = DistModel::pareto(3.7).unwrap();
        assert_eq!(d.tail_class(), TailClass::RegularlyVarying { beta: 3.7 });
    }

    #[test]
    fn tail_survives_below_epsilon() {
        let d = DistModel::exponential_unit();
        assert!((d.tail(30.0) / (-30f64).exp() - 1.0).abs() < 1e-15);
        let k = DistModel::kendall_stable(1.0).unwrap();
        let x = 1e6;
        assert!((k.tail(x) / (0.5 / (x * x)) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn density_integrates_to_cdf() {
        let spec = QuadratureSpec::default();
        for d in builtins().into_iter().filter(DistModel::has_density) {
            for &x in &[0.3, 0.9, 1.7, 4.0, 12.0] {
                let mut pieces = vec![0.0];
                pieces.extend(d.kinks().into_iter().filter(|&k| k < x));
                pieces.push(x);
                let total: f64 = pieces
                    .windows(2)
                    .map(|w| integrate(|t| d.density(t).unwrap(), w[0], w[1], &spec).unwrap())
                    .sum();
                assert!(
                    (total - d.cdf(x)).abs() <= 1e-8,
                    "{} at {x}: {total} vs {}",
                    d.name(),
                    d.cdf(x)
                );
            }
        }
    }

    #[test]
    fn exponential_table_matches_analytic() {
        let n = 10_000;
        let (lo, hi) = (1e-4f64, 60.0f64);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
                (x, -(-x).exp_m1())
            })
            .collect();
        let exact = DistModel::exponential_unit();
        for interp in [Interpolation::Linear, Interpolation::MonotoneCubic] {
            let t = make_tabulated(&pts, interp).unwrap();
            let mut sup: f64 = 0.0;
            for i in 0..5000 {
                let x = 0.01 * (20.0f64 / 0.01).powf(i as f64 / 4999.0);
                sup = sup.max((t.cdf(x) - exact.cdf(x)).abs());
            }
            assert!(sup <= 1e-6, "{interp:?}: {sup}");
        }
    }

    #[test]
    fn moment_existence_for_pareto_pairs() {
        let d = DistModel::pareto(0.5).unwrap();
        assert_eq!(d.moment_exists(KendallParam::new(1.0).unwrap()), Some(false));
        assert_eq!(d.closed_moment(KendallParam::new(1.0).unwrap()), None);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn cdf_plus_tail_is_one(x in 0.0f64..50.0, idx in 0usize..8) {
            let d = &builtins()[idx];
            prop_assert!((d.cdf(x) + d.tail(x) - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn cdf_is_nondecreasing(x in 0.0f64..50.0, dx in 0.0f64..5.0, idx in 0usize..8) {
            let d = &builtins()[idx];
            prop_assert!(d.cdf(x + dx) >= d.cdf(x));
        }
    }
}
