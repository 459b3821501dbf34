//! The Kendall convolution algebra.
//!
//! Convolution is multiplication of Williamson transforms. Every law built
//! here is recovered from its transform `Ĝ` through `F = G + (x/α) G′`, and
//! the products are differentiated by hand:
//!
//! - `F₁ ⊠ F₂ = G₁F₂ + G₂F₁ − G₁G₂`
//! - `F^{⊠n} = G^{n−1}(nF − (n−1)G)`, with `F^{⊠0} = δ₀`
//! - `Σ aₙ F^{⊠n} = A(G) + A′(G)(F − G)` for a generating function `A`

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distlib::{read_two_column_csv, DistModel, Interpolation, KendallParam};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::special::CompensatedSum;
use crate::williamson::{g_transform, gbar_transform};

/// `(G, Ḡ, F, F − G)` at one point, each from its own stable route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPair {
    pub g: f64,
    pub gbar: f64,
    pub cdf: f64,
    /// `F − G`, taken as `Ḡ − F̄` once `F ≥ 1/2`.
    pub lift: f64,
}

impl TransformPair {
    pub fn of(dist: &DistModel, alpha: KendallParam, x: f64, quad: &QuadratureSpec) -> Result<Self> {
        let cdf = dist.cdf(x);
        let (g, gbar) = if let (Some(g), Some(gb)) = (dist.closed_g(x, alpha), dist.closed_gbar(x, alpha)) {
            (g, gb)
        } else {
            let g = g_transform(dist, alpha, x, quad)?;
            if g > 0.5 {
                let gb = gbar_transform(dist, alpha, x, quad)?;
                (1.0 - gb, gb)
            } else {
                (g, 1.0 - g)
            }
        };
        let lift = if cdf < 0.5 { cdf - g } else { gbar - dist.tail(x) };
        Ok(Self {
            g,
            gbar,
            cdf,
            lift,
        })
    }
}

/// `(F₁ ⊠ F₂)(x)` for `x > 0`.
pub fn convolve(
    f1: &DistModel,
    f2: &DistModel,
    alpha: KendallParam,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let p1 = TransformPair::of(f1, alpha, x, quad)?;
    let p2 = TransformPair::of(f2, alpha, x, quad)?;
    Ok(convolve_pairs(p1.g, p1.cdf, p2.g, p2.cdf))
}

fn convolve_pairs(g1: f64, c1: f64, g2: f64, c2: f64) -> f64 {
    // Symmetric in its arguments bit for bit.
    ((g1 * c2 + g2 * c1) - g1 * g2).clamp(0.0, 1.0)
}

fn nfold_from(g: f64, cdf: f64, n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let n = n as f64;
    // nF − (n−1)G = F + (n−1)(F − G)
    (g.powf(n - 1.0) * (n * cdf - (n - 1.0) * g)).clamp(0.0, 1.0)
}

fn nfold_from_pair(p: &TransformPair, n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let k = n as f64 - 1.0;
    (p.g.powf(k) * (p.cdf + k * p.lift)).clamp(0.0, 1.0)
}

/// `F^{⊠n}(x)`; `n = 0` is `δ₀`.
pub fn nfold(
    f: &DistModel,
    alpha: KendallParam,
    n: u32,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if n == 0 {
        return Ok(if x >= 0.0 { 1.0 } else { 0.0 });
    }
    if x <= 0.0 {
        return Ok(if n == 1 { f.cdf(x) } else { 0.0 });
    }
    let p = TransformPair::of(f, alpha, x, quad)?;
    Ok(nfold_from_pair(&p, n))
}

/// `G_F(x)^n`, the transform of `F^{⊠n}`.
pub fn nfold_transform(
    f: &DistModel,
    alpha: KendallParam,
    n: u32,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    Ok(g_transform(f, alpha, x, quad)?.powi(n as i32))
}

/// Power series `A(z) = Σ aₙ zⁿ` with nonnegative coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratingFunction {
    /// `aₙ = 1`, `A(z) = 1/(1 − z)`.
    Ones,
    /// `aₙ = (1 − p)pⁿ`, `A(z) = (1 − p)/(1 − pz)`.
    Geometric { p: f64 },
    /// `aₙ = e^{−λ}λⁿ/n!`, `A(z) = e^{λ(z − 1)}`.
    PoissonLike { lambda: f64 },
    /// Finitely many coefficients `a₀, a₁, …`.
    Coefficients(Vec<f64>),
}

impl GeneratingFunction {
    pub fn geometric(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("geometric p must lie in [0, 1), got {p}")));
        }
        Ok(Self::Geometric { p })
    }

    pub fn poisson_like(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self::PoissonLike { lambda })
    }

    pub fn coefficients(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter("at least one coefficient is required".into()));
        }
        if let Some((n, v)) = a.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("coefficient a_{n} = {v} must be finite and >= 0")));
        }
        Ok(Self::Coefficients(a))
    }

    /// Reads `n,a_n` rows; indices must be distinct nonnegative integers, gaps are zero.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = read_two_column_csv(reader, ("n", "a_n"))?;
        let mut a: Vec<f64> = Vec::new();
        let mut seen = Vec::new();
        for (row, (n, v)) in rows.into_iter().enumerate() {
            if n < 0.0 || n.fract() != 0.0 || n > 1e7 {
                return Err(Error::Parse {
                    line: row + 2,
                    message: format!("index n = {n} is not a nonnegative integer"),
                });
            }
            let n = n as usize;
            if n >= a.len() {
                a.resize(n + 1, 0.0);
                seen.resize(n + 1, false);
            }
            if seen[n] {
                return Err(Error::Parse {
                    line: row + 2,
                    message: format!("index n = {n} repeated"),
                });
            }
            seen[n] = true;
            a[n] = v;
        }
        Self::coefficients(a)
    }

    /// `aₙ`.
    pub fn coefficient(&self, n: usize) -> f64 {
        match self {
            Self::Ones => 1.0,
            Self::Geometric { p } => (1.0 - p) * p.powi(n as i32),
            Self::PoissonLike { lambda } => {
                if *lambda == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                let ln = -lambda + n as f64 * lambda.ln() - ln_factorial(n);
                ln.exp()
            }
            Self::Coefficients(a) => a.get(n).copied().unwrap_or(0.0),
        }
    }

    /// Number of nonzero terms, if finite.
    pub fn degree(&self) -> Option<usize> {
        match self {
            Self::Coefficients(a) => Some(a.len() - 1),
            _ => None,
        }
    }

    fn check(&self, z: f64, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range { z })
        }
    }

    /// `A(z)`; `one_minus_z` must equal `1 − z` and is used where it avoids cancellation.
    pub fn eval_with_complement(&self, z: f64, one_minus_z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Range { z });
        }
        let v = match self {
            Self::Ones => {
                if one_minus_z <= 0.0 {
                    return Err(Error::Range { z });
                }
                1.0 / one_minus_z
            }
            Self::Geometric { p } => (1.0 - p) / ((1.0 - p) + p * one_minus_z),
            Self::PoissonLike { lambda } => (-lambda * one_minus_z).exp(),
            Self::Coefficients(a) => a.iter().rev().fold(0.0, |acc, &c| acc * z + c),
        };
        self.check(z, v)
    }

    /// `A′(z)`, with the same complement convention.
    pub fn deriv_with_complement(&self, z: f64, one_minus_z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Range { z });
        }
        let v = match self {
            Self::Ones => {
                if one_minus_z <= 0.0 {
                    return Err(Error::Range { z });
                }
                1.0 / (one_minus_z * one_minus_z)
            }
            Self::Geometric { p } => {
                let d = (1.0 - p) + p * one_minus_z;
                p * (1.0 - p) / (d * d)
            }
            Self::PoissonLike { lambda } => lambda * (-lambda * one_minus_z).exp(),
            Self::Coefficients(a) => a
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (n, &c)| acc * z + n as f64 * c),
        };
        self.check(z, v)
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        self.eval_with_complement(z, 1.0 - z)
    }

    pub fn deriv(&self, z: f64) -> Result<f64> {
        self.deriv_with_complement(z, 1.0 - z)
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `WR(x) = Σ aₙ F^{⊠n}(x) = A(G) + A′(G)(F − G)`.
pub fn weighted_renewal(
    f: &DistModel,
    alpha: KendallParam,
    a: &GeneratingFunction,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if x <= 0.0 {
        return Ok(a.coefficient(0) + a.coefficient(1) * f.cdf(0.0));
    }
    let p = TransformPair::of(f, alpha, x, quad)?;
    weighted_from_pair(a, &p)
}

fn weighted_from_pair(a: &GeneratingFunction, p: &TransformPair) -> Result<f64> {
    let value = a.eval_with_complement(p.g, p.gbar)?;
    let slope = a.deriv_with_complement(p.g, p.gbar)?;
    Ok(value + slope * p.lift)
}

/// Direct series `Σ aₙ F^{⊠n}(x)`, stopped once `a_N G^N (N + 1)` falls
/// below `1e−12` of the running sum.
pub fn weighted_series(
    f: &DistModel,
    alpha: KendallParam,
    a: &GeneratingFunction,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    const MAX_TERMS: usize = 50_000_000;
    let p = TransformPair::of(f, alpha, x, quad)?;
    let mut acc = CompensatedSum::default();
    let last = a.degree().unwrap_or(MAX_TERMS);
    for n in 0..=last {
        let an = a.coefficient(n);
        acc.add(an * nfold_from_pair(&p, n as u32));
        let next = a.coefficient(n + 1) * p.g.powi(n as i32 + 1) * (n as f64 + 2.0);
        if n >= 1 && next < 1e-12 * acc.value() {
            return Ok(acc.value());
        }
    }
    if a.degree().is_some() {
        Ok(acc.value())
    } else {
        Err(Error::Range { z: p.g })
    }
}

/// How a [`KendallMeasure`] was built.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Base(DistModel),
    Convolution(Box<KendallMeasure>, Box<KendallMeasure>),
    NFold(Box<KendallMeasure>, u32),
    Weighted(Box<KendallMeasure>, GeneratingFunction),
}

/// A measure of the Kendall algebra, evaluated lazily through its transform.
#[derive(Debug, Clone, PartialEq)]
pub struct KendallMeasure {
    alpha: KendallParam,
    quad: QuadratureSpec,
    provenance: Provenance,
}

impl KendallMeasure {
    pub fn base(dist: DistModel, alpha: KendallParam, quad: QuadratureSpec) -> Self {
        Self {
            alpha,
            quad,
            provenance: Provenance::Base(dist),
        }
    }

    fn check_alpha(&self, other: &Self) -> Result<()> {
        if self.alpha != other.alpha {
            return Err(Error::InvalidParameter(format!(
                "cannot combine measures with alpha {} and {}",
                self.alpha.get(),
                other.alpha.get()
            )));
        }
        Ok(())
    }

    pub fn convolve(self, other: Self) -> Result<Self> {
        self.check_alpha(&other)?;
        Ok(Self {
            alpha: self.alpha,
            quad: self.quad,
            provenance: Provenance::Convolution(Box::new(self), Box::new(other)),
        })
    }

    pub fn nfold(self, n: u32) -> Self {
        Self {
            alpha: self.alpha,
            quad: self.quad,
            provenance: Provenance::NFold(Box::new(self), n),
        }
    }

    pub fn weighted(self, a: GeneratingFunction) -> Self {
        Self {
            alpha: self.alpha,
            quad: self.quad,
            provenance: Provenance::Weighted(Box::new(self), a),
        }
    }

    pub fn alpha(&self) -> KendallParam {
        self.alpha
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `(G(x), F(x))` of the measure at `x > 0`.
    pub fn pair(&self, x: f64) -> Result<(f64, f64)> {
        match &self.provenance {
            Provenance::Base(d) => {
                let p = TransformPair::of(d, self.alpha, x, &self.quad)?;
                Ok((p.g, p.cdf))
            }
            Provenance::Convolution(l, r) => {
                let (g1, c1) = l.pair(x)?;
                let (g2, c2) = r.pair(x)?;
                Ok((g1 * g2, convolve_pairs(g1, c1, g2, c2)))
            }
            Provenance::NFold(b, n) => {
                if *n == 0 {
                    return Ok((1.0, 1.0));
                }
                let (g, c) = b.pair(x)?;
                Ok((g.powi(*n as i32), nfold_from(g, c, *n)))
            }
            Provenance::Weighted(b, a) => {
                let (g, c) = b.pair(x)?;
                let p = TransformPair {
                    g,
                    gbar: 1.0 - g,
                    cdf: c,
                    lift: c - g,
                };
                Ok((a.eval(g)?, weighted_from_pair(a, &p)?))
            }
        }
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        self.pair(x).map(|p| p.0)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.pair(x).map(|p| p.1)
    }

    /// Freezes the CDF on the given abscissae into a tabulated model.
    pub fn tabulate(&self, xs: &[f64], interpolation: Interpolation) -> Result<DistModel> {
        let points = xs
            .iter()
            .map(|&x| Ok((x, if x > 0.0 { self.cdf(x)? } else { 0.0 })))
            .collect::<Result<Vec<_>>>()?;
        crate::distlib::make_tabulated(&points, interpolation)
    }
}

fn uniform_at(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // One f64 draw consumes two 32-bit words.
    rng.set_word_pos(u128::from(index) * 2);
    rng.gen::<f64>()
}

/// Smallest `x` with `cdf(x) ≥ u`, by bracketing and bisection to `1e−10` relative.
pub fn generalized_inverse<C: Fn(f64) -> Result<f64>>(cdf: C, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("level must lie in [0, 1), got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut c_hi = cdf(hi)?;
    let mut flat_from = hi;
    while c_hi < u {
        lo = hi;
        hi *= 2.0;
        let c = cdf(hi)?;
        if c > c_hi {
            flat_from = lo;
        }
        c_hi = c;
        if hi > 1e300 {
            return Err(Error::Bracketing {
                level: u,
                flat_value: c_hi,
                flat_from,
                flat_to: hi,
            });
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Quantile of `F^{⊠n}` at level `u`.
pub fn quantile_nfold(
    f: &DistModel,
    alpha: KendallParam,
    n: u32,
    u: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("sampling needs n >= 1".into()));
    }
    generalized_inverse(|x| nfold(f, alpha, n, x, quad), u)
}

/// `count` draws from `F^{⊠n}`; draw `i` depends only on `(seed, i)`.
pub fn sample_nfold(
    f: &DistModel,
    alpha: KendallParam,
    n: u32,
    count: usize,
    seed: u64,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    sample_nfold_range(f, alpha, n, 0..count as u64, seed, quad)
}

/// Draws with indices in `range`; concatenating ranges reproduces [`sample_nfold`].
pub fn sample_nfold_range(
    f: &DistModel,
    alpha: KendallParam,
    n: u32,
    range: std::ops::Range<u64>,
    seed: u64,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    range
        .map(|i| quantile_nfold(f, alpha, n, uniform_at(seed, i), quad))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::williamson::invert_g;

    fn a(v: f64) -> KendallParam {
        KendallParam::new(v).unwrap()
    }

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn dirac_self_convolution() {
        let d = DistModel::dirac_at_one();
        let v = convolve(&d, &d, a(1.0), 2.0, &q()).unwrap();
        assert_eq!(v, 0.75);
        let oracle = invert_g(|x| g_transform(&d, a(1.0), x, &q()).unwrap().powi(2), a(1.0), 2.0).unwrap();
        assert!((v - oracle).abs() < 1e-8);
    }

    #[test]
    fn pareto_with_dirac() {
        // G_P(4) = 1 + 4^{−2} − 2·4^{−1} = 0.5625, G_δ(4) = 0.75, F_P(4) = 0.9375.
        let p = DistModel::pareto(2.0).unwrap();
        let d = DistModel::dirac_at_one();
        let v = convolve(&p, &d, a(1.0), 4.0, &q()).unwrap();
        assert!((v - 0.84375).abs() < 1e-15);
        let oracle = invert_g(
            |x| g_transform(&p, a(1.0), x, &q()).unwrap() * g_transform(&d, a(1.0), x, &q()).unwrap(),
            a(1.0),
            4.0,
        )
        .unwrap();
        assert!((v - oracle).abs() < 1e-7);
    }

    #[test]
    fn nfold_examples() {
        let d = DistModel::dirac_at_one();
        assert_eq!(nfold(&d, a(1.0), 3, 2.0, &q()).unwrap(), 0.5);
        assert_eq!(nfold(&d, a(1.0), 0, 0.0, &q()).unwrap(), 1.0);
        let e = DistModel::exponential_unit();
        for x in [0.5, 3.0] {
            assert_eq!(nfold(&e, a(1.0), 1, x, &q()).unwrap(), e.cdf(x));
        }
    }

    #[test]
    fn nfold_monotone_in_n() {
        let p = DistModel::pareto(2.5).unwrap();
        for x in [1.5, 4.0, 30.0] {
            let mut prev = 1.0;
            for n in 0..12 {
                let v = nfold(&p, a(1.0), n, x, &q()).unwrap();
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn generating_function_closed_forms() {
        let g = GeneratingFunction::geometric(0.5).unwrap();
        assert!((g.eval(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((g.deriv(0.5).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!(matches!(GeneratingFunction::Ones.eval(1.0), Err(Error::Range { .. })));
        let c = GeneratingFunction::coefficients(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.eval(2.0).unwrap(), 17.0);
        assert_eq!(c.deriv(2.0).unwrap(), 14.0);
        assert!(GeneratingFunction::coefficients(vec![1.0, -1.0]).is_err());
        let pl = GeneratingFunction::poisson_like(2.0).unwrap();
        let series: f64 = (0..60).map(|n| pl.coefficient(n) * 0.3f64.powi(n as i32)).sum();
        assert!((series - pl.eval(0.3).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn weighted_examples() {
        let d = DistModel::dirac_at_one();
        let v = weighted_renewal(&d, a(1.0), &GeneratingFunction::Ones, 2.0, &q()).unwrap();
        assert_eq!(v, 4.0);
        let delta0 = GeneratingFunction::coefficients(vec![1.0]).unwrap();
        assert_eq!(weighted_renewal(&d, a(1.0), &delta0, 2.0, &q()).unwrap(), 1.0);
        let geo = GeneratingFunction::geometric(0.5).unwrap();
        let v = weighted_renewal(&d, a(1.0), &geo, 2.0, &q()).unwrap();
        assert!((v - 8.0 / 9.0).abs() < 1e-15);
        let s = weighted_series(&d, a(1.0), &geo, 2.0, &q()).unwrap();
        assert!((v - s).abs() < 1e-12);
    }

    #[test]
    fn coefficients_from_csv() {
        let g = GeneratingFunction::from_csv("n,a_n\n0,1\n2,0.5\n".as_bytes()).unwrap();
        assert_eq!(g, GeneratingFunction::Coefficients(vec![1.0, 0.0, 0.5]));
        assert!(GeneratingFunction::from_csv("n,a_n\n0,1\n0,2\n".as_bytes()).is_err());
        assert!(GeneratingFunction::from_csv("n,a_n\n1.5,1\n".as_bytes()).is_err());
    }

    #[test]
    fn measure_tree_matches_free_functions() {
        let p = DistModel::pareto(2.0).unwrap();
        let d = DistModel::dirac_at_one();
        let mp = KendallMeasure::base(p.clone(), a(1.0), q());
        let md = KendallMeasure::base(d.clone(), a(1.0), q());
        let conv = mp.clone().convolve(md).unwrap();
        assert_eq!(conv.cdf(4.0).unwrap(), convolve(&p, &d, a(1.0), 4.0, &q()).unwrap());
        let three = mp.nfold(3);
        assert!((three.cdf(5.0).unwrap() - nfold(&p, a(1.0), 3, 5.0, &q()).unwrap()).abs() < 1e-15);
        let wrong = KendallMeasure::base(d, a(2.0), q());
        assert!(three.convolve(wrong).is_err());
    }

    #[test]
    fn quantile_of_dirac_square() {
        let d = DistModel::dirac_at_one();
        let x = quantile_nfold(&d, a(1.0), 2, 0.75, &q()).unwrap();
        assert!((x - 2.0).abs() <= 2e-10 * 2.0);
    }

    #[test]
    fn bracketing_reports_flat_top() {
        let t = crate::distlib::make_tabulated(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.6)], Interpolation::Linear)
            .unwrap();
        match quantile_nfold(&t, a(1.0), 1, 0.9, &q()) {
            Err(Error::Bracketing { flat_value, flat_from, .. }) => {
                assert_eq!(flat_value, 0.6);
                assert!(flat_from <= 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampling_is_deterministic_and_partitionable() {
        let e = DistModel::exponential_unit();
        let s1 = sample_nfold(&e, a(1.0), 2, 6, 7, &q()).unwrap();
        let s2 = sample_nfold(&e, a(1.0), 2, 6, 7, &q()).unwrap();
        assert_eq!(s1, s2);
        let mut parts = sample_nfold_range(&e, a(1.0), 2, 0..2, 7, &q()).unwrap();
        parts.extend(sample_nfold_range(&e, a(1.0), 2, 2..6, 7, &q()).unwrap());
        assert_eq!(s1, parts);
        assert_ne!(s1, sample_nfold(&e, a(1.0), 2, 6, 8, &q()).unwrap());
    }

    #[test]
    fn exponential_single_draws_match_log_quantile() {
        let e = DistModel::exponential_unit();
        let s = sample_nfold(&e, a(1.0), 1, 50, 11, &q()).unwrap();
        for (i, x) in s.iter().enumerate() {
            let u = uniform_at(11, i as u64);
            let exact = -(-u).ln_1p();
            assert!((x - exact).abs() <= 1e-9 * exact.max(1e-3), "{x} vs {exact}");
        }
    }
}
