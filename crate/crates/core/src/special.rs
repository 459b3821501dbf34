//! Cancellation-free elementary kernels shared by the closed-form families.

/// `1 − (1 − e^{−z})/z`, accurate for small `z`.
pub(crate) fn one_minus_expm1_ratio(z: f64) -> f64 {
    if z < 0.5 {
        // Σ_{k≥1} (−1)^{k+1} z^k / (k+1)!
        let mut term = z / 2.0;
        let mut sum = term;
        for k in 2..30 {
            term *= -z / (k as f64 + 1.0);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 + (-z).exp_m1() / z
    }
}

/// `1 − (1 + z)e^{−z}`, accurate for small `z`.
pub(crate) fn one_minus_linear_exp(z: f64) -> f64 {
    if z < 0.5 {
        // Σ_{n≥2} (−1)^n (n−1) z^n / n!
        let mut power_over_fact = z * z / 2.0;
        let mut sum = power_over_fact;
        for n in 3..40 {
            power_over_fact *= z / n as f64;
            let term = if n % 2 == 0 { 1.0 } else { -1.0 } * (n as f64 - 1.0) * power_over_fact;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 - (1.0 + z) * (-z).exp()
    }
}

/// `(1 + t)^a − 1 − a·t`, accurate for small `t`.
pub(crate) fn binomial_excess(a: f64, t: f64) -> f64 {
    if t.abs() < 0.1 {
        // Σ_{k≥2} C(a,k) t^k
        let mut coef = a;
        let mut power = t;
        let mut sum = 0.0;
        for k in 2..80 {
            coef *= (a - (k as f64 - 1.0)) / k as f64;
            power *= t;
            let term = coef * power;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (a * t.ln_1p()).exp_m1() - a * t
    }
}

/// Neumaier-compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
