//! The generalized extreme-value law and the joint law of the top `k`
//! normalized order statistics in its domain of attraction.

use super::tail::TailIndex;

/// `G_xi(v)`. Zero below the lower end point when `xi > 0`.
pub fn gev_cdf(xi: TailIndex, v: f64) -> f64 {
    let xi = xi.value();
    if xi == 0.0 {
        return (-(-v).exp()).exp();
    }
    let z = xi * v;
    if z <= -1.0 {
        return 0.0;
    }
    // (1 + xi v)^(-1/xi) through log1p keeps the xi -> 0 limit accurate
    (-(-z.ln_1p() / xi).exp()).exp()
}

/// `log G_xi(v)`, `-inf` at or below the lower end point.
pub fn gev_log_cdf(xi: TailIndex, v: f64) -> f64 {
    let xi = xi.value();
    if xi == 0.0 {
        return -(-v).exp();
    }
    let z = xi * v;
    if z <= -1.0 {
        return f64::NEG_INFINITY;
    }
    -(-z.ln_1p() / xi).exp()
}

/// `log g_xi(v)` where `g = dG/dv`.
pub fn gev_log_pdf(xi: TailIndex, v: f64) -> f64 {
    gev_log_cdf(xi, v) + log_hazard_ratio(xi, v)
}

/// `log(g(v) / G(v)) = -(1 + 1/xi) log(1 + xi v)`, or `-v` for `xi = 0`.
fn log_hazard_ratio(xi: TailIndex, v: f64) -> f64 {
    let xi = xi.value();
    if xi == 0.0 {
        return -v;
    }
    let z = xi * v;
    if z <= -1.0 {
        return f64::NEG_INFINITY;
    }
    -(1.0 + 1.0 / xi) * z.ln_1p()
}

/// Log joint density of the limiting top-`k` vector `v_1 >= ... >= v_k`:
/// `log G(v_k) + sum_i log(g(v_i) / G(v_i))`.
///
/// Returns `-inf` when the ordering is violated or a point leaves the support.
pub fn joint_topk_log_density(xi: TailIndex, v: &[f64]) -> f64 {
    let Some(&last) = v.last() else {
        return f64::NEG_INFINITY;
    };
    if v.windows(2).any(|w| w[0] < w[1]) {
        return f64::NEG_INFINITY;
    }
    let mut total = gev_log_cdf(xi, last);
    for &vi in v {
        total += log_hazard_ratio(xi, vi);
    }
    if total.is_nan() {
        f64::NEG_INFINITY
    } else {
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn xi(v: f64) -> TailIndex {
        TailIndex::new(v).unwrap()
    }

    #[test]
    fn cdf_values() {
        assert_relative_eq!(gev_cdf(xi(0.0), 0.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(gev_cdf(xi(1.0), -1.0), 0.0);
        assert_relative_eq!(gev_cdf(xi(0.5), 2.0), 0.778_800_783_071_404_9, max_relative = 1e-14);
    }

    #[test]
    fn cdf_continuous_at_zero() {
        for &v in &[-2.0, -0.3, 0.0, 1.5, 6.0] {
            assert_relative_eq!(gev_cdf(xi(1e-12), v), gev_cdf(xi(0.0), v), max_relative = 1e-9);
        }
    }

    #[test]
    fn log_pdf_values() {
        assert_relative_eq!(gev_log_pdf(xi(0.0), 0.0), -1.0, max_relative = 1e-15);
        assert_eq!(gev_log_pdf(xi(1.0), -1.0), f64::NEG_INFINITY);
        let mut prev = f64::INFINITY;
        for i in 1..60 {
            let lp = gev_log_pdf(xi(0.0), i as f64);
            assert!(lp < prev);
            prev = lp;
        }
        assert!(gev_log_pdf(xi(0.0), 1e6) < -9.9e5);
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        for &x in &[0.0, 0.3, 1.0] {
            for i in 0..50 {
                let v = -0.9 + 0.1 * i as f64;
                let h = 1e-5;
                let numeric = (gev_cdf(xi(x), v + h) - gev_cdf(xi(x), v - h)) / (2.0 * h);
                let analytic = gev_log_pdf(xi(x), v).exp();
                assert!((numeric - analytic).abs() < 1e-6, "xi={x} v={v}: {numeric} vs {analytic}");
            }
        }
    }

    #[test]
    fn joint_density_cases() {
        assert_relative_eq!(joint_topk_log_density(xi(0.3), &[0.7]), gev_log_pdf(xi(0.3), 0.7), max_relative = 1e-14);
        assert_relative_eq!(joint_topk_log_density(xi(0.0), &[1.0, 0.0]), -2.0, max_relative = 1e-15);
        assert_eq!(joint_topk_log_density(xi(0.0), &[0.0, 1.0]), f64::NEG_INFINITY);
        assert_eq!(joint_topk_log_density(xi(0.5), &[1.0, -3.0]), f64::NEG_INFINITY);
    }
}
