//! The SCAD penalty and its univariate thresholding rule.

use crate::error::{Error, Result};

/// Default SCAD shape parameter.
pub const DEFAULT_A: f64 = 3.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScadParams {
    pub lambda: f64,
    pub a: f64,
}

impl ScadParams {
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if !(a.is_finite() && a > 2.0) {
            return Err(Error::invalid(format!("SCAD shape a must exceed 2, got {a}")));
        }
        Ok(Self { lambda, a })
    }

    pub fn with_lambda(lambda: f64) -> Result<Self> {
        Self::new(lambda, DEFAULT_A)
    }

    /// Penalty value `p(t)` for `t >= 0`; no argument checks.
    pub(crate) fn value(&self, t: f64) -> f64 {
        let (l, a) = (self.lambda, self.a);
        if t <= l {
            l * t
        } else if t <= a * l {
            -(t * t - 2.0 * a * l * t + l * l) / (2.0 * (a - 1.0))
        } else {
            (a + 1.0) * l * l / 2.0
        }
    }

    /// Penalty derivative `p'(t)` for `t >= 0`; left branch at the kinks.
    pub(crate) fn slope(&self, t: f64) -> f64 {
        let (l, a) = (self.lambda, self.a);
        if t <= l {
            l
        } else if t <= a * l {
            (a * l - t) / (a - 1.0)
        } else {
            0.0
        }
    }
}

fn check_abs(theta_abs: f64) -> Result<()> {
    if theta_abs >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("penalty argument must be >= 0, got {theta_abs}")))
    }
}

pub fn scad_penalty(theta_abs: f64, p: &ScadParams) -> Result<f64> {
    check_abs(theta_abs)?;
    Ok(p.value(theta_abs))
}

pub fn scad_derivative(theta_abs: f64, p: &ScadParams) -> Result<f64> {
    check_abs(theta_abs)?;
    Ok(p.slope(theta_abs))
}

/// Closed-form minimizer of `0.5 (z - theta)^2 + p(|theta|)`.
pub fn scad_univariate_min(z: f64, p: &ScadParams) -> Result<f64> {
    if !(p.a > 2.0) {
        return Err(Error::invalid(format!("SCAD shape a must exceed 2, got {}", p.a)));
    }
    let (l, a) = (p.lambda, p.a);
    let az = z.abs();
    let s = z.signum();
    Ok(if az <= 2.0 * l {
        s * (az - l).max(0.0)
    } else if az <= a * l {
        ((a - 1.0) * z - s * a * l) / (a - 2.0)
    } else {
        z
    })
}

/// Global minimizer of `0.5 (z - theta)^2 + weight * p(|theta|)` for any
/// `weight > 0`. The objective is piecewise quadratic in `|theta|`, so the
/// minimum is among the clipped stationary points and breakpoints of the
/// three penalty pieces. Ties go to the smaller magnitude.
pub fn scad_weighted_min(z: f64, weight: f64, p: &ScadParams) -> f64 {
    let (l, a) = (p.lambda, p.a);
    let az = z.abs();
    let h = |t: f64| 0.5 * (az - t) * (az - t) + weight * p.value(t);

    let mut cands = [0.0; 6];
    cands[0] = 0.0;
    cands[1] = (az - weight * l).clamp(0.0, l);
    let curvature = 1.0 - weight / (a - 1.0);
    if curvature > 0.0 {
        let t = (az - weight * a * l / (a - 1.0)) / curvature;
        cands[2] = t.clamp(l, a * l);
    } else {
        cands[2] = l;
    }
    cands[3] = l;
    cands[4] = a * l;
    cands[5] = az.max(a * l);

    let mut best = 0.0;
    let mut best_val = h(0.0);
    for &t in &cands[1..] {
        let v = h(t);
        if v < best_val || (v == best_val && t < best) {
            best = t;
            best_val = v;
        }
    }
    z.signum() * best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p1() -> ScadParams {
        ScadParams::new(1.0, 3.7).unwrap()
    }

    // Composite Simpson integral of the derivative from 0 to t.
    fn integrate_slope(t: f64, p: &ScadParams) -> f64 {
        let m = 20_000;
        let h = t / m as f64;
        let f = |x: f64| scad_derivative(x, p).unwrap();
        let mut s = f(0.0) + f(t);
        for i in 1..m {
            let x = i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    // Coarse grid over [-10, 10] followed by a fine local grid.
    pub(crate) fn grid_min(z: f64, p: &ScadParams) -> f64 {
        let obj = |t: f64| 0.5 * (z - t) * (z - t) + scad_penalty(t.abs(), p).unwrap();
        let scan = |lo: f64, hi: f64, step: f64| {
            let m = ((hi - lo) / step).round() as usize;
            let mut best = (lo, obj(lo));
            for i in 1..=m {
                let t = lo + i as f64 * step;
                let v = obj(t);
                if v < best.1 {
                    best = (t, v);
                }
            }
            best.0
        };
        let coarse = scan(-10.0, 10.0, 1e-3);
        scan(coarse - 2e-3, coarse + 2e-3, 1e-6)
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(scad_penalty(0.0, &p1()).unwrap(), 0.0);
        assert_abs_diff_eq!(scad_penalty(0.5, &p1()).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(scad_penalty(10.0, &p1()).unwrap(), 2.35, epsilon = 1e-15);
        assert_abs_diff_eq!(integrate_slope(0.5, &p1()), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(integrate_slope(10.0, &p1()), 2.35, epsilon = 1e-4);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(scad_derivative(0.5, &p1()).unwrap(), 1.0);
        assert_abs_diff_eq!(scad_derivative(2.0, &p1()).unwrap(), 1.7 / 2.7, epsilon = 1e-15);
        assert_eq!(scad_derivative(5.0, &p1()).unwrap(), 0.0);
        for t in [0.5, 2.0, 5.0] {
            let h = 1e-6;
            let fd = (scad_penalty(t + h, &p1()).unwrap() - scad_penalty(t - h, &p1()).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(fd, scad_derivative(t, &p1()).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn negative_arguments_rejected() {
        assert!(scad_penalty(-0.1, &p1()).is_err());
        assert!(scad_derivative(-0.1, &p1()).is_err());
        assert!(scad_penalty(f64::NAN, &p1()).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ScadParams::new(1.0, 2.0).is_err());
        assert!(ScadParams::new(-1.0, 3.7).is_err());
        let bad = ScadParams { lambda: 1.0, a: 1.5 };
        assert!(scad_univariate_min(1.0, &bad).is_err());
    }

    #[test]
    fn univariate_min_examples() {
        assert_eq!(scad_univariate_min(0.5, &p1()).unwrap(), 0.0);
        assert_abs_diff_eq!(scad_univariate_min(3.0, &p1()).unwrap(), 4.4 / 1.7, epsilon = 1e-14);
        assert_eq!(scad_univariate_min(5.0, &p1()).unwrap(), 5.0);
        assert_abs_diff_eq!(grid_min(0.5, &p1()), 0.0, epsilon = 1e-5);
        assert_abs_diff_eq!(grid_min(3.0, &p1()), 2.588_235_294, epsilon = 1e-5);
    }

    #[test]
    fn continuity_at_kinks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = ScadParams::new(rng.random_range(0.05..3.0), rng.random_range(2.1..6.0)).unwrap();
            for knot in [p.lambda, p.a * p.lambda] {
                let e = 1e-13 * knot;
                let left = scad_penalty(knot - e, &p).unwrap();
                let right = scad_penalty(knot + e, &p).unwrap();
                assert!((left - right).abs() < 1e-12 * (1.0 + left.abs()), "{p:?} at {knot}");
            }
        }
    }

    #[test]
    fn closed_form_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let p = ScadParams::new(rng.random_range(0.1..2.0), DEFAULT_A).unwrap();
            let z = rng.random_range(-8.0..8.0);
            let d = (scad_univariate_min(z, &p).unwrap() - grid_min(z, &p)).abs();
            worst = worst.max(d);
        }
        assert!(worst < 1e-4, "max deviation {worst}");
    }

    proptest! {
        #[test]
        fn penalty_monotone_and_flat(l in 0.01f64..3.0, a in 2.05f64..8.0, t1 in 0.0f64..30.0, t2 in 0.0f64..30.0) {
            let p = ScadParams::new(l, a).unwrap();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(p.value(lo) <= p.value(hi) + 1e-12);
            if lo >= a * l {
                prop_assert_eq!(p.value(lo), p.value(hi));
            }
        }

        #[test]
        fn derivative_matches_finite_difference(l in 0.05f64..3.0, t in 0.0f64..15.0) {
            let p = ScadParams::new(l, DEFAULT_A).unwrap();
            let h = 1e-7;
            prop_assume!((t - l).abs() > 1e-5 && (t - p.a * l).abs() > 1e-5 && t > h);
            let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
            prop_assert!((fd - p.slope(t)).abs() < 1e-6);
        }

        #[test]
        fn shrinkage_bound(l in 0.05f64..3.0, z in -20.0f64..20.0) {
            let p = ScadParams::new(l, DEFAULT_A).unwrap();
            let t = scad_univariate_min(z, &p).unwrap();
            prop_assert!(t.abs() <= z.abs());
            if z.abs() > p.a * l || z == 0.0 {
                prop_assert_eq!(t, z);
            } else {
                prop_assert!(t.abs() < z.abs());
            }
        }

        #[test]
        fn weighted_min_with_unit_weight_is_closed_form(l in 0.05f64..3.0, z in -20.0f64..20.0) {
            let p = ScadParams::new(l, DEFAULT_A).unwrap();
            let closed = scad_univariate_min(z, &p).unwrap();
            prop_assert!((scad_weighted_min(z, 1.0, &p) - closed).abs() < 1e-12 * (1.0 + z.abs()));
        }

        #[test]
        fn weighted_min_beats_grid(l in 0.05f64..2.0, w in 0.2f64..4.0, z in -8.0f64..8.0) {
            let p = ScadParams::new(l, DEFAULT_A).unwrap();
            let obj = |t: f64| 0.5 * (z - t) * (z - t) + w * p.value(t.abs());
            let t = scad_weighted_min(z, w, &p);
            let best = (-2000..=2000).map(|i| obj(i as f64 * 5e-3)).fold(f64::INFINITY, f64::min);
            prop_assert!(obj(t) <= best + 1e-12);
        }
    }
}
