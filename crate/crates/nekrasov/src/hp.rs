//! Shared high-precision numerics (MPFR reals, MPC complexes).
//!
//! Numeric mode everywhere in the engine means "MPFR at an explicit precision
//! chosen by the caller", never f64; the default working precisions give >= 30
//! significant digits with headroom for cancellation.  This module holds the
//! conversions from exact rationals, the two quadrature rules the engine needs
//! (tanh-sinh on (0,1] for endpoint-singular integrands, Gauss-Legendre for
//! analytic ones), and small utilities shared by the perturbative and oracle
//! layers.

use crate::Q;
use num::bigint::Sign;
use rug::{float::Constant, ops::Pow, Float};

/// Default working precision (bits) for 30+ digit numeric mode.
pub const PREC_NUMERIC: u32 = 160;

/// Working precision (bits) for the period oracle and gamma quadratures.
pub const PREC_ORACLE: u32 = 256;

/// Convert a `BigInt` into a `rug::Integer` without going through strings.
pub fn bigint_to_rug(n: &num::BigInt) -> rug::Integer {
    let (sign, bytes) = n.to_bytes_le();
    let mag = rug::Integer::from_digits(&bytes, rug::integer::Order::Lsf);
    match sign {
        Sign::Minus => -mag,
        _ => mag,
    }
}

/// Exact rational -> float at the given precision.
pub fn q_to_float(q: &Q, prec: u32) -> Float {
    let num = bigint_to_rug(q.numer());
    let den = bigint_to_rug(q.denom());
    Float::with_val(prec, rug::Rational::from((num, den)))
}

/// Euler-Mascheroni constant.
pub fn euler_gamma(prec: u32) -> Float {
    Float::with_val(prec, Constant::Euler)
}

/// pi at the given precision.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Integrate `f` over (0, 1] by tanh-sinh quadrature.
///
/// The rule places nodes doubly-exponentially close to both endpoints, so
/// integrands with an integrable singularity (or merely slow decay of
/// derivatives) at 0 converge geometrically per level.  Levels are doubled
/// until two successive estimates differ by less than `target_abs` or
/// `max_level` is hit; the last estimate is returned together with the
/// achieved difference.
pub fn tanh_sinh_01<F>(f: F, prec: u32, target_abs: &Float, max_level: u32) -> (Float, Float)
where
    F: Fn(&Float) -> Float,
{
    let pi_half = pi(prec) / 2u32;
    let one = Float::with_val(prec, 1);
    // Beyond arg ~ prec*ln2/2 the node 1/(1 + e^{2 arg}) rounds to an exact
    // endpoint at working precision, which breaks integrands with endpoint
    // singularities; stop slightly before that.
    let arg_cut = Float::with_val(prec, (prec as f64) * 0.34);

    let eval_level = |h: &Float, only_odd: bool| -> Float {
        // sum of w_k f(x_k) for k >= 1 (and k <= -1 by symmetry), plus the
        // central node at level start when only_odd is false.
        let mut sum = Float::with_val(prec, 0);
        let mut k: u64 = if only_odd { 1 } else { 0 };
        let step: u64 = if only_odd { 2 } else { 1 };
        loop {
            let kh = Float::with_val(prec, k) * h.clone();
            let sinh_kh = kh.clone().sinh();
            let arg = Float::with_val(prec, &pi_half * &sinh_kh);
            if arg.clone().abs() > arg_cut {
                break;
            }
            let cosh_arg = arg.clone().cosh();
            let sech2 = Float::with_val(prec, &one / &cosh_arg).square();
            let w = Float::with_val(prec, &pi_half * &kh.clone().cosh()) * sech2.clone();
            // nodes on (0,1): x = (1 + tanh(arg))/2 and its mirror 1 - x,
            // computed as 1/(1 + e^{-2 arg}) and e^{-2 arg}/(1 + e^{-2 arg})
            // so the small one keeps full relative precision near 0.
            let em = Float::with_val(prec, -2 * &arg).exp();
            let denom = Float::with_val(prec, 1 + &em);
            let x_hi = Float::with_val(prec, &one / &denom);
            let x_lo = Float::with_val(prec, &em / &denom);
            if k == 0 {
                sum += Float::with_val(prec, w / 2u32) * f(&x_hi);
            } else {
                sum += Float::with_val(prec, w.clone() / 2u32) * f(&x_hi);
                sum += Float::with_val(prec, w / 2u32) * f(&x_lo);
            }
            if k == 0 && only_odd {
                unreachable!();
            }
            k += step;
            if k > 1 << 24 {
                break;
            }
        }
        sum
    };

    let mut h = Float::with_val(prec, 1);
    let mut estimate = eval_level(&h, false).clone() * h.clone();
    let mut diff = Float::with_val(prec, f64::INFINITY);
    for _level in 1..=max_level {
        h /= 2u32;
        // refine: old nodes are the even-k nodes of the new grid
        let odd = eval_level(&h, true);
        let refined: Float = (estimate.clone() / 2u32) + odd * h.clone();
        diff = Float::with_val(prec, &refined - &estimate).abs();
        estimate = refined;
        if diff < *target_abs {
            break;
        }
    }
    (estimate, diff)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence from the Chebyshev
/// initial guesses; at high precision a handful of iterations per node
/// suffices.  Only even a few hundred nodes are ever requested, so no caching
/// beyond the caller's.
pub fn gauss_legendre(n: usize, prec: u32) -> Vec<(Float, Float)> {
    let mut out = Vec::with_capacity(n);
    let pi_v = pi(prec);
    for i in 0..n {
        // initial guess: cos(pi (i + 3/4) / (n + 1/2))
        let guess_arg = Float::with_val(prec, &pi_v * &Float::with_val(prec, i as f64 + 0.75))
            / Float::with_val(prec, n as f64 + 0.5);
        let mut x = guess_arg.cos();
        let mut dp = Float::with_val(prec, 0);
        for _iter in 0..200 {
            // p_{n}(x) and derivative via the three-term recurrence
            let mut p0 = Float::with_val(prec, 1);
            let mut p1 = x.clone();
            for k in 2..=n {
                let k_f = Float::with_val(prec, k as u32);
                let a = Float::with_val(prec, 2 * k as u32 - 1) * x.clone() * p1.clone();
                let b = Float::with_val(prec, k as u32 - 1) * p0.clone();
                let p2 = (a - b) / k_f;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n, p0 = P_{n-1}
            let x2 = x.clone().pow(2);
            dp = Float::with_val(prec, n as u32) * (x.clone() * p1.clone() - p0.clone())
                / (x2 - Float::with_val(prec, 1));
            let dx = p1 / dp.clone();
            x -= dx.clone();
            if dx.abs() < Float::with_val(prec, Float::parse("1e-70").unwrap()).min(
                &(Float::with_val(prec, 2).pow(-(prec as i32) + 8)),
            ) {
                break;
            }
        }
        let w = Float::with_val(prec, 2) / ((Float::with_val(prec, 1) - x.clone().pow(2)) * dp.pow(2));
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Integrate an analytic `f` over `[a, b]` with a fixed Gauss-Legendre rule.
pub fn gauss_on<F>(f: F, a: &Float, b: &Float, nodes: &[(Float, Float)], prec: u32) -> Float
where
    F: Fn(&Float) -> Float,
{
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut acc = Float::with_val(prec, 0);
    for (x, w) in nodes {
        let t = Float::with_val(prec, &mid + &(half.clone() * x.clone()));
        acc += w.clone() * f(&t);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn rational_conversion() {
        let v = q_to_float(&q(-355, 113), 128);
        let target = Float::with_val(128, -355) / Float::with_val(128, 113);
        assert_eq!(v, target);
    }

    #[test]
    fn tanh_sinh_log_singularity() {
        // int_0^1 log(1/x) dx = 1, integrand singular at 0
        let prec = 192;
        let tol = Float::with_val(prec, Float::parse("1e-40").unwrap());
        let (v, _) = tanh_sinh_01(|x| -x.clone().ln(), prec, &tol, 12);
        let err = Float::with_val(prec, &v - &Float::with_val(prec, 1)).abs();
        assert!(err < Float::with_val(prec, Float::parse("1e-38").unwrap()), "err = {err}");
    }

    #[test]
    fn gauss_legendre_exactness() {
        // GL-12 integrates x^22 on [-1,1] exactly (degree <= 2n-1 = 23)
        let prec = 192;
        let nodes = gauss_legendre(12, prec);
        let a = Float::with_val(prec, -1);
        let b = Float::with_val(prec, 1);
        let v = gauss_on(|x| x.clone().pow(22), &a, &b, &nodes, prec);
        let target = Float::with_val(prec, 2) / Float::with_val(prec, 23);
        let err = Float::with_val(prec, &v - &target).abs();
        assert!(err < Float::with_val(prec, Float::parse("1e-45").unwrap()), "err = {err}");
    }
}
