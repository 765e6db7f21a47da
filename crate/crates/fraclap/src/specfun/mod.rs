//! Real special functions: Gamma, Beta, Pochhammer, the Gauss hypergeometric
//! function ₂F₁, and the normalization constants of the hypersingular
//! representation of `(-Δ)^s`.
//!
//! Everything here is pure, deterministic f64 arithmetic. References for the
//! classical algorithms: Abramowitz & Stegun chapters 6 and 15, DLMF 5 and 15.

mod gamma;
mod hyp2f1;

pub use gamma::{digamma, gamma, gamma_reciprocal, ln_gamma};
pub use hyp2f1::{hyp2f1, Hyp2F1Args};

use std::fmt;

/// Errors from special-function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// Gamma pole: argument is zero or a negative integer.
    Pole { z: f64 },
    /// Input outside the function's domain.
    Domain(String),
    /// Series did not reach the requested tolerance within the term limit.
    NoConvergence { terms: usize },
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pole { z } => write!(f, "gamma pole at z = {z}"),
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
            Self::NoConvergence { terms } => {
                write!(f, "series failed to converge within {terms} terms")
            }
        }
    }
}

impl std::error::Error for SpecFunError {}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// Integer-detection tolerance for parameters that are integers by
/// construction but arrive through float arithmetic (e.g. `s - (s + 2.0)`).
pub(crate) const INT_DETECT_TOL: f64 = 1e-9;

/// True if `x` is within [`INT_DETECT_TOL`] of an integer.
pub(crate) fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < INT_DETECT_TOL
}

/// True if `x` is (numerically) an integer `<= 0`.
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x < 0.5 && near_integer(x)
}

/// Pochhammer symbol `(q)_k = q (q+1) ... (q+k-1)`, with `(q)_0 = 1`.
///
/// The plain product returns an exact 0 whenever `q` is a nonpositive integer
/// and `k + q >= 1`, because the factor `q + i` vanishes for `i = -q`.
pub fn pochhammer(q: f64, k: u32) -> f64 {
    let mut prod = 1.0;
    for i in 0..k {
        prod *= q + i as f64;
    }
    prod
}

/// Beta function `B(p, q) = Γ(p)Γ(q) / Γ(p+q)`.
///
/// For positive arguments the quotient is evaluated in log space so that
/// arguments up to ~10³ do not overflow; otherwise it falls back to the
/// direct Gamma quotient (with sign tracking through `gamma`).
pub fn beta(p: f64, q: f64) -> Result<f64> {
    if is_nonpositive_integer(p) {
        return Err(SpecFunError::Pole { z: p });
    }
    if is_nonpositive_integer(q) {
        return Err(SpecFunError::Pole { z: q });
    }
    if p > 0.0 && q > 0.0 {
        if is_nonpositive_integer(p + q) {
            // Γ(p+q) pole forces B = 0 (cannot happen for p, q > 0, kept for safety).
            return Ok(0.0);
        }
        Ok((ln_gamma(p)? + ln_gamma(q)? - ln_gamma(p + q)?).exp())
    } else {
        // Negative non-integer arguments: direct quotient. 1/Γ(p+q) = 0 at poles.
        Ok(gamma(p)? * gamma(q)? * gamma_reciprocal(p + q))
    }
}

/// Surface area of the unit sphere `S^d`, `ω_d = 2 π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_area(d: u32) -> f64 {
    let half = (d as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half).expect("positive argument")
}

/// Normalization constant of the order-`2m` hypersingular representation.
///
/// ```text
/// c_{n,m,s} = 4^s Γ(n/2+s) / (π^{n/2} Γ(-s))       · ( Σ_{k=1}^m (-1)^k C(2m,m-k) k^{2s} )^{-1}          s ∈ (0,m)\ℕ
/// c_{n,m,s} = 4^s Γ(n/2+s) s! / (2 π^{n/2})        · ( Σ_{k=2}^m (-1)^{k-s+1} C(2m,m-k) k^{2s} ln k )^{-1}   s ∈ {1,…,m-1}
/// ```
///
/// The result is strictly positive throughout the admissible range.
pub fn c_nms(n: u32, m: u32, s: f64) -> Result<f64> {
    if n < 1 || m < 1 {
        return Err(SpecFunError::Domain(format!(
            "c_nms requires n >= 1 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    if !(s > 0.0) || s >= m as f64 {
        return Err(SpecFunError::Domain(format!(
            "c_nms requires 0 < s < m, got s = {s}, m = {m}"
        )));
    }
    let half_n = n as f64 / 2.0;
    let pi_half_n = std::f64::consts::PI.powf(half_n);
    if near_integer(s) {
        // Integer orders need s <= m - 1 so that the log-weighted sum is nonempty.
        let si = s.round() as u32;
        if si as f64 >= m as f64 {
            return Err(SpecFunError::Domain(format!(
                "integer s = {si} requires s <= m - 1 = {}",
                m - 1
            )));
        }
        let mut sum = 0.0;
        for k in 2..=m {
            let sign = if (k as i64 - si as i64 + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binomial(2 * m, m - k) * (k as f64).powf(2.0 * s) * (k as f64).ln();
        }
        let factorial_s = gamma(s + 1.0)?;
        Ok(4f64.powf(s) * gamma(half_n + s)? * factorial_s / (2.0 * pi_half_n) / sum)
    } else {
        let mut sum = 0.0;
        for k in 1..=m {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binomial(2 * m, m - k) * (k as f64).powf(2.0 * s);
        }
        Ok(4f64.powf(s) * gamma(half_n + s)? / (pi_half_n * gamma(-s)?) / sum)
    }
}

/// `k_{n,s} = 2^{2s-1} Γ(n/2 + s) / π^{n/2}`, the constant relating the
/// surface-integral closed forms to `(-Δ)^s`.
pub fn k_ns(n: u32, s: f64) -> f64 {
    let half_n = n as f64 / 2.0;
    2f64.powf(2.0 * s - 1.0) * gamma(half_n + s).expect("n/2 + s > 0")
        / std::f64::consts::PI.powf(half_n)
}

/// Binomial coefficient as f64 (small arguments only).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut value = 1.0;
    for i in 0..k {
        value = value * (n - i) as f64 / (i + 1) as f64;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let scale = expected.abs().max(1e-300);
        assert!(
            (actual - expected).abs() / scale <= tol,
            "got {actual}, expected {expected} (rel err {})",
            (actual - expected).abs() / scale
        );
    }

    #[test]
    fn gamma_factorial() {
        assert_rel(gamma(5.0).unwrap(), 24.0, 1e-14);
    }

    #[test]
    fn gamma_half() {
        assert_rel(gamma(0.5).unwrap(), PI.sqrt(), 1e-14);
    }

    #[test]
    fn gamma_negative_half_by_recursion() {
        // Γ(-1/2) = Γ(1/2) / (-1/2) = -2 √π
        assert_rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), 1e-13);
    }

    #[test]
    fn gamma_pole_errors() {
        assert!(matches!(gamma(0.0), Err(SpecFunError::Pole { .. })));
        assert!(matches!(gamma(-3.0), Err(SpecFunError::Pole { .. })));
    }

    #[test]
    fn gamma_reciprocal_at_nonpositive_integers_is_zero() {
        assert_eq!(gamma_reciprocal(-3.0), 0.0);
        assert_eq!(gamma_reciprocal(0.0), 0.0);
        assert_rel(gamma_reciprocal(1.0), 1.0, 1e-14);
        assert_rel(gamma_reciprocal(0.5), 1.0 / PI.sqrt(), 1e-14);
    }

    #[test]
    fn gamma_accuracy_on_recursion_range() {
        // Spot check the 1e-12 budget on |z| <= 50 against the duplication
        // formula Γ(2z) = Γ(z) Γ(z+1/2) 2^{2z-1} / √π.
        for &z in &[0.3, 1.7, 4.9, 12.25, 24.5, -0.7, -5.3, -17.75, -24.9] {
            let lhs = gamma(2.0 * z).unwrap();
            let rhs = gamma(z).unwrap() * gamma(z + 0.5).unwrap() * 2f64.powf(2.0 * z - 1.0)
                / PI.sqrt();
            assert_rel(lhs, rhs, 1e-12);
        }
    }

    #[test]
    fn reflection_consistency() {
        // Γ(z) Γ(1-z) sin(πz) / π = 1 for 200 pseudo-random non-integer z in (-10, 10).
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        while checked < 200 {
            let z = -10.0 + 20.0 * next();
            if near_integer(z) {
                continue;
            }
            let value = gamma(z).unwrap() * gamma(1.0 - z).unwrap() * (PI * z).sin() / PI;
            assert_rel(value, 1.0, 1e-10);
            checked += 1;
        }
    }

    #[test]
    fn beta_classical_values() {
        assert_rel(beta(0.5, 0.5).unwrap(), PI, 1e-13);
        assert_rel(beta(1.0, 1.0).unwrap(), 1.0, 1e-14);
    }

    #[test]
    fn beta_matches_integral_representation() {
        // Oracle: adaptive Simpson quadrature of ∫_0^1 (1-t)^{p-1} t^{q-1} dt.
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1)
                    + simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
            }
        }
        let p = 2.5;
        let q = 1.5;
        let f = |t: f64| (1.0 - t).powf(p - 1.0) * t.powf(q - 1.0);
        let oracle = simpson(&f, 0.0, 1.0, f(0.0), f(0.5), f(1.0), 1e-12, 40);
        assert_rel(beta(p, q).unwrap(), oracle, 1e-10);
    }

    #[test]
    fn beta_log_space_large_arguments() {
        // B(900, 100) via log-space must be finite and match lnΓ arithmetic.
        let b = beta(900.0, 100.0).unwrap();
        assert!(b.is_finite() && b > 0.0);
        let ln_b = ln_gamma(900.0).unwrap() + ln_gamma(100.0).unwrap() - ln_gamma(1000.0).unwrap();
        assert_rel(b.ln(), ln_b, 1e-12);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(-1.0, 2), 0.0);
        assert_eq!(pochhammer(123.456, 0), 1.0);
        assert_eq!(pochhammer(-3.0, 5), 0.0); // terminates through the zero factor
        assert_eq!(pochhammer(-3.0, 3), -6.0); // (-3)(-2)(-1)
    }

    #[test]
    fn c_nms_one_dimensional_half_laplacian() {
        // By hand from the definition: c_{1,1,1/2} = 2 Γ(1) / (√π Γ(-1/2)) · (-C(2,0) 1^1)^{-1}
        //                                          = 2 / (√π · (-2√π)) · (-1) = 1/π.
        assert_rel(c_nms(1, 1, 0.5).unwrap(), 1.0 / PI, 1e-13);
    }

    #[test]
    fn c_nms_ratio_identity() {
        // c_{n,m,s} / c_{1,m,s} = Γ(n/2+s) √π / (π^{n/2} Γ(1/2+s)); the
        // combinatorial sum cancels because it does not depend on n.
        for &(n, m, s) in &[(2u32, 2u32, 1.5f64), (3, 2, 1.9), (4, 3, 2.5), (5, 4, 3.3), (2, 3, 2.0)] {
            let lhs = c_nms(n, m, s).unwrap() / c_nms(1, m, s).unwrap();
            let rhs = gamma(n as f64 / 2.0 + s).unwrap() * PI.sqrt()
                / (PI.powf(n as f64 / 2.0) * gamma(0.5 + s).unwrap());
            assert_rel(lhs, rhs, 1e-12);
        }
    }

    #[test]
    fn c_nms_positive() {
        for &m in &[1u32, 2, 3, 4] {
            let mut s = 0.1;
            while s < m as f64 {
                if !near_integer(s) {
                    for n in 1..=5u32 {
                        let c = c_nms(n, m, s).unwrap();
                        assert!(c > 0.0, "c_nms({n},{m},{s}) = {c} not positive");
                    }
                }
                s += 0.173;
            }
        }
        // Integer branch.
        for &(m, s) in &[(2u32, 1.0f64), (3, 1.0), (3, 2.0), (4, 3.0)] {
            for n in 1..=4u32 {
                let c = c_nms(n, m, s).unwrap();
                assert!(c > 0.0, "c_nms({n},{m},{s}) = {c} not positive");
            }
        }
    }

    #[test]
    fn c_nms_domain_errors() {
        assert!(c_nms(2, 1, 1.5).is_err()); // s >= m
        assert!(c_nms(2, 1, 1.0).is_err()); // integer s needs s <= m-1
    }

    #[test]
    fn k_ns_values() {
        assert_rel(k_ns(2, 1.0), 2.0 / PI, 1e-14);
        assert_rel(k_ns(2, 0.5), gamma(1.5).unwrap() / PI, 1e-14);
        for &(n, s) in &[(1u32, 0.3f64), (2, 1.7), (3, 2.5), (5, 4.9)] {
            assert!(k_ns(n, s) > 0.0);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_rel(sphere_area(0), 2.0, 1e-14); // |S^0| = 2
        assert_rel(sphere_area(1), 2.0 * PI, 1e-14);
        assert_rel(sphere_area(2), 4.0 * PI, 1e-14);
    }
}
