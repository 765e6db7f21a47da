//! Profiles supported on ellipsoids and closed-form / semi-explicit
//! evaluation of `(-Δ)^s` applied to them.
//!
//! The master identity evaluates `(-Δ)^s u_β`, `u_β = (1 - |x|_a²)_+^β`, as a
//! weighted surface integral of a hypergeometric kernel:
//!
//! ```text
//! (-Δ)^s u_β(x) = k_{n,s} Γ(1+β)/Γ(1+β-s) ·
//!     ∫_{∂E_a} (u_1(x) + ⟨x,θ⟩_a²)^{β-s}
//!              ₂F₁(s+1/2, s-β; 1/2; ⟨x,θ⟩_a²/(u_1(x)+⟨x,θ⟩_a²)) μ(dθ),
//! ```
//!
//! with `1/Γ(1+β-s) = 0` at the nonpositive integers (so `u_{s-ℓ}` is
//! s-harmonic). For β = s + j with integer j the kernel is a polynomial and
//! the integral collapses onto the moment table: a constant for j = 0, an
//! explicit quadratic for j = 1, an explicit quartic for j = 2, and a finite
//! binomial sum of moment integrals for general j.

use crate::geometry::{self, EllipsoidSpec, SurfaceRule};
use crate::moments::{self, JTable};
use crate::specfun::{self, gamma, gamma_reciprocal, hyp2f1, k_ns, Hyp2F1Args};
use std::fmt;

#[derive(Debug)]
pub enum LapError {
    Domain(String),
    Geometry(geometry::GeometryError),
    SpecFun(specfun::SpecFunError),
    Moments(moments::MomentError),
}

impl fmt::Display for LapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
            Self::Geometry(e) => write!(f, "{e}"),
            Self::SpecFun(e) => write!(f, "{e}"),
            Self::Moments(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LapError {}

impl From<geometry::GeometryError> for LapError {
    fn from(e: geometry::GeometryError) -> Self {
        Self::Geometry(e)
    }
}

impl From<specfun::SpecFunError> for LapError {
    fn from(e: specfun::SpecFunError) -> Self {
        Self::SpecFun(e)
    }
}

impl From<moments::MomentError> for LapError {
    fn from(e: moments::MomentError) -> Self {
        Self::Moments(e)
    }
}

pub type Result<T> = std::result::Result<T, LapError>;

/// Compactly supported profile families. Axis indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `u_β = (1 - |x|_a²)_+^β`, β > -1.
    UBeta(f64),
    /// `(1 - √a_k x_k) u_s`.
    XiUs(usize),
    /// `(1 - √a_k x_k)² u_s`.
    XiSqUs(usize),
    /// `u_s · Σ_{i≠k} a_i x_i²`.
    QUs(usize),
    /// `p(x) u_s` with `p(x) = (1-x_1)² + γ(1-x_1) - δ(Σ_{k=2}^{n-1} x_k² + a x_n²)`
    /// (eccentric axes).
    PGammaDelta { gamma: f64, delta: f64 },
    /// `(p - ε) u_s`: the base profile minus `ε u_s`.
    Shifted { base: Box<ProfileKind>, epsilon: f64 },
}

/// A profile kind bound to its ellipsoid and order.
#[derive(Debug, Clone)]
pub struct Profile {
    pub kind: ProfileKind,
    pub ellipsoid: EllipsoidSpec,
    pub s: f64,
}

impl Profile {
    pub fn new(kind: ProfileKind, ellipsoid: EllipsoidSpec, s: f64) -> Self {
        Self { kind, ellipsoid, s }
    }

    /// Pointwise value; identically 0 outside E_a.
    pub fn eval(&self, x: &[f64]) -> f64 {
        eval_kind(&self.kind, &self.ellipsoid, self.s, x)
    }
}

fn u_beta_value(e: &EllipsoidSpec, beta: f64, x: &[f64]) -> f64 {
    let t = 1.0 - e.a_norm_sq(x);
    if t <= 0.0 {
        0.0
    } else {
        t.powf(beta)
    }
}

fn eval_kind(kind: &ProfileKind, e: &EllipsoidSpec, s: f64, x: &[f64]) -> f64 {
    match kind {
        ProfileKind::UBeta(beta) => u_beta_value(e, *beta, x),
        ProfileKind::XiUs(k) => (1.0 - e.axes()[*k].sqrt() * x[*k]) * u_beta_value(e, s, x),
        ProfileKind::XiSqUs(k) => {
            (1.0 - e.axes()[*k].sqrt() * x[*k]).powi(2) * u_beta_value(e, s, x)
        }
        ProfileKind::QUs(k) => {
            let q: f64 = x
                .iter()
                .zip(e.axes().iter())
                .enumerate()
                .filter(|(i, _)| i != k)
                .map(|(_, (&xi, &ai))| ai * xi * xi)
                .sum();
            q * u_beta_value(e, s, x)
        }
        ProfileKind::PGammaDelta { gamma, delta } => {
            let n = e.n();
            let a = e.axes()[n - 1];
            let mut q = a * x[n - 1] * x[n - 1];
            for xi in x.iter().take(n - 1).skip(1) {
                q += xi * xi;
            }
            let p = (1.0 - x[0]).powi(2) + gamma * (1.0 - x[0]) - delta * q;
            p * u_beta_value(e, s, x)
        }
        ProfileKind::Shifted { base, epsilon } => {
            eval_kind(base, e, s, x) - epsilon * u_beta_value(e, s, x)
        }
    }
}

/// Polynomial `c + Σ l_i x_i + Σ q_i x_i²` (the closed forms produce no cross
/// terms). Coefficients carry the full `Γ(1+s) k_{n,s}` normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPoly {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
}

impl QuadraticPoly {
    pub fn zeros(n: usize) -> Self {
        Self {
            constant: 0.0,
            linear: vec![0.0; n],
            quadratic: vec![0.0; n],
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.constant;
        for (i, &xi) in x.iter().enumerate() {
            v += self.linear[i] * xi + self.quadratic[i] * xi * xi;
        }
        v
    }

    pub fn add_scaled(&mut self, other: &QuadraticPoly, factor: f64) {
        self.constant += factor * other.constant;
        for i in 0..self.linear.len() {
            self.linear[i] += factor * other.linear[i];
            self.quadratic[i] += factor * other.quadratic[i];
        }
    }
}

/// The torsion constant `κ = Γ(1+s) k_{n,s} J_0`, so that `(-Δ)^s u_s ≡ κ`.
pub fn torsion_constant(jt: &JTable) -> f64 {
    gamma(1.0 + jt.s).expect("s > 0") * k_ns(jt.n as u32, jt.s) * jt.j0
}

/// `τ(x) = u_s(x) / κ`, the normalized torsion function: `(-Δ)^s τ ≡ 1`.
pub fn torsion_value(jt: &JTable, e: &EllipsoidSpec, x: &[f64]) -> f64 {
    u_beta_value(e, jt.s, x) / torsion_constant(jt)
}

/// `(-Δ)^s u_β(x)` by surface quadrature of the master identity. Valid at
/// any interior `x`; the prefactor vanishes identically when `1 + β - s` is
/// a nonpositive integer (β = s - ℓ).
pub fn lap_u_beta(
    x: &[f64],
    beta: f64,
    e: &EllipsoidSpec,
    s: f64,
    rule: &SurfaceRule,
) -> Result<f64> {
    if beta <= -1.0 {
        return Err(LapError::Domain(format!("u_beta needs beta > -1, got {beta}")));
    }
    let norm_sq = e.a_norm_sq(x);
    if norm_sq >= 1.0 {
        return Err(LapError::Domain(format!(
            "evaluation point must be strictly inside E_a, |x|_a^2 = {norm_sq}"
        )));
    }
    let n = e.n() as u32;
    let prefactor = k_ns(n, s) * gamma(1.0 + beta)? * gamma_reciprocal(1.0 + beta - s);
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let v = 1.0 - norm_sq;
    let b = s - beta;
    let mut err: Option<LapError> = None;
    let integral = rule.integrate_mu(|theta| {
        if err.is_some() {
            return 0.0;
        }
        let w = e.a_inner(x, theta).powi(2);
        let z = w / (v + w);
        match hyp2f1(Hyp2F1Args::new(s + 0.5, b, 0.5, z)) {
            Ok(f) => (v + w).powf(beta - s) * f,
            Err(fail) => {
                err = Some(fail.into());
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(prefactor * integral),
    }
}

/// The explicit quadratic for `(-Δ)^s u_{s+1}`:
/// `Γ(2+s) k_{n,s} (J_0 - Σ_i a_i (J_0 + 2 s J_1^{(i)}) x_i²)`.
pub fn lap_u_s_plus_1(jt: &JTable) -> Result<QuadraticPoly> {
    let front = gamma(2.0 + jt.s)? * k_ns(jt.n as u32, jt.s);
    let mut poly = QuadraticPoly::zeros(jt.n);
    poly.constant = front * jt.j0;
    for i in 0..jt.n {
        poly.quadratic[i] = -front * jt.axes[i] * (jt.j0 + 2.0 * jt.s * jt.j1[i]);
    }
    Ok(poly)
}

/// The explicit quartic kernel of `(-Δ)^s u_{s+2}`:
///
/// ```text
/// (-Δ)^s u_{s+2}(x) = Γ(3+s) k_{n,s} / 2 · G(x),
/// G = J_0 u_1² - 4s u_1 Σ_i a_i J_1^{(i)} x_i²
///     + 4s(s-1)/3 (Σ_i a_i² J_2^{(i)} x_i⁴ + 3 Σ_{i≠j} a_i² a_j² M_{ij} x_i² x_j²)
/// ```
///
/// with `M_{ij} = ∫ θ_i² θ_j² μ`. Second partials are available in closed
/// form for the recurrence identities.
#[derive(Debug, Clone)]
pub struct UsPlus2Form {
    s: f64,
    axes: Vec<f64>,
    j0: f64,
    c1: Vec<f64>,      // a_i J_1^{(i)}
    d2: Vec<f64>,      // a_i² J_2^{(i)}
    e2: Vec<Vec<f64>>, // a_i² a_j² M_{ij}
    front: f64,        // Γ(3+s) k_{n,s} / 2
}

impl UsPlus2Form {
    pub fn new(jt: &JTable) -> Result<Self> {
        let n = jt.n;
        let c1 = (0..n).map(|i| jt.axes[i] * jt.j1[i]).collect();
        let d2 = (0..n).map(|i| jt.axes[i].powi(2) * jt.j2[i]).collect();
        let mut e2 = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e2[i][j] = jt.axes[i].powi(2) * jt.axes[j].powi(2) * jt.mixed[i][j];
                }
            }
        }
        Ok(Self {
            s: jt.s,
            axes: jt.axes.clone(),
            j0: jt.j0,
            c1,
            d2,
            e2,
            front: gamma(3.0 + jt.s)? * k_ns(n as u32, jt.s) / 2.0,
        })
    }

    fn u1(&self, x: &[f64]) -> f64 {
        1.0 - self
            .axes
            .iter()
            .zip(x.iter())
            .map(|(&a, &xi)| a * xi * xi)
            .sum::<f64>()
    }

    fn t1(&self, x: &[f64]) -> f64 {
        self.c1.iter().zip(x.iter()).map(|(&c, &xi)| c * xi * xi).sum()
    }

    /// `(-Δ)^s u_{s+2}(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = self.s;
        let u1 = self.u1(x);
        let t1 = self.t1(x);
        let mut t2 = 0.0;
        for i in 0..x.len() {
            t2 += self.d2[i] * x[i].powi(4);
            for j in 0..x.len() {
                if i != j {
                    t2 += 3.0 * self.e2[i][j] * x[i] * x[i] * x[j] * x[j];
                }
            }
        }
        self.front * (self.j0 * u1 * u1 - 4.0 * s * u1 * t1 + 4.0 * s * (s - 1.0) / 3.0 * t2)
    }

    /// `∂_k (-Δ)^s u_{s+2}(x)`.
    pub fn partial(&self, x: &[f64], k: usize) -> f64 {
        let s = self.s;
        let u1 = self.u1(x);
        let t1 = self.t1(x);
        let ak = self.axes[k];
        let xk = x[k];
        let mut cross: f64 = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            if j != k {
                cross += self.e2[k][j] * xj * xj;
            }
        }
        let dg = -4.0 * ak * xk * self.j0 * u1
            - 4.0 * s * (-2.0 * ak * xk * t1 + 2.0 * self.c1[k] * xk * u1)
            + 4.0 * s * (s - 1.0) / 3.0 * (4.0 * self.d2[k] * xk.powi(3) + 12.0 * xk * cross);
        self.front * dg
    }

    /// `∂_k ∂_l (-Δ)^s u_{s+2}(x)`.
    pub fn second_partial(&self, x: &[f64], k: usize, l: usize) -> f64 {
        let s = self.s;
        let j0 = self.j0;
        if k != l {
            let xk = x[k];
            let xl = x[l];
            let d2g = 8.0 * self.axes[k] * self.axes[l] * j0 * xk * xl
                + 16.0 * s * (self.axes[k] * self.c1[l] + self.c1[k] * self.axes[l]) * xk * xl
                + 32.0 * s * (s - 1.0) * self.e2[k][l] * xk * xl;
            self.front * d2g
        } else {
            let u1 = self.u1(x);
            let t1 = self.t1(x);
            let ak = self.axes[k];
            let ck = self.c1[k];
            let xk = x[k];
            let mut cross: f64 = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                if j != k {
                    cross += self.e2[k][j] * xj * xj;
                }
            }
            let d2g = -4.0 * ak * j0 * u1 + 8.0 * ak * ak * j0 * xk * xk
                + 8.0 * s * ak * t1
                + 32.0 * s * ak * ck * xk * xk
                - 8.0 * s * ck * u1
                + 16.0 * s * (s - 1.0) * (self.d2[k] * xk * xk + cross);
            self.front * d2g
        }
    }
}

/// `(-Δ)^s u_{s+j}(x)`. Negative j (with `s + j > -1`) give 0; j ∈ {0,1,2}
/// use the moment-table expansions; j >= 3 needs a surface rule and
/// evaluates the terminating hypergeometric kernel pointwise.
pub fn lap_u_s_plus_j(
    x: &[f64],
    j: i64,
    jt: &JTable,
    e: &EllipsoidSpec,
    rule: Option<&SurfaceRule>,
) -> Result<f64> {
    let s = jt.s;
    if (s + j as f64) <= -1.0 {
        return Err(LapError::Domain(format!(
            "u_(s+j) needs s + j > -1, got s = {s}, j = {j}"
        )));
    }
    if e.a_norm_sq(x) >= 1.0 {
        return Err(LapError::Domain("evaluation point must be inside E_a".into()));
    }
    match j {
        _ if j <= -1 => Ok(0.0),
        0 => Ok(torsion_constant(jt)),
        1 => Ok(lap_u_s_plus_1(jt)?.eval(x)),
        2 => Ok(UsPlus2Form::new(jt)?.eval(x)),
        _ => {
            let rule = rule.ok_or_else(|| {
                LapError::Domain("j >= 3 requires a surface rule for pointwise quadrature".into())
            })?;
            let front = gamma(1.0 + s + j as f64)? * gamma_reciprocal(1.0 + j as f64)
                * k_ns(jt.n as u32, s);
            let v = 1.0 - e.a_norm_sq(x);
            let jf = j as f64;
            let mut err: Option<LapError> = None;
            let integral = rule.integrate_mu(|theta| {
                let w = e.a_inner(x, theta).powi(2);
                match hyp2f1(Hyp2F1Args::new(s + 0.5, -jf, 0.5, w / (v + w))) {
                    Ok(f) => (v + w).powi(j as i32) * f,
                    Err(fail) => {
                        err = Some(fail.into());
                        0.0
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(front * integral),
            }
        }
    }
}

/// The equivalent finite-sum route for `(-Δ)^s u_{s+j}`, j >= 0:
///
/// ```text
/// C_{n,s,j} Σ_{k=0}^{j} (-1)^k Γ(s+1/2+k)/Γ(1/2+k) C(j,k)
///           ∫ (u_1(x) + ⟨x,θ⟩_a²)^{j-k} ⟨x,θ⟩_a^{2k} μ(dθ),
/// C_{n,s,j} = 2^{2s-1} Γ(n/2+s) Γ(1+s+j) / (π^{(n-1)/2} Γ(1/2+s) Γ(1+j)).
/// ```
///
/// Kept as an independent code path against [`lap_u_s_plus_j`].
pub fn lap_u_s_plus_j_by_sum(
    x: &[f64],
    j: u32,
    e: &EllipsoidSpec,
    s: f64,
    rule: &SurfaceRule,
) -> Result<f64> {
    if e.a_norm_sq(x) >= 1.0 {
        return Err(LapError::Domain("evaluation point must be inside E_a".into()));
    }
    let n = e.n() as f64;
    let front = 2f64.powf(2.0 * s - 1.0) * gamma(n / 2.0 + s)? * gamma(1.0 + s + j as f64)?
        / (std::f64::consts::PI.powf((n - 1.0) / 2.0) * gamma(0.5 + s)? * gamma(1.0 + j as f64)?);
    let v = 1.0 - e.a_norm_sq(x);
    let mut total = 0.0;
    for k in 0..=j {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff =
            sign * gamma(s + 0.5 + k as f64)? / gamma(0.5 + k as f64)? * binomial(j, k);
        let integral = rule.integrate_mu(|theta| {
            let w = e.a_inner(x, theta).powi(2);
            (v + w).powi((j - k) as i32) * w.powi(k as i32)
        });
        total += coeff * integral;
    }
    Ok(front * total)
}

fn binomial(n: u32, k: u32) -> f64 {
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

/// `(-Δ)^s ((1 - √a_k x_k) u_s) = Γ(1+s) k_{n,s} (J_0 - (J_0 + 2s J_1^{(k)}) √a_k x_k)`.
pub fn lap_poly1(jt: &JTable, k: usize) -> Result<QuadraticPoly> {
    let front = gamma(1.0 + jt.s)? * k_ns(jt.n as u32, jt.s);
    let mut poly = QuadraticPoly::zeros(jt.n);
    poly.constant = front * jt.j0;
    poly.linear[k] = -front * (jt.j0 + 2.0 * jt.s * jt.j1[k]) * jt.axes[k].sqrt();
    Ok(poly)
}

/// `(-Δ)^s ((1 - √a_k x_k)² u_s)`:
///
/// ```text
/// Γ(1+s) k_{n,s} ( [J_0 + 5s J_1^{(k)} + 2s(s-1) J_2^{(k)}] a_k x_k²
///                 - 2 [J_0 + 2s J_1^{(k)}] √a_k x_k + J_0 - s J_1^{(k)}
///                 + s Σ_{i≠k} [J_1^{(k)} + 2(s-1) a_i a_k M_{ik}] a_i x_i² )
/// ```
pub fn lap_poly2(jt: &JTable, k: usize) -> Result<QuadraticPoly> {
    let s = jt.s;
    let front = gamma(1.0 + s)? * k_ns(jt.n as u32, s);
    let mut poly = QuadraticPoly::zeros(jt.n);
    poly.constant = front * (jt.j0 - s * jt.j1[k]);
    poly.linear[k] = -2.0 * front * (jt.j0 + 2.0 * s * jt.j1[k]) * jt.axes[k].sqrt();
    poly.quadratic[k] =
        front * (jt.j0 + 5.0 * s * jt.j1[k] + 2.0 * s * (s - 1.0) * jt.j2[k]) * jt.axes[k];
    for i in 0..jt.n {
        if i != k {
            poly.quadratic[i] = front
                * s
                * (jt.j1[k] + 2.0 * (s - 1.0) * jt.axes[i] * jt.axes[k] * jt.mixed[i][k])
                * jt.axes[i];
        }
    }
    Ok(poly)
}

/// `(-Δ)^s (u_s Σ_{i≠k} a_i x_i²)`:
///
/// ```text
/// Γ(1+s) k_{n,s} ( s [J_0 - J_1^{(k)} + 2(s-1)(J_1^{(k)} - J_2^{(k)})] a_k x_k²
///                 - s (J_0 - J_1^{(k)})
///                 + Σ_{i≠k} [(s+1) J_0 + 4s J_1^{(i)} - s J_1^{(k)} + 2s(s-1) J_2^{(i)}
///                            + 2s(s-1) Σ_{h≠k,i} a_i a_h M_{hi}] a_i x_i² )
/// ```
pub fn lap_q(jt: &JTable, k: usize) -> Result<QuadraticPoly> {
    let s = jt.s;
    let front = gamma(1.0 + s)? * k_ns(jt.n as u32, s);
    let mut poly = QuadraticPoly::zeros(jt.n);
    poly.constant = -front * s * (jt.j0 - jt.j1[k]);
    poly.quadratic[k] =
        front * s * (jt.j0 - jt.j1[k] + 2.0 * (s - 1.0) * (jt.j1[k] - jt.j2[k])) * jt.axes[k];
    for i in 0..jt.n {
        if i == k {
            continue;
        }
        let mut mixed_sum = 0.0;
        for h in 0..jt.n {
            if h != k && h != i {
                mixed_sum += jt.axes[i] * jt.axes[h] * jt.mixed[h][i];
            }
        }
        poly.quadratic[i] = front
            * ((s + 1.0) * jt.j0 + 4.0 * s * jt.j1[i] - s * jt.j1[k]
                + 2.0 * s * (s - 1.0) * jt.j2[i]
                + 2.0 * s * (s - 1.0) * mixed_sum)
            * jt.axes[i];
    }
    Ok(poly)
}

/// Central-difference step for the non-polynomial recurrence fallback.
const FD_STEP: f64 = 1e-5;

fn near_int(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

/// `(-Δ)^s (x_i u_β)(x) = -1/(2(β+1) a_i) ∂_i (-Δ)^s u_{β+1}(x)`.
///
/// The right-hand side is differentiated analytically when β ∈ {s, s+1}
/// (polynomial closed forms) and by Richardson-extrapolated central finite
/// differences of the surface-quadrature evaluation otherwise.
pub fn lap_recurrence_first(
    x: &[f64],
    beta: f64,
    i: usize,
    jt: &JTable,
    e: &EllipsoidSpec,
    rule: &SurfaceRule,
) -> Result<f64> {
    if beta <= 0.0 {
        return Err(LapError::Domain(format!("recurrence needs beta > 0, got {beta}")));
    }
    let s = jt.s;
    let factor = -1.0 / (2.0 * (beta + 1.0) * e.axes()[i]);
    if near_int(beta - s) && (beta - s).round() == 0.0 {
        // β = s: ∂_i of the explicit quadratic for u_{s+1}.
        let poly = lap_u_s_plus_1(jt)?;
        Ok(factor * (poly.linear[i] + 2.0 * poly.quadratic[i] * x[i]))
    } else if near_int(beta - s) && (beta - s).round() == 1.0 {
        // β = s + 1: ∂_i of the explicit quartic for u_{s+2}.
        let quartic = UsPlus2Form::new(jt)?;
        Ok(factor * quartic.partial(x, i))
    } else {
        let d = central_derivative(x, i, |y| lap_u_beta(y, beta + 1.0, e, s, rule))?;
        Ok(factor * d)
    }
}

/// `(-Δ)^s (x_i x_j u_β)(x) = 1/(2(β+1) a_i) [ δ_{ij} (-Δ)^s u_{β+1}(x)
///  + 1/(2(β+2) a_j) ∂_{ij} (-Δ)^s u_{β+2}(x) ]`.
pub fn lap_recurrence_second(
    x: &[f64],
    beta: f64,
    i: usize,
    j: usize,
    jt: &JTable,
    e: &EllipsoidSpec,
    rule: &SurfaceRule,
) -> Result<f64> {
    if beta <= 0.0 {
        return Err(LapError::Domain(format!("recurrence needs beta > 0, got {beta}")));
    }
    let s = jt.s;
    let delta_ij = if i == j { 1.0 } else { 0.0 };
    let outer = 1.0 / (2.0 * (beta + 1.0) * e.axes()[i]);
    let inner = 1.0 / (2.0 * (beta + 2.0) * e.axes()[j]);
    if near_int(beta - s) && (beta - s).round() == 0.0 {
        let lap_next = lap_u_s_plus_1(jt)?.eval(x);
        let quartic = UsPlus2Form::new(jt)?;
        Ok(outer * (delta_ij * lap_next + inner * quartic.second_partial(x, i, j)))
    } else {
        let lap_next = lap_u_beta(x, beta + 1.0, e, s, rule)?;
        let d2 = central_second_derivative(x, i, j, |y| lap_u_beta(y, beta + 2.0, e, s, rule))?;
        Ok(outer * (delta_ij * lap_next + inner * d2))
    }
}

fn central_derivative<F>(x: &[f64], i: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d_at = |h: f64| -> Result<f64> {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        Ok((f(&xp)? - f(&xm)?) / (2.0 * h))
    };
    // One Richardson step: D = (4 D(h) - D(2h)) / 3.
    let d1 = d_at(FD_STEP)?;
    let d2 = d_at(2.0 * FD_STEP)?;
    Ok((4.0 * d1 - d2) / 3.0)
}

fn central_second_derivative<F>(x: &[f64], i: usize, j: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d_at = |h: f64| -> Result<f64> {
        if i == j {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            Ok((f(&xp)? - 2.0 * f(x)? + f(&xm)?) / (h * h))
        } else {
            let mut xpp = x.to_vec();
            let mut xpm = x.to_vec();
            let mut xmp = x.to_vec();
            let mut xmm = x.to_vec();
            xpp[i] += h;
            xpp[j] += h;
            xpm[i] += h;
            xpm[j] -= h;
            xmp[i] -= h;
            xmp[j] += h;
            xmm[i] -= h;
            xmm[j] -= h;
            Ok((f(&xpp)? - f(&xpm)? - f(&xmp)? + f(&xmm)?) / (4.0 * h * h))
        }
    };
    let h = 1e-4; // second differences need a larger step against roundoff
    let d1 = d_at(h)?;
    let d2 = d_at(2.0 * h)?;
    Ok((4.0 * d1 - d2) / 3.0)
}

/// Closed-form right-hand side of `(-Δ)^s` applied to a degree-<=2 profile
/// kind, as an explicit polynomial. `UBeta(β)` is accepted when β - s is
/// (within tolerance) an integer <= 1.
pub fn closed_quadratic(kind: &ProfileKind, jt: &JTable) -> Result<QuadraticPoly> {
    match kind {
        ProfileKind::UBeta(beta) => {
            let j = beta - jt.s;
            if near_int(j) && j.round() == 0.0 {
                let mut poly = QuadraticPoly::zeros(jt.n);
                poly.constant = torsion_constant(jt);
                Ok(poly)
            } else if near_int(j) && j.round() == 1.0 {
                lap_u_s_plus_1(jt)
            } else if near_int(j) && j.round() < 0.0 {
                Ok(QuadraticPoly::zeros(jt.n))
            } else {
                Err(LapError::Domain(format!(
                    "no quadratic closed form for u_beta with beta = {beta}, s = {}",
                    jt.s
                )))
            }
        }
        ProfileKind::XiUs(k) => lap_poly1(jt, *k),
        ProfileKind::XiSqUs(k) => lap_poly2(jt, *k),
        ProfileKind::QUs(k) => lap_q(jt, *k),
        ProfileKind::PGammaDelta { gamma, delta } => {
            // p u_s = (1-x_1)² u_s + γ (1-x_1) u_s - δ q u_s on eccentric axes.
            let mut poly = lap_poly2(jt, 0)?;
            let p1 = lap_poly1(jt, 0)?;
            let q = lap_q(jt, 0)?;
            poly.add_scaled(&p1, *gamma);
            poly.add_scaled(&q, -delta);
            Ok(poly)
        }
        ProfileKind::Shifted { base, epsilon } => {
            let mut poly = closed_quadratic(base, jt)?;
            poly.constant -= epsilon * torsion_constant(jt);
            Ok(poly)
        }
    }
}

/// Closed-form value of `(-Δ)^s` applied to any profile kind at `x`.
///
/// Quadratic kinds evaluate their moment-table polynomial; `UBeta(β)`
/// dispatches on `j = β - s`: torsion constant, s-harmonic zero, the
/// quadratic/quartic expansions, the finite-sum route for j >= 3, or the
/// master surface quadrature for non-integer offsets (the last two need a
/// surface rule).
pub fn closed_value(
    kind: &ProfileKind,
    jt: &JTable,
    e: &EllipsoidSpec,
    x: &[f64],
    rule: Option<&SurfaceRule>,
) -> Result<f64> {
    match kind {
        ProfileKind::UBeta(beta) => {
            let j = beta - jt.s;
            if near_int(j) {
                lap_u_s_plus_j(x, j.round() as i64, jt, e, rule)
            } else {
                let rule = rule.ok_or_else(|| {
                    LapError::Domain("non-integer beta - s requires a surface rule".into())
                })?;
                lap_u_beta(x, *beta, e, jt.s, rule)
            }
        }
        ProfileKind::Shifted { base, epsilon } => {
            Ok(closed_value(base, jt, e, x, rule)? - epsilon * torsion_constant(jt))
        }
        other => Ok(closed_quadratic(other, jt)?.eval(x)),
    }
}
