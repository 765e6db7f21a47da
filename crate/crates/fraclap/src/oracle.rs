//! Independent numerical evaluation of the hypersingular integral
//!
//! ```text
//! L_{m,s} u(x) = c_{n,m,s}/2 ∫_{R^n} δ_m u(x,y) / |y|^{n+2s} dy,
//! δ_m u(x,y)   = Σ_{k=-m}^{m} (-1)^k C(2m, m-k) u(x + k y),
//! ```
//!
//! used as ground truth for every closed form. The integral is split into
//! spherical directions (graded sphere rule) times adaptive Gauss–Kronrod
//! radial integrals whose segments break at every radius where `x + k r ω`
//! crosses the support boundary. Near r = 0 the finite difference vanishes
//! like r^{2m}, which cancels catastrophically in floating point, so the
//! innermost stretch is integrated from a two-term r^{2m}(α + β r²) fit
//! sampled where the difference is still well conditioned. Beyond the last
//! crossing only the k = 0 term survives and the tail is integrated exactly.

use crate::geometry::{self, EllipsoidSpec};
use crate::laplacian::{self, Profile};
use crate::moments;
use crate::specfun::{self, c_nms};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

#[derive(Debug)]
pub enum OracleError {
    Domain(String),
    /// Adaptive subdivision exceeded the depth limit.
    NoConvergence { depth: u32 },
    SpecFun(specfun::SpecFunError),
    Lap(laplacian::LapError),
    Moments(moments::MomentError),
    Geometry(geometry::GeometryError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
            Self::NoConvergence { depth } => {
                write!(f, "adaptive radial quadrature exceeded depth {depth}")
            }
            Self::SpecFun(e) => write!(f, "{e}"),
            Self::Lap(e) => write!(f, "{e}"),
            Self::Moments(e) => write!(f, "{e}"),
            Self::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OracleError {}

impl From<specfun::SpecFunError> for OracleError {
    fn from(e: specfun::SpecFunError) -> Self {
        Self::SpecFun(e)
    }
}

impl From<laplacian::LapError> for OracleError {
    fn from(e: laplacian::LapError) -> Self {
        Self::Lap(e)
    }
}

impl From<moments::MomentError> for OracleError {
    fn from(e: moments::MomentError) -> Self {
        Self::Moments(e)
    }
}

impl From<geometry::GeometryError> for OracleError {
    fn from(e: geometry::GeometryError) -> Self {
        Self::Geometry(e)
    }
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Configuration for the hypersingular evaluator.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Finite-difference order parameter; `None` selects the smallest valid
    /// m for the order s.
    pub m: Option<u32>,
    /// Radial accuracy target, relative to the per-direction magnitude.
    pub radial_tol: f64,
    /// Angular resolution per dimension; `None` selects 512 / 64 / 24 for
    /// n = 2 / 3 / >=4.
    pub angular_resolution: Option<usize>,
    /// Truncation radius used when no support crossings are known.
    pub r_max: f64,
    /// Adaptive bisection depth limit.
    pub max_depth: u32,
    /// Replace adaptivity with a uniform dyadic split of each smooth segment
    /// (2^levels pieces). The node set then no longer depends on the
    /// integrand, which makes the evaluation exactly linear in `u`; used by
    /// the linearity checks.
    pub fixed_split_levels: Option<u32>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            m: None,
            radial_tol: 1e-8,
            angular_resolution: None,
            r_max: 1e3,
            max_depth: 40,
            fixed_split_levels: None,
        }
    }
}

/// Smallest valid finite-difference order: `⌊s⌋ + 1`, and `s + 1` at integer
/// s so that the integer branch of `c_{n,m,s}` has s <= m - 1.
pub fn default_m(s: f64) -> u32 {
    if (s - s.round()).abs() < 1e-12 {
        s.round() as u32 + 1
    } else {
        s.floor() as u32 + 1
    }
}

fn default_angular(n: usize) -> usize {
    match n {
        2 => 512,
        3 => 64,
        _ => 24,
    }
}

/// 15-point Kronrod nodes (positive half) with the embedded 7-point Gauss rule.
const GK_NODES: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const G_WEIGHTS: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod 7-15 pass; returns (estimate, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in GK_NODES.iter().zip(GK_WEIGHTS.iter()).enumerate() {
        if x == 0.0 {
            let v = f(center);
            kron += wk * v;
            gauss += G_WEIGHTS[3] * v;
        } else {
            let v1 = f(center - half * x);
            let v2 = f(center + half * x);
            kron += wk * (v1 + v2);
            if i % 2 == 1 {
                gauss += G_WEIGHTS[i / 2] * (v1 + v2);
            }
        }
    }
    ((kron * half), (kron - gauss).abs() * half.abs())
}

/// Worst-first global refinement: bisect the interval with the largest
/// error estimate until the summed estimate meets `tol`, the error floor
/// of the 15-point rule is reached, or some interval would exceed the
/// depth limit.
fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    struct Piece {
        a: f64,
        b: f64,
        est: f64,
        err: f64,
        depth: u32,
        splittable: bool,
    }
    let (est, err) = gk15(f, a, b);
    let mut pieces = vec![Piece { a, b, est, err, depth: 0, splittable: true }];
    let mut total_err = err;
    loop {
        if total_err <= tol {
            break;
        }
        // Split the splittable piece with the largest error.
        let mut worst: Option<usize> = None;
        for (i, p) in pieces.iter().enumerate() {
            if p.splittable && worst.is_none_or(|w| p.err > pieces[w].err) {
                worst = Some(i);
            }
        }
        let Some(i) = worst else {
            // Nothing left to refine: accept if the residual error sits at
            // the accumulation roundoff floor, otherwise report
            // non-convergence at the depth limit.
            let floor: f64 =
                100.0 * f64::EPSILON * pieces.iter().map(|p| p.est.abs()).sum::<f64>();
            if total_err <= tol.max(floor) {
                break;
            }
            return Err(OracleError::NoConvergence { depth: max_depth });
        };
        let Piece { a: pa, b: pb, err: p_err, depth, .. } = pieces[i];
        let mid = 0.5 * (pa + pb);
        let (le, lerr) = gk15(f, pa, mid);
        let (re, rerr) = gk15(f, mid, pb);
        let child_depth = depth + 1;
        let splittable = child_depth < max_depth && mid - pa > 1e-15 * pb.abs().max(1.0);
        total_err += lerr + rerr - p_err;
        pieces[i] = Piece { a: pa, b: mid, est: le, err: lerr, depth: child_depth, splittable };
        pieces.push(Piece { a: mid, b: pb, est: re, err: rerr, depth: child_depth, splittable });
        if pieces.len() > 100_000 {
            return Err(OracleError::NoConvergence { depth: max_depth });
        }
    }
    // Deterministic summation order: left to right.
    pieces.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
    Ok(pairwise_sum(&pieces.iter().map(|p| p.est).collect::<Vec<_>>()))
}

/// Non-adaptive integrator: 2^levels equal pieces, GK15 on each.
fn fixed_split<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, levels: u32) -> f64 {
    let pieces = 1usize << levels;
    let h = (b - a) / pieces as f64;
    let estimates: Vec<f64> = (0..pieces)
        .map(|i| gk15(f, a + i as f64 * h, a + (i + 1) as f64 * h).0)
        .collect();
    pairwise_sum(&estimates)
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

/// `δ_m u(x, r ω)` for a pointwise-evaluable u.
fn delta_m<F: Fn(&[f64]) -> f64>(u: &F, x: &[f64], omega: &[f64], r: f64, m: u32) -> f64 {
    let mut sum = 0.0;
    let mut y = vec![0.0; x.len()];
    for k in -(m as i64)..=(m as i64) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * binomial(2 * m, (m as i64 - k) as u32);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x[i] + k as f64 * r * omega[i];
        }
        sum += coeff * u(&y);
    }
    sum
}

/// Positive radii at which `x + k r ω` crosses `∂E_a` for some |k| <= m.
fn ellipsoid_breakpoints(e: &EllipsoidSpec, x: &[f64], omega: &[f64], m: u32) -> Vec<f64> {
    let qa = e.a_norm_sq(omega);
    let qb = e.a_inner(x, omega);
    let qc = e.a_norm_sq(x) - 1.0;
    let disc = qb * qb - qa * qc;
    let mut out = Vec::with_capacity(2 * m as usize);
    if disc <= 0.0 {
        return out; // x outside or tangent; callers require interior x
    }
    let root = disc.sqrt();
    let rho_plus = (-qb + root) / qa;
    let rho_minus = (-qb - root) / qa;
    for k in 1..=m {
        out.push(rho_plus / k as f64);
        out.push(-rho_minus / k as f64);
    }
    out.sort_by(|p, q| p.partial_cmp(q).unwrap());
    out.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * q.abs());
    out
}

/// Radial integral `∫_0^∞ δ_m u(x, r ω) r^{-1-2s} dr` for one direction.
fn radial_integral<F: Fn(&[f64]) -> f64>(
    u: &F,
    x: &[f64],
    omega: &[f64],
    s: f64,
    m: u32,
    breakpoints: &[f64],
    u_at_x: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    let mut integrand = |r: f64| delta_m(u, x, omega, r, m) * r.powf(-1.0 - 2.0 * s);

    let (first, last) = match (breakpoints.first(), breakpoints.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => {
            // No known crossings: integrate [r0, r_max] plus analytic pieces.
            let r0 = 1e-2;
            let inner = near_zero_piece(u, x, omega, s, m, r0);
            let mid = if let Some(levels) = cfg.fixed_split_levels {
                fixed_split(&mut integrand, r0, cfg.r_max, levels)
            } else {
                let rough = gk15(&mut integrand, r0, cfg.r_max).0.abs() + inner.abs();
                let tol = cfg.radial_tol * rough.max(1e-300);
                adaptive(&mut integrand, r0, cfg.r_max, tol, cfg.max_depth)?
            };
            let tail = binomial(2 * m, m) * u_at_x * cfg.r_max.powf(-2.0 * s) / (2.0 * s);
            return Ok(inner + mid + tail);
        }
    };

    // Leading-order analytic stretch [0, r0], r0 well inside the first
    // smooth interval.
    let r0 = first * 1e-2;
    let inner = near_zero_piece(u, x, omega, s, m, r0);

    // Exact tail beyond the last crossing: only the k = 0 term survives.
    let tail = binomial(2 * m, m) * u_at_x * last.powf(-2.0 * s) / (2.0 * s);

    // Segment [r0, e_1], [e_1, e_2], …, [e_{q-1}, e_q].
    let mut edges = Vec::with_capacity(breakpoints.len() + 1);
    edges.push(r0);
    edges.extend_from_slice(breakpoints);

    let mut total = inner + tail;
    if let Some(levels) = cfg.fixed_split_levels {
        for w in edges.windows(2) {
            total += fixed_split(&mut integrand, w[0], w[1], levels);
        }
        return Ok(total);
    }
    let mut rough = inner.abs() + tail.abs();
    for w in edges.windows(2) {
        rough += gk15(&mut integrand, w[0], w[1]).0.abs();
    }
    let tol = cfg.radial_tol * rough.max(1e-300) / edges.len() as f64;
    for w in edges.windows(2) {
        total += adaptive(&mut integrand, w[0], w[1], tol, cfg.max_depth)?;
    }
    Ok(total)
}

/// `∫_0^{r0} δ_m u(x, rω) r^{-1-2s} dr` from the two-term even fit
/// `δ_m ≈ r^{2m} (α + β r²)` sampled at r0 and r0/2.
fn near_zero_piece<F: Fn(&[f64]) -> f64>(
    u: &F,
    x: &[f64],
    omega: &[f64],
    s: f64,
    m: u32,
    r0: f64,
) -> f64 {
    let g1 = delta_m(u, x, omega, r0, m);
    let g2 = delta_m(u, x, omega, 0.5 * r0, m);
    let four_m = 4f64.powi(m as i32);
    let q = 4.0 / 3.0 * (g1 - four_m * g2);
    let mf = 2.0 * m as f64;
    r0.powf(-2.0 * s) * ((g1 - q) / (mf - 2.0 * s) + q / (mf + 2.0 - 2.0 * s))
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `L_{m,s} u(x)` for a pointwise-evaluable `u` whose support crossings along
/// each ray are provided by `breakpoints(x, ω)` (positive radii, sorted).
pub fn hypersingular_fn<F, B>(
    u: F,
    n: usize,
    s: f64,
    x: &[f64],
    breakpoints: B,
    grade_ratio: f64,
    cfg: &OracleConfig,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
    B: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let m = cfg.m.unwrap_or_else(|| default_m(s));
    if s >= m as f64 {
        return Err(OracleError::Domain(format!(
            "hypersingular representation needs s < m, got s = {s}, m = {m}"
        )));
    }
    let resolution = cfg.angular_resolution.unwrap_or_else(|| default_angular(n));
    let sphere = geometry::unit_sphere_rule(n, resolution, grade_ratio);
    let u_at_x = u(x);
    let contributions: Vec<f64> = sphere
        .par_iter()
        .map(|(omega, w)| {
            let bps = breakpoints(omega);
            radial_integral(&u, x, omega, s, m, &bps, u_at_x, cfg).map(|v| w * v)
        })
        .collect::<Result<Vec<f64>>>()?;
    let constant = c_nms(n as u32, m, s)?;
    Ok(constant / 2.0 * pairwise_sum(&contributions))
}

/// `L_{m,s}` applied to an ellipsoid-supported profile at an interior point
/// with |x|_a <= 0.7 (the closed forms remain valid further out, but the
/// quadrature conditioning degrades near the boundary).
pub fn hypersingular(p: &Profile, x: &[f64], cfg: &OracleConfig) -> Result<f64> {
    let e = &p.ellipsoid;
    let norm = e.a_norm_sq(x).sqrt();
    if norm > 0.7 {
        return Err(OracleError::Domain(format!(
            "oracle evaluation requires |x|_a <= 0.7, got {norm}"
        )));
    }
    let m = cfg.m.unwrap_or_else(|| default_m(p.s));
    let amax = e.axes().iter().cloned().fold(f64::MIN, f64::max);
    let amin = e.axes().iter().cloned().fold(f64::MAX, f64::min);
    let mut cfg = cfg.clone();
    cfg.m = Some(m);
    hypersingular_fn(
        |y| p.eval(y),
        e.n(),
        p.s,
        x,
        |omega| ellipsoid_breakpoints(e, x, omega, m),
        (amax / amin).sqrt(),
        &cfg,
    )
}

/// One oracle-vs-closed-form comparison.
#[derive(Debug, Clone, Serialize)]
pub struct PointCheck {
    pub x: Vec<f64>,
    pub oracle: f64,
    pub closed_form: f64,
    /// |oracle - closed| / max(|closed|, κ/100): near-zero closed values are
    /// normalized against the torsion-constant scale.
    pub rel_err: f64,
}

/// Deterministic report of oracle agreement for one profile.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub profile: String,
    pub s: f64,
    pub axes: Vec<f64>,
    pub m: u32,
    pub max_rel_err: f64,
    pub points: Vec<PointCheck>,
}

/// Compare the hypersingular oracle against the closed form for `p` at each
/// point (all required interior, |x|_a <= 0.7).
pub fn verify_profile(p: &Profile, points: &[Vec<f64>], cfg: &OracleConfig) -> Result<VerifyReport> {
    let e = &p.ellipsoid;
    let jt = moments::jtable(e, p.s)?;
    let kappa = laplacian::torsion_constant(&jt);
    let rule = geometry::surface_rule(e, p.s, geometry::default_resolution(e.n()))?;
    let mut checks = Vec::with_capacity(points.len());
    let mut max_rel = 0.0f64;
    for x in points {
        let oracle = hypersingular(p, x, cfg)?;
        let closed = laplacian::closed_value(&p.kind, &jt, e, x, Some(&rule))?;
        let rel = (oracle - closed).abs() / closed.abs().max(kappa.abs() / 100.0);
        max_rel = max_rel.max(rel);
        checks.push(PointCheck {
            x: x.clone(),
            oracle,
            closed_form: closed,
            rel_err: rel,
        });
    }
    Ok(VerifyReport {
        profile: format!("{:?}", p.kind),
        s: p.s,
        axes: e.axes().to_vec(),
        m: cfg.m.unwrap_or_else(|| default_m(p.s)),
        max_rel_err: max_rel,
        points: checks,
    })
}
