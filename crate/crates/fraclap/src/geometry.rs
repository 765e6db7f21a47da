//! Ellipsoids `E_a = {x : Σ a_i x_i² < 1}`, the a-inner-product, and
//! quadrature rules for surface integrals against the weighted measure
//! `μ(dθ) = dθ / (|θ|^{n+2s} |Aθ|)`.
//!
//! Surface rules are built by mapping a unit-sphere rule `ω ↦ θ = D^{-1/2} ω`
//! (D = diag(a)); the surface element picks up the factor
//! `Π a_i^{-1/2} · |D^{1/2} ω|`. The spherical rule tensors a composite
//! Gauss–Legendre polar angle — with panels geometrically graded toward the
//! poles, where the μ-weight peaks at angular width ~ a^{-1/2} for eccentric
//! axes — against the recursively constructed sub-sphere.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// Axis coefficients must be strictly positive.
    InvalidAxes(String),
    /// Surface rules need n >= 2 and a minimum resolution.
    Unsupported(String),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidAxes(msg) => write!(f, "invalid axes: {msg}"),
            Self::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl std::error::Error for GeometryError {}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// The ellipsoid `E_a` given by its diagonal axis coefficients
/// `a = (a_1, …, a_n)`; the semi-axis along coordinate i has length
/// `a_i^{-1/2}`. General symmetric positive definite quadratic forms are
/// supported through their diagonalization only.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    axes: Vec<f64>,
}

impl EllipsoidSpec {
    pub fn new(axes: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(GeometryError::InvalidAxes("need at least one axis".into()));
        }
        if let Some(bad) = axes.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
            return Err(GeometryError::InvalidAxes(format!(
                "axis coefficients must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { axes })
    }

    /// The eccentric family `(1, …, 1, a)`: semi-axes 1 except the last,
    /// which is `a^{-1/2}`.
    pub fn eccentric(n: usize, a: f64) -> Result<Self> {
        if n < 1 {
            return Err(GeometryError::InvalidAxes("dimension must be >= 1".into()));
        }
        if !(a >= 1.0) {
            return Err(GeometryError::InvalidAxes(format!(
                "eccentric axis coefficient must satisfy a >= 1, got {a}"
            )));
        }
        let mut axes = vec![1.0; n];
        axes[n - 1] = a;
        Self::new(axes)
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[f64] {
        &self.axes
    }

    /// True when the axes follow the `(1, …, 1, a)` pattern used by the
    /// eccentric closed forms.
    pub fn is_eccentric(&self) -> bool {
        let n = self.n();
        self.axes[..n - 1].iter().all(|&a| a == 1.0) && self.axes[n - 1] >= 1.0
    }

    /// `⟨x, y⟩_a = Σ a_i x_i y_i`.
    pub fn a_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(x.iter().zip(y.iter()))
            .map(|(&a, (&xi, &yi))| a * xi * yi)
            .sum()
    }

    /// `|x|_a² = Σ a_i x_i²`. The point is inside E_a iff this is < 1.
    pub fn a_norm_sq(&self, x: &[f64]) -> f64 {
        self.a_inner(x, x)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.a_norm_sq(x) < 1.0
    }

    /// `|Ax|` (Euclidean norm of the image under the axis matrix).
    pub fn a_image_norm(&self, x: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(x.iter())
            .map(|(&a, &xi)| (a * xi).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// A single quadrature node on `∂E_a`.
#[derive(Debug, Clone)]
pub struct SurfaceNode {
    pub theta: Vec<f64>,
    /// Weight against the plain surface measure dθ.
    pub surface_weight: f64,
    /// Weight against μ(dθ) = dθ / (|θ|^{n+2s} |Aθ|).
    pub mu_weight: f64,
}

/// Quadrature rule for integrals over `∂E_a`.
#[derive(Debug, Clone)]
pub struct SurfaceRule {
    pub nodes: Vec<SurfaceNode>,
    pub resolution: usize,
    pub s: f64,
}

impl SurfaceRule {
    /// `∫_{∂E_a} f dθ`.
    pub fn integrate_surface<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|nd| nd.surface_weight * f(&nd.theta)).sum()
    }

    /// `∫_{∂E_a} f μ(dθ)`.
    pub fn integrate_mu<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|nd| nd.mu_weight * f(&nd.theta)).sum()
    }

    /// Total surface area `∫ dθ` as seen by the rule.
    pub fn surface_area(&self) -> f64 {
        self.nodes.iter().map(|nd| nd.surface_weight).sum()
    }
}

/// Default per-angle resolution by dimension.
pub fn default_resolution(n: usize) -> usize {
    match n {
        2 => 256,
        3 => 96,
        _ => 48,
    }
}

/// Build a quadrature rule on `∂E_a` whose μ-weighted sums converge to
/// `∫_{∂E_a} f μ(dθ)` as the resolution grows.
pub fn surface_rule(e: &EllipsoidSpec, s: f64, resolution: usize) -> Result<SurfaceRule> {
    let n = e.n();
    if n < 2 {
        return Err(GeometryError::Unsupported(
            "surface rules need dimension n >= 2".into(),
        ));
    }
    if resolution < 8 {
        return Err(GeometryError::Unsupported(format!(
            "resolution must be >= 8, got {resolution}"
        )));
    }
    let axes = e.axes();
    let amax = axes.iter().cloned().fold(f64::MIN, f64::max);
    let amin = axes.iter().cloned().fold(f64::MAX, f64::min);
    let pole = axes.iter().position(|&a| a == amax).expect("nonempty axes");
    let ratio = (amax / amin).sqrt();
    let sphere = unit_sphere_rule(n, resolution, ratio);

    let scale: f64 = axes.iter().map(|a| a.powf(-0.5)).product();
    let mut nodes = Vec::with_capacity(sphere.len());
    for (mut omega, w) in sphere {
        // The sphere rule grades its last coordinate; swap so the grading
        // sits on the most eccentric axis.
        omega.swap(pole, n - 1);
        let stretch = axes
            .iter()
            .zip(omega.iter())
            .map(|(&a, &o)| a * o * o)
            .sum::<f64>()
            .sqrt();
        let theta: Vec<f64> = omega
            .iter()
            .zip(axes.iter())
            .map(|(&o, &a)| o / a.sqrt())
            .collect();
        let surface_weight = w * scale * stretch;
        let theta_norm_sq: f64 = theta.iter().map(|t| t * t).sum();
        let mu_weight = surface_weight
            / (theta_norm_sq.powf((n as f64 + 2.0 * s) / 2.0) * e.a_image_norm(&theta));
        nodes.push(SurfaceNode {
            theta,
            surface_weight,
            mu_weight,
        });
    }
    Ok(SurfaceRule {
        nodes,
        resolution,
        s,
    })
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(k, t);
            let dt = -p / d;
            t += dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(k, t);
        let w = 2.0 / ((1.0 - t * t) * d * d);
        nodes[i] = -t;
        nodes[k - 1 - i] = t;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(k: usize, t: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * t * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Geometrically graded panel edges on [0, π/2], refined toward 0 so that the
/// smallest panel resolves a polar feature of angular width ~ 1/ratio.
fn graded_panels(ratio: f64) -> Vec<(f64, f64)> {
    let levels = if ratio > 1.0 {
        (ratio.log2().ceil() as usize).min(30) + 2
    } else {
        2
    };
    let mut edges = Vec::with_capacity(levels + 2);
    edges.push(0.0);
    for j in (0..=levels).rev() {
        edges.push(PI / 2.0 * 0.5f64.powi(j as i32));
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Quadrature rule on the unit sphere S^{n-1}: pairs (ω, w) with
/// Σ w f(ω) ≈ ∫_{S^{n-1}} f dω. The polar angle (measured from the LAST
/// coordinate axis) is graded toward both poles by `grade_ratio`;
/// `resolution` is the approximate node budget per angular dimension.
pub fn unit_sphere_rule(n: usize, resolution: usize, grade_ratio: f64) -> Vec<(Vec<f64>, f64)> {
    assert!(n >= 2);
    let panels = graded_panels(grade_ratio);
    if n == 2 {
        // Quadrant nodes replicated by the four sign symmetries.
        let per_panel = (resolution / (4 * panels.len())).max(6);
        let (gl_nodes, gl_weights) = gauss_legendre(per_panel);
        let mut out = Vec::new();
        for &(lo, hi) in &panels {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (t, w) in gl_nodes.iter().zip(gl_weights.iter()) {
                let phi = mid + half * t;
                let (sin_phi, cos_phi) = phi.sin_cos();
                let weight = w * half;
                for &(s1, s2) in &[(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    out.push((vec![s1 * sin_phi, s2 * cos_phi], weight));
                }
            }
        }
        out
    } else {
        // ω = (sin φ · ω', cos φ) with ω' ∈ S^{n-2}; dω = sin^{n-2}φ dφ dω'.
        let per_panel = (resolution / (2 * panels.len())).max(6);
        let (gl_nodes, gl_weights) = gauss_legendre(per_panel);
        let sub = unit_sphere_rule(n - 1, resolution, 1.0);
        let mut out = Vec::new();
        for &(lo, hi) in &panels {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (t, w) in gl_nodes.iter().zip(gl_weights.iter()) {
                let phi = mid + half * t;
                let (sin_phi, cos_phi) = phi.sin_cos();
                let polar_w = w * half * sin_phi.powi(n as i32 - 2);
                for &mirror in &[1.0, -1.0] {
                    for (omega_sub, w_sub) in &sub {
                        let mut omega = Vec::with_capacity(n);
                        for o in omega_sub {
                            omega.push(sin_phi * o);
                        }
                        omega.push(mirror * cos_phi);
                        out.push((omega, polar_w * w_sub));
                    }
                }
            }
        }
        out
    }
}
