//! Evaluation of (possibly higher-order) fractional Laplacians `(-Δ)^s` of
//! polynomial-weighted profiles supported on ellipsoids, together with the
//! machinery built on top of those closed forms:
//!
//! - [`specfun`]: Gamma/Beta/Pochhammer/₂F₁ and the hypersingular constants;
//! - [`geometry`]: ellipsoids, the a-inner-product, and weighted surface
//!   quadrature rules;
//! - [`moments`]: the surface moment integrals J₀, J_i^{(k)} and mixed
//!   moments, in closed form and by quadrature, with their a → ∞ limits;
//! - [`laplacian`]: profile definitions and closed-form / semi-explicit
//!   evaluation of `(-Δ)^s` applied to them;
//! - [`oracle`]: an independent hypersingular-integral evaluator used as
//!   ground truth for every closed form;
//! - [`counterexample`]: discriminant scans, thresholds, and certified
//!   failures of the positivity preserving property on eccentric ellipsoids;
//! - [`inversion`]: point inversion transformations and the image domains
//!   they generate;
//! - [`cli`] and [`output`]: the command-line front end with CSV/JSON/SVG
//!   emitters.

pub mod cli;
pub mod counterexample;
pub mod geometry;
pub mod inversion;
pub mod laplacian;
pub mod moments;
pub mod oracle;
pub mod output;
pub mod specfun;

