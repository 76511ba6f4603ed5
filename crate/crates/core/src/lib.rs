//! Exact solutions of the planar Beltrami equation `rot B + α B = 0` for a
//! proportionality factor that depends on `y` only.
//!
//! The construction runs through a chain of reductions:
//!
//! 1. the third component `B3` solves `div(α⁻¹ ∇B3) + α B3 = 0`;
//! 2. a particular positive solution `√α f0` of that equation is explicit,
//!    with `f0 = (c1 sin 𝒜 + c2 cos 𝒜)/√α` and `𝒜' = α`;
//! 3. `f0` generates the Vekua equation `W_z̄ = (f0_z̄/f0) W̄`, whose formal
//!    powers `*Z(n)(a, z0; z)` are built from the recursive integrals
//!    `Y(n)` and `Ỹ(n)`;
//! 4. `√α f0 Re *Z(n)(a, z0; z)` is a complete system for `B3`, and the
//!    remaining components follow from `B1 = -∂y B3/α`, `B2 = ∂x B3/α`.
//!
//! Every step is checked by residual operators ([`vekua`], [`beltrami`]).
//!
//! ```
//! use beltrami::profile::{AlphaProfile, GeneratingFunction};
//! use beltrami::quadrature::Interval;
//! use beltrami::beltrami::{BeltramiBasis, VectorField};
//! use num_complex::Complex64;
//!
//! let alpha = AlphaProfile::example(Interval::new(-0.95, 0.95).unwrap()).unwrap();
//! let g = GeneratingFunction::new(alpha, 0.0, 1.0, 0.0).unwrap();
//! let basis = BeltramiBasis::build(g, Complex64::new(0.0, 0.0), 3).unwrap();
//! // B2 = ((1 - y²)^½, 0, -y)
//! let b = basis.elements()[2].field().components(0.3, 0.5);
//! assert!((b[2] + 0.5).abs() < 1e-10);
//! ```

pub mod beltrami;
pub mod bvp;
pub mod cli;
pub mod error;
pub mod field;
pub mod formal_powers;
pub mod profile;
pub mod quadrature;
pub mod spline;
pub mod vekua;

pub use error::{Error, Result};
pub use num_complex::Complex64;
