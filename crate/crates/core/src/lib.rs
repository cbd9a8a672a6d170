//! Deterministic ray-traced radio channel simulator.
//!
//! The crate covers the full pipeline from scene geometry to dataset files:
//!
//! * [`geometry`] — triangle-mesh scenes with a BVH for ray and visibility
//!   queries.
//! * [`materials`] — electromagnetic surface descriptions (complex
//!   permittivity, scattering coefficient, lobe models).
//! * [`em`] — polarized field transforms at interfaces: Fresnel reflection
//!   and transmission, diffuse scattering, free-space propagation.
//! * [`path`] — multipath enumeration between a transmitter and a receiver
//!   (line of sight, image-method specular reflections, through-surface
//!   transmission, single-bounce diffuse scattering).
//! * [`channel`] — MIMO-OFDM channel state information synthesized from the
//!   path list for configurable antenna arrays.
//! * [`adp`] — angle-delay profiles, profile similarity, and a
//!   nearest-neighbor fingerprint localization baseline.
//! * [`dataset`] — seeded trajectory generation and a binary on-disk dataset
//!   layout with manifest and checksums.
//! * [`config`] — run configuration with strict parsing and the
//!   `great-msd-default` preset.
//! * [`validate`] — self-contained analytic oracle suite used by the CLI
//!   `validate` command.
//!
//! All numeric kernels are generic over the scalar type through
//! [`float::Real`] (`f32` or `f64`). The shipped pipeline and the aliases
//! below use `f64`; every field quantity is computed in double precision.
//!
//! Conventions fixed once here and used everywhere:
//!
//! * Time convention `e^{+jωt}`: lossy media have negative imaginary
//!   permittivity and propagation accrues phase `e^{-j2πd/λ}`.
//! * Fresnel signs: a perfect conductor gives `r_⊥ = -1`, `r_∥ = +1` in the
//!   reflected basis.
//! * Free-space amplitude is `λ/(4πd)` for a complete link (isotropic
//!   elements), with distances in meters and `c = 299792458 m/s`.

pub mod adp;
pub mod channel;
pub mod config;
pub mod dataset;
pub mod em;
pub mod float;
pub mod geometry;
pub mod materials;
pub mod path;
pub mod validate;

pub use float::Real;

/// Scalar type used by the shipped pipeline.
pub type Scalar = f64;

/// Double-precision position / direction vector.
pub type Vec3 = geometry::Vec3<Scalar>;
/// Double-precision triangle-mesh scene.
pub type Scene = geometry::Scene<Scalar>;
/// Double-precision surface material.
pub type Material = materials::Material<Scalar>;
/// Double-precision propagation path.
pub type PropagationPath = path::PropagationPath<Scalar>;
/// Double-precision path-solver configuration.
pub type PathConfig = path::PathConfig<Scalar>;
/// Double-precision antenna array description.
pub type AntennaArray = channel::AntennaArray<Scalar>;
/// Double-precision OFDM numerology.
pub type OfdmGrid = channel::OfdmGrid<Scalar>;
/// Double-precision CSI frame.
pub type CsiFrame = channel::CsiFrame<Scalar>;
/// Double-precision angle-delay profile.
pub type AngleDelayProfile = adp::AngleDelayProfile<Scalar>;
/// Double-precision fingerprint database.
pub type FingerprintDb = adp::FingerprintDb<Scalar>;
/// Double-precision trajectory configuration.
pub type TrajectoryConfig = dataset::TrajectoryConfig<Scalar>;
/// Double-precision trajectory dataset reader.
pub type TrajectoryDataset = dataset::TrajectoryDataset<Scalar>;
