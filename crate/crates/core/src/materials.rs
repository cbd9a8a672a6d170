//! Electromagnetic surface materials.
//!
//! A [`Material`] carries the real relative permittivity, conductivity,
//! scattering coefficient `S`, a scattering lobe model, and the
//! cross-polarization ratio `K_x`. The complex relative permittivity follows
//! the ITU-R P.2040 form `η = ε_r − j·σ/(2πf·ε₀)` under the crate-wide
//! `e^{+jωt}` time convention, so lossy media have negative imaginary parts.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::float::{real, to_f64, Real};
use crate::geometry::Vec3;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("material '{name}': {message}")]
    InvalidParameter { name: String, message: String },
    #[error("frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("invalid material library JSON: {0}")]
    BadLibrary(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Shape of the diffuse scattering lobe around the specular direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LobeModel {
    /// `f_s = cosθ_s / π`; integrates to 1 over the hemisphere.
    Lambertian,
    /// `f_s ∝ ((1 + k̂_r·k̂_s)/2)^α`, normalized per incidence angle.
    Directive { alpha_r: u32 },
}

impl Default for LobeModel {
    fn default() -> Self {
        LobeModel::Lambertian
    }
}

impl LobeModel {
    /// Evaluates the lobe density `f_s(k̂_i, k̂_s, n̂)` (per steradian).
    /// Directions below the surface hemisphere return zero. `k_i` points
    /// into the surface, `k_s` away from it; all unit length.
    pub fn evaluate<T: Real>(&self, k_i: Vec3<T>, k_s: Vec3<T>, normal: Vec3<T>) -> T {
        let cos_s = k_s.dot(normal);
        if cos_s <= T::zero() {
            return T::zero();
        }
        match *self {
            LobeModel::Lambertian => cos_s / T::PI(),
            LobeModel::Directive { alpha_r } => {
                let cos_i = -k_i.dot(normal);
                if cos_i <= T::zero() {
                    return T::zero();
                }
                let specular = k_i - normal * (real::<T>(2.0) * k_i.dot(normal));
                let half = (T::one() + specular.dot(k_s)) * real(0.5);
                let norm = directive_normalization::<T>(alpha_r, cos_i);
                half.max(T::zero()).powi(alpha_r as i32) / norm
            }
        }
    }
}

/// Hemisphere integral of the unnormalized directive lobe
/// `((1+cosψ)/2)^α` with the lobe axis tilted by `acos(cos_i)` from the
/// normal. Closed form via the binomial expansion; odd powers pick up the
/// tilt factor.
fn directive_normalization<T: Real>(alpha: u32, cos_i: T) -> T {
    let sin_sq = (T::one() - cos_i * cos_i).max(T::zero());
    let two_pi = real::<T>(2.0) * T::PI();
    let mut total = T::zero();
    for k in 0..=alpha {
        let coeff = real::<T>(binomial(alpha as u64, k as u64) as f64);
        let base = two_pi / real((k + 1) as f64);
        let i_k = if k % 2 == 0 {
            base
        } else {
            let mut sum = T::zero();
            let mut pow = T::one();
            for w in 0..=(k - 1) / 2 {
                let c = real::<T>(binomial(2 * w as u64, w as u64) as f64);
                sum += c * pow / real(4f64.powi(w as i32));
                pow = pow * sin_sq;
            }
            base * cos_i * sum
        };
        total += coeff * i_k;
    }
    total / real(2f64.powi(alpha as i32))
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut result = 1u64;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

/// Electromagnetic surface description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Material<T> {
    pub name: String,
    /// Real relative permittivity ε_r ≥ 1.
    pub epsilon_r: T,
    /// Conductivity σ ≥ 0, S/m.
    pub sigma: T,
    /// Scattering coefficient S ∈ [0,1]: amplitude fraction redirected
    /// diffusely (S² in power).
    #[serde(default = "zero_default")]
    pub scattering_coefficient: T,
    #[serde(default)]
    pub lobe_model: LobeModel,
    /// Cross-polarization ratio K_x ∈ [0,1] for scattered fields.
    #[serde(default = "half_default")]
    pub xpd_ratio: T,
}

fn zero_default<T: Real>() -> T {
    T::zero()
}

fn half_default<T: Real>() -> T {
    real(0.5)
}

impl<T: Real> Material<T> {
    pub fn new(
        name: impl Into<String>,
        epsilon_r: T,
        sigma: T,
        scattering_coefficient: T,
        lobe_model: LobeModel,
        xpd_ratio: T,
    ) -> Result<Self, MaterialError> {
        let material = Self {
            name: name.into(),
            epsilon_r,
            sigma,
            scattering_coefficient,
            lobe_model,
            xpd_ratio,
        };
        material.validate()?;
        Ok(material)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let fail = |message: String| MaterialError::InvalidParameter {
            name: self.name.clone(),
            message,
        };
        if !(self.epsilon_r >= T::one()) {
            return Err(fail(format!(
                "epsilon_r must be >= 1, got {}",
                self.epsilon_r
            )));
        }
        if !(self.sigma >= T::zero()) {
            return Err(fail(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.scattering_coefficient >= T::zero() && self.scattering_coefficient <= T::one()) {
            return Err(fail(format!(
                "scattering_coefficient must lie in [0,1], got {}",
                self.scattering_coefficient
            )));
        }
        if !(self.xpd_ratio >= T::zero() && self.xpd_ratio <= T::one()) {
            return Err(fail(format!(
                "xpd_ratio must lie in [0,1], got {}",
                self.xpd_ratio
            )));
        }
        if let LobeModel::Directive { alpha_r } = self.lobe_model {
            if alpha_r == 0 || alpha_r > 32 {
                return Err(fail(format!(
                    "directive lobe exponent must lie in [1,32], got {alpha_r}"
                )));
            }
        }
        Ok(())
    }

    /// Complex relative permittivity `η = ε_r − j·σ/(2πf·ε₀)`.
    /// Vacuum (ε_r = 1, σ = 0) returns exactly 1 at any frequency.
    pub fn complex_permittivity(&self, frequency: T) -> Result<Complex<T>, MaterialError> {
        if !(frequency > T::zero()) {
            return Err(MaterialError::NonPositiveFrequency(to_f64(frequency)));
        }
        let loss =
            self.sigma / (real::<T>(2.0) * T::PI() * frequency * T::vacuum_permittivity());
        Ok(Complex::new(self.epsilon_r, -loss))
    }

    /// Specular attenuation factor `R = √(1 − S²)`.
    pub fn specular_attenuation(&self) -> T {
        let s = self.scattering_coefficient;
        (T::one() - s * s).max(T::zero()).sqrt()
    }
}

/// Loads a material table from JSON: an array of material objects.
pub fn library_from_json<T: Real + serde::de::DeserializeOwned>(
    text: &str,
) -> Result<Vec<Material<T>>, MaterialError> {
    let materials: Vec<Material<T>> = serde_json::from_str(text)?;
    for material in &materials {
        material.validate()?;
    }
    Ok(materials)
}

pub fn library_from_file<T: Real + serde::de::DeserializeOwned>(
    path: &std::path::Path,
) -> Result<Vec<Material<T>>, MaterialError> {
    library_from_json(&std::fs::read_to_string(path)?)
}

/// Built-in illustrative table (values are plausible defaults, not
/// measurements): concrete, glass, and a metal-like high-conductivity
/// surface, plus a perfectly smooth mirror variant for tests.
pub fn builtin_library<T: Real + serde::de::DeserializeOwned>() -> Vec<Material<T>> {
    library_from_json(BUILTIN_LIBRARY_JSON).expect("builtin material table is valid")
}

pub const BUILTIN_LIBRARY_JSON: &str = r#"[
  {
    "name": "concrete",
    "epsilon_r": 5.24,
    "sigma": 0.0462,
    "scattering_coefficient": 0.3,
    "lobe_model": "lambertian",
    "xpd_ratio": 0.5
  },
  {
    "name": "glass",
    "epsilon_r": 6.27,
    "sigma": 0.0043,
    "scattering_coefficient": 0.1,
    "lobe_model": "lambertian",
    "xpd_ratio": 0.5
  },
  {
    "name": "metal",
    "epsilon_r": 1.0,
    "sigma": 1.0e7,
    "scattering_coefficient": 0.05,
    "lobe_model": { "directive": { "alpha_r": 4 } },
    "xpd_ratio": 0.3
  },
  {
    "name": "smooth-metal",
    "epsilon_r": 1.0,
    "sigma": 1.0e7,
    "scattering_coefficient": 0.0,
    "lobe_model": "lambertian",
    "xpd_ratio": 0.5
  }
]"#;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plain(epsilon_r: f64, sigma: f64, s: f64) -> Material<f64> {
        Material::new("test", epsilon_r, sigma, s, LobeModel::Lambertian, 0.5).unwrap()
    }

    #[test]
    fn vacuum_permittivity_is_exactly_one() {
        let vacuum = plain(1.0, 0.0, 0.0);
        let eta = vacuum.complex_permittivity(3.5e9).unwrap();
        assert_eq!(eta, Complex::new(1.0, 0.0));
    }

    #[test]
    fn lossless_dielectric_is_real() {
        let mat = plain(4.0, 0.0, 0.0);
        let eta = mat.complex_permittivity(1.0e9).unwrap();
        assert_eq!(eta, Complex::new(4.0, 0.0));
    }

    #[test]
    fn itu_form_loss_term() {
        // Independent evaluation of σ/(2πfε₀) with ε₀ = 8.8541878128e-12.
        let mat = plain(5.24, 0.1, 0.0);
        let f = 3.5e9;
        let expected_loss = 0.1 / (2.0 * std::f64::consts::PI * f * 8.8541878128e-12);
        let eta = mat.complex_permittivity(f).unwrap();
        assert_relative_eq!(eta.re, 5.24);
        assert_relative_eq!(eta.im, -expected_loss, max_relative = 1e-12);
        // Magnitude matches the value quoted to four figures.
        assert_relative_eq!(-eta.im, 0.5136, max_relative = 1e-3);
    }

    #[test]
    fn non_positive_frequency_rejected() {
        let mat = plain(2.0, 0.1, 0.0);
        assert!(mat.complex_permittivity(0.0).is_err());
        assert!(mat.complex_permittivity(-1.0).is_err());
    }

    #[test]
    fn specular_attenuation_endpoints() {
        assert_eq!(plain(2.0, 0.0, 0.0).specular_attenuation(), 1.0);
        assert_eq!(plain(2.0, 0.0, 1.0).specular_attenuation(), 0.0);
        assert_relative_eq!(plain(2.0, 0.0, 0.6).specular_attenuation(), 0.8);
    }

    #[test]
    fn energy_split_identity_on_grid() {
        // S² + R² = 1 across S ∈ [0,1] at 1e-3 steps.
        for i in 0..=1000 {
            let s = i as f64 * 1e-3;
            let r = plain(2.0, 0.0, s).specular_attenuation();
            assert!((s * s + r * r - 1.0).abs() < 1e-12, "S={s}");
        }
    }

    #[test]
    fn permittivity_monotone_in_sigma_and_frequency() {
        let f = 2.0e9;
        let mut previous = 0.0;
        for i in 1..=20 {
            let sigma = i as f64 * 0.05;
            let eta = plain(3.0, sigma, 0.0).complex_permittivity(f).unwrap();
            assert!(-eta.im > previous);
            previous = -eta.im;
        }
        let mat = plain(3.0, 0.2, 0.0);
        let mut previous = f64::INFINITY;
        for i in 1..=20 {
            let freq = i as f64 * 1.0e9;
            let eta = mat.complex_permittivity(freq).unwrap();
            assert!(-eta.im < previous);
            previous = -eta.im;
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(Material::new("bad", 0.5, 0.0, 0.0, LobeModel::Lambertian, 0.5).is_err());
        assert!(Material::new("bad", 2.0, -1.0, 0.0, LobeModel::Lambertian, 0.5).is_err());
        assert!(Material::new("bad", 2.0, 0.0, 1.5, LobeModel::Lambertian, 0.5).is_err());
        assert!(Material::new("bad", 2.0, 0.0, 0.5, LobeModel::Lambertian, -0.1).is_err());
        assert!(Material::new("bad", 2.0, 0.0, 0.5, LobeModel::Directive { alpha_r: 0 }, 0.5)
            .is_err());
    }

    #[test]
    fn builtin_library_loads_and_validates() {
        let library = builtin_library::<f64>();
        assert!(library.iter().any(|m| m.name == "concrete"));
        assert!(library.iter().any(|m| m.name == "glass"));
        assert!(library.iter().any(|m| m.name == "metal"));
    }

    #[test]
    fn library_rejects_unknown_fields() {
        let text = r#"[{"name":"x","epsilon_r":2.0,"sigma":0.0,"hardness":3}]"#;
        assert!(library_from_json::<f64>(text).is_err());
    }

    /// Monte-Carlo hemisphere quadrature of the lobe density. Uniform
    /// directions over the hemisphere have density 1/(2π), so the integral
    /// estimate is `mean(f_s) · 2π`.
    fn hemisphere_integral(lobe: LobeModel, cos_i: f64, samples: usize, seed: u64) -> f64 {
        let normal = Vec3::new(0.0, 0.0, 1.0);
        let sin_i = (1.0 - cos_i * cos_i).sqrt();
        let k_i = Vec3::new(sin_i, 0.0, -cos_i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = 0.0;
        for _ in 0..samples {
            let z: f64 = rng.gen_range(0.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            let k_s = Vec3::new(s * phi.cos(), s * phi.sin(), z);
            sum += lobe.evaluate(k_i, k_s, normal);
        }
        sum / samples as f64 * 2.0 * std::f64::consts::PI
    }

    #[test]
    fn lambertian_lobe_integrates_to_one() {
        let integral = hemisphere_integral(LobeModel::Lambertian, 0.7, 1_000_000, 7);
        assert!(
            (integral - 1.0).abs() < 1e-3,
            "Lambertian hemisphere integral = {integral}"
        );
    }

    #[test]
    fn directive_lobe_integrates_to_one() {
        for &(alpha_r, cos_i) in &[(1u32, 0.9), (4, 0.6), (8, 0.3)] {
            let lobe = LobeModel::Directive { alpha_r };
            let integral = hemisphere_integral(lobe, cos_i, 400_000, 11 + alpha_r as u64);
            assert!(
                (integral - 1.0).abs() < 5e-3,
                "directive α={alpha_r} cosθ={cos_i}: integral = {integral}"
            );
        }
    }
}
