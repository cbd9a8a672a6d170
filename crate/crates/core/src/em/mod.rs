//! Polarized field transforms at planar interfaces.
//!
//! Everything here is a pure function on 2-component complex field phasors.
//! A phasor carries its own orthonormal polarization basis and propagation
//! direction; interface operations re-express the field in the
//! interface-aligned (⊥, ∥) basis, apply diagonal Fresnel action, and hand
//! back the field in the outgoing basis.
//!
//! Conventions (fixed crate-wide):
//!
//! * Time dependence `e^{+jωt}`; propagation accrues `e^{-j2πd/λ}` and lossy
//!   media have negative imaginary permittivity.
//! * The perpendicular basis vector is `ê_⊥ = (k̂_i × n̂)/‖k̂_i × n̂‖` and
//!   `ê_∥ = ê_⊥ × k̂_i`; reflected and transmitted bases reuse `ê_⊥` with
//!   `ê_∥ = (ê_⊥ × k̂)/‖·‖` for their own propagation directions.
//! * Fresnel signs: a perfect conductor gives `r_⊥ = -1`, `r_∥ = +1`.
//! * At normal incidence (`‖k̂_i × n̂‖ < 1e-9`) the perpendicular vector is
//!   derived deterministically from the smallest-magnitude axis of `k̂_i`;
//!   `r_⊥ = r_∥` there, so the choice cannot affect the physical field.

mod mat2;

pub use mat2::Mat2;

use num_complex::Complex;
use thiserror::Error;

use crate::float::{real, to_f64, Real};
use crate::geometry::Vec3;
use crate::materials::Material;

#[derive(Debug, Error)]
pub enum EmError {
    #[error("polarization bases have different propagation directions")]
    BasisDirectionMismatch,
    #[error("incidence cosine must lie in (0, 1], got {0}")]
    InvalidIncidenceCosine(f64),
    #[error("propagation distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("scattering patch area must be positive, got {0} m^2")]
    NonPositiveArea(f64),
    #[error("scattering observation point coincides with the surface point")]
    DegenerateScatterGeometry,
}

/// Orthonormal transverse polarization basis attached to a propagation
/// direction. `e1 × e2` is parallel or anti-parallel to `dir`; both span the
/// plane orthogonal to `dir`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolBasis<T> {
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
    pub dir: Vec3<T>,
}

impl<T: Real> PolBasis<T> {
    pub fn new(e1: Vec3<T>, e2: Vec3<T>, dir: Vec3<T>) -> Self {
        let basis = Self { e1, e2, dir };
        debug_assert!(basis.is_orthonormal(real(1e-9)), "basis not orthonormal");
        basis
    }

    pub fn is_orthonormal(&self, tol: T) -> bool {
        self.e1.is_unit(tol)
            && self.e2.is_unit(tol)
            && self.dir.is_unit(tol)
            && self.e1.dot(self.e2).abs() <= tol
            && self.e1.dot(self.dir).abs() <= tol
            && self.e2.dot(self.dir).abs() <= tol
    }

    /// Global spherical angular basis `(θ̂, φ̂)` for a propagation direction.
    /// At the poles (`|sinθ| < 1e-12`) the azimuth is pinned to zero.
    pub fn spherical(dir: Vec3<T>) -> Self {
        let sin_theta = (dir.x * dir.x + dir.y * dir.y).sqrt();
        let cos_theta = dir.z;
        if sin_theta < real(1e-12) {
            let sign = if cos_theta >= T::zero() {
                T::one()
            } else {
                -T::one()
            };
            return Self {
                e1: Vec3::new(sign, T::zero(), T::zero()),
                e2: Vec3::new(T::zero(), T::one(), T::zero()),
                dir,
            };
        }
        let cos_phi = dir.x / sin_theta;
        let sin_phi = dir.y / sin_theta;
        Self {
            e1: Vec3::new(cos_theta * cos_phi, cos_theta * sin_phi, -sin_theta),
            e2: Vec3::new(-sin_phi, cos_phi, T::zero()),
            dir,
        }
    }
}

/// Two-component complex field phasor in an explicit transverse basis, V/m.
#[derive(Clone, Copy, Debug)]
pub struct FieldPhasor2<T> {
    pub components: [Complex<T>; 2],
    pub basis: PolBasis<T>,
}

impl<T: Real> FieldPhasor2<T> {
    pub fn new(components: [Complex<T>; 2], basis: PolBasis<T>) -> Self {
        Self { components, basis }
    }

    pub fn norm(&self) -> T {
        (self.components[0].norm_sqr() + self.components[1].norm_sqr()).sqrt()
    }

    pub fn power(&self) -> T {
        self.components[0].norm_sqr() + self.components[1].norm_sqr()
    }

    /// Physical field vector `E = c₁ê₁ + c₂ê₂` (real and imaginary parts).
    pub fn field_vectors(&self) -> (Vec3<T>, Vec3<T>) {
        let re = self.basis.e1 * self.components[0].re + self.basis.e2 * self.components[1].re;
        let im = self.basis.e1 * self.components[0].im + self.basis.e2 * self.components[1].im;
        (re, im)
    }
}

/// Fresnel amplitude coefficients at a planar interface, plus the cached
/// quantities needed to continue the transmitted ray.
#[derive(Clone, Copy, Debug)]
pub struct FresnelCoefficients<T> {
    pub r_perp: Complex<T>,
    pub r_par: Complex<T>,
    pub t_perp: Complex<T>,
    pub t_par: Complex<T>,
    /// Incidence cosine the coefficients were evaluated at.
    pub cos_theta_i: T,
    /// Refractive indices √η₁, √η₂ (principal branch).
    pub n1: Complex<T>,
    pub n2: Complex<T>,
    /// `n₂·cosθ_t` on the attenuating branch.
    pub n2_cos_theta_t: Complex<T>,
    /// True when no propagating transmitted wave exists (total internal
    /// reflection).
    pub evanescent: bool,
}

/// Interface-aligned polarization basis for an incident direction.
///
/// Returns `(ê_⊥, ê_∥)`. Away from normal incidence these are
/// `(k̂_i × n̂)/‖·‖` and `ê_⊥ × k̂_i`; at normal incidence the deterministic
/// fallback convention applies.
pub fn incidence_basis<T: Real>(k_i: Vec3<T>, normal: Vec3<T>) -> (Vec3<T>, Vec3<T>) {
    let cross = k_i.cross(normal);
    let e_perp = match cross.try_normalized() {
        Some(v) if cross.norm() >= real(1e-9) => v,
        _ => normal_incidence_perp(k_i),
    };
    let e_par = e_perp.cross(k_i);
    (e_perp, e_par)
}

/// Deterministic perpendicular vector for (near-)normal incidence: cross
/// the propagation direction with the coordinate axis of smallest magnitude.
pub fn normal_incidence_perp<T: Real>(k_i: Vec3<T>) -> Vec3<T> {
    let axis = match k_i.min_component_axis() {
        0 => Vec3::new(T::one(), T::zero(), T::zero()),
        1 => Vec3::new(T::zero(), T::one(), T::zero()),
        _ => Vec3::new(T::zero(), T::zero(), T::one()),
    };
    k_i.cross(axis).normalized()
}

/// Mirror direction across a surface with unit normal `n̂`.
pub fn reflect_direction<T: Real>(k_i: Vec3<T>, normal: Vec3<T>) -> Vec3<T> {
    k_i - normal * (real::<T>(2.0) * k_i.dot(normal))
}

/// Change-of-basis matrix `W` between two transverse bases sharing a
/// propagation direction: `W[a][b] = to_a · from_b`. Orthogonal whenever both
/// bases are orthonormal.
pub fn basis_change<T: Real>(
    from: &PolBasis<T>,
    to: &PolBasis<T>,
) -> Result<[[T; 2]; 2], EmError> {
    if from.dir.dot(to.dir) < T::one() - real(1e-9) {
        return Err(EmError::BasisDirectionMismatch);
    }
    Ok([
        [to.e1.dot(from.e1), to.e1.dot(from.e2)],
        [to.e2.dot(from.e1), to.e2.dot(from.e2)],
    ])
}

fn apply_w<T: Real>(w: &[[T; 2]; 2], c: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [
        c[0] * w[0][0] + c[1] * w[0][1],
        c[0] * w[1][0] + c[1] * w[1][1],
    ]
}

/// Fresnel coefficients for a planar interface between media with complex
/// relative permittivities `η₁` (incident side) and `η₂`.
///
/// The transmitted cosine uses the square-root branch with non-positive
/// imaginary part, so transmitted waves attenuate under the `e^{+jωt}`
/// convention. `η₁ = η₂` returns `r = 0`, `t = 1` exactly. Total internal
/// reflection is flagged, not an error.
pub fn fresnel<T: Real>(
    eta1: Complex<T>,
    eta2: Complex<T>,
    cos_theta_i: T,
) -> Result<FresnelCoefficients<T>, EmError> {
    if !(cos_theta_i > T::zero() && cos_theta_i <= T::one()) {
        return Err(EmError::InvalidIncidenceCosine(to_f64(cos_theta_i)));
    }
    let one = Complex::new(T::one(), T::zero());
    let n1 = eta1.sqrt();
    let n2 = eta2.sqrt();
    if eta1 == eta2 {
        return Ok(FresnelCoefficients {
            r_perp: Complex::new(T::zero(), T::zero()),
            r_par: Complex::new(T::zero(), T::zero()),
            t_perp: one,
            t_par: one,
            cos_theta_i,
            n1,
            n2,
            n2_cos_theta_t: n1 * cos_theta_i,
            evanescent: false,
        });
    }

    let sin_sq = (T::one() - cos_theta_i * cos_theta_i).max(T::zero());
    // n₂cosθ_t = √(η₂ − η₁ sin²θ_i); flip to the attenuating branch if the
    // principal square root lands on the growing one.
    let mut n2_cos_t = (eta2 - eta1 * sin_sq).sqrt();
    if n2_cos_t.im > T::zero() {
        n2_cos_t = -n2_cos_t;
    }
    let evanescent = n2_cos_t.re.abs() < real(1e-12);

    let n1_cos_i = n1 * cos_theta_i;
    let n2_cos_i = n2 * cos_theta_i;
    let n1_cos_t = n1 * (n2_cos_t / n2);

    let r_perp = (n1_cos_i - n2_cos_t) / (n1_cos_i + n2_cos_t);
    let r_par = (n2_cos_i - n1_cos_t) / (n2_cos_i + n1_cos_t);
    let t_perp = (n1_cos_i * real::<T>(2.0)) / (n1_cos_i + n2_cos_t);
    let t_par = (n1_cos_i * real::<T>(2.0)) / (n2_cos_i + n1_cos_t);

    Ok(FresnelCoefficients {
        r_perp,
        r_par,
        t_perp,
        t_par,
        cos_theta_i,
        n1,
        n2,
        n2_cos_theta_t: n2_cos_t,
        evanescent,
    })
}

/// Orients `normal` against the propagation direction (incident side).
fn oriented_normal<T: Real>(k_i: Vec3<T>, normal: Vec3<T>) -> Vec3<T> {
    if k_i.dot(normal) > T::zero() {
        -normal
    } else {
        normal
    }
}

/// Specular reflection of a polarized field.
///
/// The output components are `R·diag(r_⊥, r_∥)·W·c` in the reflected basis,
/// where `W` rotates the incident components into the interface basis and
/// `R` is the specular attenuation factor `√(1-S²)` of the surface.
pub fn apply_reflection<T: Real>(
    incident: &FieldPhasor2<T>,
    normal: Vec3<T>,
    fresnel: &FresnelCoefficients<T>,
    r_factor: T,
) -> FieldPhasor2<T> {
    let k_i = incident.basis.dir;
    let n = oriented_normal(k_i, normal);
    let (e_perp, e_par_i) = incidence_basis(k_i, n);
    let interface = PolBasis::new(e_perp, e_par_i, k_i);
    let w = basis_change(&incident.basis, &interface).expect("same direction");
    let c = apply_w(&w, incident.components);
    let k_r = reflect_direction(k_i, n);
    let e_par_r = e_perp.cross(k_r).normalized();
    FieldPhasor2::new(
        [
            c[0] * fresnel.r_perp * r_factor,
            c[1] * fresnel.r_par * r_factor,
        ],
        PolBasis::new(e_perp, e_par_r, k_r),
    )
}

/// Refraction of a polarized field into the second medium.
///
/// Returns `None` under total internal reflection (the transmitted
/// contribution carries no power). The refracted direction follows Snell's
/// law using the real parts of the refractive indices.
pub fn apply_transmission<T: Real>(
    incident: &FieldPhasor2<T>,
    normal: Vec3<T>,
    fresnel: &FresnelCoefficients<T>,
) -> Option<FieldPhasor2<T>> {
    if fresnel.evanescent {
        return None;
    }
    let k_i = incident.basis.dir;
    let n = oriented_normal(k_i, normal);
    let (e_perp, e_par_i) = incidence_basis(k_i, n);
    let interface = PolBasis::new(e_perp, e_par_i, k_i);
    let w = basis_change(&incident.basis, &interface).expect("same direction");
    let c = apply_w(&w, incident.components);

    let ratio = fresnel.n1.re / fresnel.n2.re;
    let cos_i = fresnel.cos_theta_i;
    let sin_t_sq = ratio * ratio * (T::one() - cos_i * cos_i);
    if sin_t_sq >= T::one() {
        return None;
    }
    let cos_t = (T::one() - sin_t_sq).sqrt();
    let k_t = (k_i * ratio + n * (ratio * cos_i - cos_t)).normalized();
    let e_par_t = e_perp.cross(k_t).normalized();
    Some(FieldPhasor2::new(
        [c[0] * fresnel.t_perp, c[1] * fresnel.t_par],
        PolBasis::new(e_perp, e_par_t, k_t),
    ))
}

/// Diffuse scattering from a surface patch of area `dA` at `q` toward an
/// observation point `r`.
///
/// The scattered components live in the spherical angular basis of the
/// scattered direction and have magnitude
/// `(S·Γ/‖r−q‖)·√(f_s·cosθ_i·dA)·‖E_i‖`, split `(√(1-K_x)·e^{jχ₁},
/// √(K_x)·e^{jχ₂})` across the two components. `Γ` is the reflected-amplitude
/// ratio `√(|r_⊥E_⊥|² + |r_∥E_∥|²)/‖E_i‖`. Directions below the surface
/// hemisphere yield a zero field.
#[allow(clippy::too_many_arguments)]
pub fn apply_scattering<T: Real>(
    incident: &FieldPhasor2<T>,
    q: Vec3<T>,
    r: Vec3<T>,
    normal: Vec3<T>,
    material: &Material<T>,
    patch_area: T,
    fresnel: &FresnelCoefficients<T>,
    random_phases: (T, T),
) -> Result<FieldPhasor2<T>, EmError> {
    if !(patch_area > T::zero()) {
        return Err(EmError::NonPositiveArea(to_f64(patch_area)));
    }
    let separation = r - q;
    let distance = separation.norm();
    if distance < crate::geometry::ray_epsilon() {
        return Err(EmError::DegenerateScatterGeometry);
    }
    let k_s = separation / distance;
    let k_i = incident.basis.dir;
    let n = oriented_normal(k_i, normal);
    let out_basis = PolBasis::spherical(k_s);

    let cos_i = -k_i.dot(n);
    let zero = FieldPhasor2::new(
        [Complex::new(T::zero(), T::zero()); 2],
        out_basis,
    );
    if k_s.dot(n) <= T::zero() || cos_i <= T::zero() {
        return Ok(zero);
    }

    let norm = incident.norm();
    if norm == T::zero() {
        return Ok(zero);
    }

    // Reflected-amplitude ratio Γ for this incident polarization state.
    let (e_perp, e_par) = incidence_basis(k_i, n);
    let interface = PolBasis::new(e_perp, e_par, k_i);
    let w = basis_change(&incident.basis, &interface).expect("same direction");
    let c = apply_w(&w, incident.components);
    let reflected_sq =
        (c[0] * fresnel.r_perp).norm_sqr() + (c[1] * fresnel.r_par).norm_sqr();
    let gamma = reflected_sq.sqrt() / norm;

    let lobe = material.lobe_model.evaluate(k_i, k_s, n);
    let s = material.scattering_coefficient;
    let amplitude = s * gamma / distance * (lobe * cos_i * patch_area).sqrt() * norm;

    let k_x = material.xpd_ratio;
    let (chi1, chi2) = random_phases;
    let co = Complex::from_polar((T::one() - k_x).sqrt(), chi1) * amplitude;
    let cross = Complex::from_polar(k_x.sqrt(), chi2) * amplitude;
    Ok(FieldPhasor2::new([co, cross], out_basis))
}

/// Free-space spreading and phase accrual over `distance` meters, referenced
/// to the 1 m emission convention: amplitude `λ/(4πd)`, phase `e^{-j2πd/λ}`.
pub fn free_space_propagate<T: Real>(
    phasor: &FieldPhasor2<T>,
    distance: T,
    frequency: T,
) -> Result<FieldPhasor2<T>, EmError> {
    let gain = free_space_gain(distance, frequency)?;
    Ok(FieldPhasor2::new(
        [phasor.components[0] * gain, phasor.components[1] * gain],
        phasor.basis,
    ))
}

/// Scalar free-space link gain `λ/(4πd)·e^{-j2πd/λ}`.
pub fn free_space_gain<T: Real>(distance: T, frequency: T) -> Result<Complex<T>, EmError> {
    if !(distance > T::zero()) {
        return Err(EmError::NonPositiveDistance(to_f64(distance)));
    }
    if !(frequency > T::zero()) {
        return Err(EmError::NonPositiveFrequency(to_f64(frequency)));
    }
    let wavelength = T::speed_of_light() / frequency;
    let amplitude = wavelength / (real::<T>(4.0) * T::PI() * distance);
    Ok(Complex::from_polar(
        amplitude,
        -real::<T>(2.0) * T::PI() * distance / wavelength,
    ))
}

/// Pure phase accrual `e^{-j2πd/λ}` (no spreading), for path segments whose
/// spreading is accounted elsewhere.
pub fn propagation_phase<T: Real>(distance: T, frequency: T) -> Result<Complex<T>, EmError> {
    if !(distance > T::zero()) {
        return Err(EmError::NonPositiveDistance(to_f64(distance)));
    }
    if !(frequency > T::zero()) {
        return Err(EmError::NonPositiveFrequency(to_f64(frequency)));
    }
    let wavelength = T::speed_of_light() / frequency;
    Ok(Complex::from_polar(
        T::one(),
        -real::<T>(2.0) * T::PI() * distance / wavelength,
    ))
}

/// Running polarization transfer along a path: a 2×2 complex matrix plus the
/// bases it maps between. Composition is associative; the identity transfer
/// has matrix I.
#[derive(Clone, Copy, Debug)]
pub struct PolarizationTransfer<T> {
    pub matrix: Mat2<T>,
    pub in_basis: PolBasis<T>,
    pub out_basis: PolBasis<T>,
}

impl<T: Real> PolarizationTransfer<T> {
    pub fn identity(basis: PolBasis<T>) -> Self {
        Self {
            matrix: Mat2::identity(),
            in_basis: basis,
            out_basis: basis,
        }
    }

    /// Rotates the output side into another basis with the same propagation
    /// direction.
    pub fn rotate_to(&mut self, basis: PolBasis<T>) -> Result<(), EmError> {
        let w = basis_change(&self.out_basis, &basis)?;
        self.matrix = Mat2::from_real(&w).mul(&self.matrix);
        self.out_basis = basis;
        Ok(())
    }

    /// Applies an interaction matrix that maps the current output basis to
    /// `new_basis`.
    pub fn push(&mut self, interaction: Mat2<T>, new_basis: PolBasis<T>) {
        self.matrix = interaction.mul(&self.matrix);
        self.out_basis = new_basis;
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        self.matrix = self.matrix.scale(factor);
    }

    pub fn apply(&self, components: [Complex<T>; 2]) -> [Complex<T>; 2] {
        self.matrix.mul_vec(components)
    }
}

#[cfg(test)]
mod tests;
