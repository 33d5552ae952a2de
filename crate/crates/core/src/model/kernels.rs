//! Doppler-averaged coupling κ̄(δ) and phase ρ̄(δ).
//!
//! Both integrands are rational in ω_D with simple poles off the real axis, so
//! the Gaussian average reduces to the plasma dispersion function:
//! ⟨1/(ω_D − z)⟩ = (i√π/Γ_D) w(z/Γ_D) for Im z > 0, and its conjugate mirror below.

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

use super::SourceParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// ⟨1/(ω_D − z)⟩ over the normalized Gaussian of width `gamma_d`.
pub fn resolvent_average(z: Complex64, gamma_d: f64) -> Complex64 {
    let root_pi = std::f64::consts::PI.sqrt();
    if z.im >= 0.0 {
        I * root_pi * (z / gamma_d).w() / gamma_d
    } else {
        -I * root_pi * (z.conj() / gamma_d).w().conj() / gamma_d
    }
}

/// κ̄(δ) with δ in units of Γ; returns a value in units of Γ.
pub fn kappa_bar(delta: f64, params: &SourceParams) -> Complex64 {
    let gd = params.gamma_doppler;
    let a = Complex64::new(params.delta_p_gamma(), 0.5);
    let s = Complex64::new(delta, params.gamma_dec);
    let pre = params.alpha / 4.0 * params.omega_p * params.omega_c;
    if s.norm() == 0.0 {
        // Ω_c² − 4s(...) → Ω_c²
        return -pre / (params.omega_c * params.omega_c) * resolvent_average(a, gd);
    }
    let b = params.omega_c * params.omega_c / (4.0 * s) - delta - 0.5 * I;
    pre * (resolvent_average(a, gd) - resolvent_average(b, gd)) / (4.0 * s * (a - b))
}

/// ρ̄(δ) with δ in units of Γ; dimensionless.
pub fn rho_bar(delta: f64, params: &SourceParams) -> Complex64 {
    let s = Complex64::new(delta, params.gamma_dec);
    if s.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let b = params.omega_c * params.omega_c / (4.0 * s) - delta - 0.5 * I;
    -params.alpha / 8.0 * resolvent_average(b, params.gamma_doppler)
}

/// Bracketed integrand of κ̄ at Doppler shift ω_D (units of Γ).
pub fn kappa_integrand(delta: f64, omega_d: f64, params: &SourceParams) -> Complex64 {
    let s = Complex64::new(delta, params.gamma_dec);
    let first =
        params.alpha / 4.0 * params.omega_p / Complex64::new(params.delta_p_gamma() - omega_d, 0.5);
    let second = params.omega_c
        / (params.omega_c * params.omega_c - 4.0 * s * Complex64::new(delta + omega_d, 0.5));
    first * second
}

/// Bracketed integrand of ρ̄ at Doppler shift ω_D (units of Γ).
pub fn rho_integrand(delta: f64, omega_d: f64, params: &SourceParams) -> Complex64 {
    let s = Complex64::new(delta, params.gamma_dec);
    params.alpha / 2.0 * s
        / (params.omega_c * params.omega_c - 4.0 * s * Complex64::new(delta + omega_d, 0.5))
}

/// sin z / z with the removable singularity filled.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// κ̄ sinc(ρ̄) e^{iρ̄}, in units of Γ.
pub fn biphoton_amplitude(delta: f64, params: &SourceParams) -> Complex64 {
    let rho = rho_bar(delta, params);
    kappa_bar(delta, params) * sinc(rho) * (I * rho).exp()
}
