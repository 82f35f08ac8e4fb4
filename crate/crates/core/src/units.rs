//! Hartree atomic units and the few conversions the interface needs.
//!
//! Internally everything is atomic units: m_e = hbar = e = a0 = 1, so
//! momenta are 1/a0, lengths a0, energies Hartree, and cross sections a0^2.
//! Only the outer layer (config files, CSV headers) talks nm, keV, degrees.

/// Bohr radius in nanometres (CODATA 2018).
pub const BOHR_RADIUS_NM: f64 = 0.052917721090;

/// One Hartree in electronvolts (CODATA 2018).
pub const HARTREE_EV: f64 = 27.211386245988;

/// a0 per nanometre: 1 nm = 18.8973 a0.
pub const A0_PER_NM: f64 = 1.0 / BOHR_RADIUS_NM;

pub fn nm_to_a0(x_nm: f64) -> f64 {
    x_nm * A0_PER_NM
}

pub fn a0_to_nm(x_a0: f64) -> f64 {
    x_a0 * BOHR_RADIUS_NM
}

/// Momentum in 1/a0 from a length given in nm (p = 1/lambda in a.u.).
pub fn inverse_nm_to_inverse_a0(k_per_nm: f64) -> f64 {
    k_per_nm / A0_PER_NM
}

/// Electron momentum (1/a0) for a given kinetic energy in keV,
/// non-relativistic: p = sqrt(2 m_e E).
pub fn momentum_from_kinetic_kev(e_kev: f64) -> f64 {
    (2.0 * kev_to_hartree(e_kev)).sqrt()
}

/// Kinetic energy in keV for a momentum in 1/a0.
pub fn kinetic_kev_from_momentum(p: f64) -> f64 {
    hartree_to_kev(0.5 * p * p)
}

pub fn kev_to_hartree(e_kev: f64) -> f64 {
    e_kev * 1000.0 / HARTREE_EV
}

pub fn hartree_to_kev(e_h: f64) -> f64 {
    e_h * HARTREE_EV / 1000.0
}

pub fn deg_to_rad(d: f64) -> f64 {
    d.to_radians()
}

pub fn rad_to_deg(r: f64) -> f64 {
    r.to_degrees()
}
