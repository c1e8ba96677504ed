"""Shared unit conventions and physical constants.

Everything in this package uses one convention: energies and rates in
micro-electronvolts (ueV), times in picoseconds (ps), wavelengths in
nanometers (nm).  A rate gamma and a lifetime tau are two views of the
same quantity, gamma = HBAR_UEV_PS / tau.
"""

import numpy as np

# hbar in ueV * ps.  Single source of truth for every rate <-> lifetime
# conversion in the package.
HBAR_UEV_PS = 658.2119569

# h*c in ueV * nm (photon energy E = HC_UEV_NM / wavelength_nm).
HC_UEV_NM = 1.23984198e9

# Boltzmann constant in ueV / K.
KB_UEV_PER_K = 86.17333262


def energy_from_wavelength(wavelength_nm):
    """Photon energy in ueV for a vacuum wavelength in nm."""
    if wavelength_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    return HC_UEV_NM / wavelength_nm


def wavelength_from_energy(energy_uev):
    """Vacuum wavelength in nm for a photon energy in ueV."""
    if energy_uev <= 0:
        raise ValueError(f"energy must be positive, got {energy_uev}")
    return HC_UEV_NM / energy_uev


def rate_from_lifetime(tau_ps):
    """Decay rate in ueV equivalent to a lifetime in ps."""
    if tau_ps <= 0:
        raise ValueError(f"lifetime must be positive, got {tau_ps}")
    return HBAR_UEV_PS / tau_ps


def lifetime_from_rate(gamma_uev):
    """Lifetime in ps equivalent to a decay rate in ueV."""
    if gamma_uev <= 0:
        raise ValueError(f"rate must be positive, got {gamma_uev}")
    return HBAR_UEV_PS / gamma_uev


def bose_occupation(energy_uev, temperature_k):
    """Bose-Einstein occupation of a mode at `energy_uev` and temperature T.

    Vectorized over energy.  Returns 0 at T = 0 (and stays finite for
    energies >> kT); energies must be strictly positive.
    """
    energy = np.asarray(energy_uev, dtype=float)
    if np.any(energy <= 0):
        raise ValueError("bose_occupation requires strictly positive energies")
    if temperature_k < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature_k}")
    if temperature_k == 0:
        return np.zeros_like(energy) if energy.ndim else 0.0
    x = energy / (KB_UEV_PER_K * temperature_k)
    # expm1 keeps precision for x << 1 and saturates cleanly for x >> 1
    out = 1.0 / np.expm1(np.minimum(x, 700.0))
    return out if energy.ndim else float(out)
