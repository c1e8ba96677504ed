"""Cavity-QED figures of merit: Purcell factor, brightening and decay
ratios, the brightness spectral profile beta(w_cav), weak-pump steady
state, emitted spectra, the modulated-detuning envelope, its algebraic
inversion, and the two estimators of the vacuum Rabi coupling g.

The incoherent emitter <-> cavity transfer rates are g**2 * S~(w_cav)
where S~ is the free-space spectrum convolved with the cavity Lorentzian
(see the spectra module); beta saturates as a Hill function of that rate.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import spectra
from .spectra import RAW_COUNTS, Spectrum, lorentzian

# exciton/photon populations above this are outside the weak-pump regime
WEAK_PUMP_THRESHOLD = 0.1


@dataclass(frozen=True)
class CouplingParams:
    """Vacuum Rabi coupling g, emitter decay gamma and cavity width kappa,
    all in ueV.  The derived rate-per-spectral-density a = g**2/gamma is
    exposed as a property so it can never drift out of sync."""

    g_uev: float
    gamma_uev: float
    kappa_uev: float

    def __post_init__(self):
        if self.g_uev < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g_uev}")
        if self.gamma_uev <= 0 or self.kappa_uev <= 0:
            raise ValueError("gamma and kappa must be positive")

    @property
    def a(self):
        """g**2/gamma in ueV (multiplies a per-ueV spectral density)."""
        return self.g_uev ** 2 / self.gamma_uev


@dataclass(frozen=True)
class PurcellResult:
    f_p: float
    flux_ratio_linear: float
    flux_ratio_sat: float
    decay_ratio: float


@dataclass(frozen=True)
class SteadyStateResult:
    exciton_population: float
    photon_number: float
    weak_pump: bool


@dataclass(frozen=True)
class EnvelopeFit:
    """Result of fitting the normalized modulation envelope."""

    g_uev: float
    a: float
    c: float
    residual: float
    iterations: int
    converged: bool
    flag: str = ""

    def to_record(self):
        return {
            "g_ueV": self.g_uev,
            "a": self.a,
            "c": self.c,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "flag": self.flag,
        }


def purcell_factor(wavelength_nm, refractive_index, v_eff_lambda3, q_eff):
    """Purcell factor (3/4 pi**2) * (lambda/n)**3 / V_eff * Q_eff.

    `v_eff_lambda3` is the mode volume in units of lambda**3 (as quoted
    for microcavity modes); the refractive index converts it to the
    (lambda/n)**3 units of the formula.
    """
    if min(wavelength_nm, refractive_index, v_eff_lambda3, q_eff) <= 0:
        raise ValueError("purcell_factor requires strictly positive inputs")
    v_in_lambda_over_n = v_eff_lambda3 * refractive_index ** 3
    return (3.0 / (4.0 * np.pi ** 2)) * q_eff / v_in_lambda_over_n


def brightening_ratios(dw, f_p, eta_qy):
    """Flux and decay-rate ratios of the cavity-coupled emitter vs free space.

    linear-regime flux ratio   DW*F_P / (1 + eta*DW*F_P)
    saturation flux ratio      DW*F_P
    decay-rate ratio           1 + eta*DW*F_P

    The free-space flux in the ratios is the total one, sidebands included.
    """
    if not 0.0 < dw <= 1.0:
        raise ValueError(f"Debye-Waller factor must be in (0, 1], got {dw}")
    if f_p < 0:
        raise ValueError(f"Purcell factor must be >= 0, got {f_p}")
    if not 0.0 <= eta_qy <= 1.0:
        raise ValueError(f"quantum yield must be in [0, 1], got {eta_qy}")
    enhancement = dw * f_p
    return PurcellResult(
        f_p=f_p,
        flux_ratio_linear=enhancement / (1.0 + eta_qy * enhancement),
        flux_ratio_sat=enhancement,
        decay_ratio=1.0 + eta_qy * enhancement,
    )


def solve_fp_and_qy(flux_ratio_sat, decay_ratio, dw):
    """Invert the brightening relations for (Purcell factor, quantum yield).

    F_P = flux_ratio_sat / DW and eta_QY = (decay_ratio - 1) / (DW * F_P),
    the exact inverse of brightening_ratios.
    """
    if flux_ratio_sat <= 0:
        raise ValueError(f"saturation flux ratio must be > 0, got {flux_ratio_sat}")
    if decay_ratio < 1.0:
        raise ValueError(
            f"decay ratio {decay_ratio} < 1: cavity coupling cannot slow the decay"
        )
    if not 0.0 < dw <= 1.0:
        raise ValueError(f"Debye-Waller factor must be in (0, 1], got {dw}")
    f_p = flux_ratio_sat / dw
    eta_qy = (decay_ratio - 1.0) / (dw * f_p)
    return f_p, eta_qy


def _beta_values(coupling, s_emi_values, s_abs_values):
    emi_rate = coupling.a * s_emi_values
    reabs = 0.0 if s_abs_values is None else (
        coupling.g_uev ** 2 / coupling.kappa_uev) * s_abs_values
    return emi_rate / (1.0 + emi_rate + reabs)


def brightness_profile(coupling, s_emi_tilde, s_abs_tilde=None):
    """Emission probability into the cavity mode vs cavity tuning.

    beta(w) = (g**2 S~emi(w)/gamma) / (1 + g**2 S~emi(w)/gamma
                                         + g**2 S~abs(w)/kappa)

    Both spectra must share one grid and come from the area-2pi filtered
    pipeline.  Passing s_abs_tilde=None drops the re-absorption term,
    which is the right default when kappa >> gamma.  Values are
    dimensionless in [0, 1).
    """
    abs_values = None
    if s_abs_tilde is not None:
        if (s_abs_tilde.energies.shape != s_emi_tilde.energies.shape
                or not np.array_equal(s_abs_tilde.energies, s_emi_tilde.energies)):
            raise ValueError("emission and absorption spectra must share one grid")
        abs_values = s_abs_tilde.values
    beta = _beta_values(coupling, s_emi_tilde.values, abs_values)
    return Spectrum(s_emi_tilde.energies.copy(), beta, RAW_COUNTS)


def steady_state(pump_rate_uev, coupling, s_emi_tilde_at, s_abs_tilde_at=0.0):
    """Weak-pump steady state of the exciton/photon rate equations.

    Solves
        0 = -(gamma + g^2 Se) <x>  + g^2 Sa <n>  + p
        0 = -(kappa + g^2 Sa) <n>  + g^2 Se <x>
    for the exciton population <x> and photon number <n>, with Se/Sa the
    filtered spectra evaluated at the cavity energy (per ueV).  The
    photon loss rate in the second equation is kappa, which makes
    <n> = (p/kappa) * beta(w_cav) hold identically.

    Populations above WEAK_PUMP_THRESHOLD clear the weak-pump assumption;
    the values are still returned with weak_pump=False.
    """
    if pump_rate_uev < 0:
        raise ValueError(f"pump rate must be >= 0, got {pump_rate_uev}")
    if s_emi_tilde_at < 0 or s_abs_tilde_at < 0:
        raise ValueError("spectral densities must be >= 0")
    r_emi = coupling.g_uev ** 2 * s_emi_tilde_at
    r_abs = coupling.g_uev ** 2 * s_abs_tilde_at
    matrix = np.array([
        [coupling.gamma_uev + r_emi, -r_abs],
        [-r_emi, coupling.kappa_uev + r_abs],
    ])
    rhs = np.array([pump_rate_uev, 0.0])
    exciton, photon = np.linalg.solve(matrix, rhs)
    weak = max(exciton, photon) <= WEAK_PUMP_THRESHOLD
    return SteadyStateResult(float(exciton), float(photon), bool(weak))


def emitted_spectrum(omega_cav_uev, coupling, s_emi_tilde, pump_rate_uev, energies):
    """Output spectrum of the cavity-filtered emitter at one detuning.

    The line is the cavity Lorentzian of FWHM kappa centered on the
    cavity energy, with total integral pump * beta(w_cav): the photon
    flux kappa * <n> leaving the cavity.  The discrete line is
    renormalized on the grid so that integral holds exactly at any
    detuning.
    """
    if pump_rate_uev < 0:
        raise ValueError(f"pump rate must be >= 0, got {pump_rate_uev}")
    energies = np.asarray(energies, dtype=float)
    s_at = float(s_emi_tilde.value_at(omega_cav_uev))
    beta_at = _beta_values(coupling, np.array(s_at), None)
    line = lorentzian(energies, omega_cav_uev, coupling.kappa_uev)
    line_area = np.trapezoid(line, energies)
    if line_area <= 0:
        raise ValueError("cavity line has no weight on the requested grid")
    values = (pump_rate_uev * float(beta_at) / line_area) * line
    return Spectrum(energies, values, RAW_COUNTS)


def modulation_envelope(beta, kappa_uev):
    """Time-averaged output envelope under detuning modulation.

    E_mod = (cavity Lorentzian) * beta, the sum over cavity positions of
    per-position output lines.  Uses the same edge-truncated, integral
    preserving convolution as the spectra module, so sweeping the cavity
    conserves the emitted flux on the grid.
    """
    filtered = spectra.convolve_lorentzian(
        Spectrum(beta.energies.copy(), beta.values, RAW_COUNTS), kappa_uev
    )
    return beta.with_values(filtered.values)


def hill_envelope(a, s_dtilde, c=1.0):
    """Closed-form envelope c * a*S / (1 + a*S) for a doubly-filtered
    spectrum S (ndarray or Spectrum values)."""
    s = s_dtilde.values if isinstance(s_dtilde, Spectrum) else np.asarray(s_dtilde, float)
    rate = a * s
    return c * rate / (1.0 + rate)


def invert_envelope(e_mod, a, c):
    """Recover the doubly-filtered spectrum from a modulation envelope.

    S = E / (a*c - a*E), the exact algebraic inverse of the closed-form
    envelope E = c * a*S/(1 + a*S).  Every envelope value must stay
    strictly below c.
    """
    if a <= 0 or c <= 0:
        raise ValueError("a and c must be positive")
    values = e_mod.values
    denom = a * (c - values)
    bad = denom <= 0
    if np.any(bad):
        first = e_mod.energies[np.argmax(bad)]
        raise ValueError(
            f"inversion denominator <= 0 at energy {first:g} ueV "
            f"(envelope reaches {values.max():g} >= c = {c:g})"
        )
    return e_mod.with_values(values / denom)


def normalized_envelope_model(a, s_dtilde_values):
    """Peak-normalized closed-form envelope used for fitting.

    (1 + a*S_max)/(a*S_max) * a*S/(1 + a*S): equals 1 at the spectral
    peak regardless of a, so it can be compared to a measured envelope
    divided by its own maximum.
    """
    s_max = float(np.max(s_dtilde_values))
    if s_max <= 0:
        raise ValueError("spectrum has no positive values")
    rate = a * s_dtilde_values
    return (1.0 + a * s_max) / (a * s_max) * rate / (1.0 + rate)


def fit_g_from_envelope(e_mod_measured, s_fs, kappa_uev, gamma_uev,
                        g_bounds_uev=(1e-2, 1e3)):
    """Extract the Rabi coupling g from a measured modulation envelope.

    The free-space spectrum is convolved twice with the cavity
    Lorentzian, the measured envelope is divided by its maximum, and the
    single parameter a = g**2/gamma of the peak-normalized closed-form
    envelope is fitted by bounded scalar minimization on log(a)
    (Brent-style, relative tolerance 1e-6, at most 200 iterations).

    Returns an EnvelopeFit; `c` is the envelope scale consistent with the
    fitted a and the measured maximum, and `residual` is the root mean
    square difference of the normalized profiles.
    """
    if (e_mod_measured.energies.shape != s_fs.energies.shape
            or not np.array_equal(e_mod_measured.energies, s_fs.energies)):
        raise ValueError("envelope and free-space spectrum must share one grid")
    if np.any(e_mod_measured.values < 0):
        raise ValueError("measured envelope must be nonnegative")

    measured_max = float(np.max(e_mod_measured.values))
    if measured_max <= 0:
        return EnvelopeFit(0.0, 0.0, 0.0, 0.0, 0, True, flag="below-noise-floor")

    s_dtilde = spectra.convolve_lorentzian(
        spectra.convolve_lorentzian(s_fs, kappa_uev), kappa_uev
    )
    s_values = s_dtilde.values
    target = e_mod_measured.values / measured_max

    log_lo = np.log(g_bounds_uev[0] ** 2 / gamma_uev)
    log_hi = np.log(g_bounds_uev[1] ** 2 / gamma_uev)

    def cost(log_a):
        model = normalized_envelope_model(np.exp(log_a), s_values)
        return float(np.mean((model - target) ** 2))

    result = minimize_scalar(
        cost, bounds=(log_lo, log_hi), method="bounded",
        options={"xatol": 1e-6, "maxiter": 200},
    )
    a_fit = float(np.exp(result.x))
    g_fit = float(np.sqrt(a_fit * gamma_uev))
    rms = float(np.sqrt(result.fun))
    iterations = int(result.nfev)
    converged = bool(result.success)

    flag = ""
    if result.x <= log_lo + 1e-3:
        flag = "below-noise-floor"
    elif result.x >= log_hi - 1e-3:
        flag = "at-upper-bound"
    if not converged:
        flag = (flag + ";" if flag else "") + "not-converged"
        warnings.warn("envelope fit did not converge; returning best iterate")

    s_max = float(np.max(s_values))
    c = measured_max * (1.0 + a_fit * s_max) / (a_fit * s_max)
    return EnvelopeFit(g_fit, a_fit, c, rms, iterations, converged, flag)


def g_from_lifetime(gamma_star_uev, delta_gamma_uev, dw):
    """Rabi coupling from the Purcell lifetime change,
    g = sqrt(zpl_fwhm * delta_gamma / DW) / 2.

    Neglects spectral diffusion against pure dephasing inside the ZPL
    width, so it bounds g from below when fast diffusion broadens the
    line.
    """
    if gamma_star_uev <= 0 or delta_gamma_uev <= 0:
        raise ValueError("widths and rate changes must be positive")
    if not 0.0 < dw <= 1.0:
        raise ValueError(f"Debye-Waller factor must be in (0, 1], got {dw}")
    return 0.5 * np.sqrt(gamma_star_uev * delta_gamma_uev / dw)
