"""Emitter spectra: zero-phonon line, acoustic-phonon sidebands, and the
Lorentzian-filtered spectra that drive the emitter <-> cavity population
transfer.

Sign convention used everywhere: detuning = energy - zpl_energy, so the
red (phonon emission) sideband sits at negative detuning.  Spectra are
sampled on uniform energy grids and carry an explicit normalization tag;
the "area-2pi" tag means the trapezoid integral is 2*pi, which is the
normalization the coupled-dynamics equations expect.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .units import bose_occupation

AREA_ONE = "area-one"
AREA_2PI = "area-2pi"
RAW_COUNTS = "raw-counts"
_NORMALIZATIONS = (AREA_ONE, AREA_2PI, RAW_COUNTS)

# relative nonuniformity tolerated in a grid, and the relative window
# around 2*pi accepted for area-2pi spectra
_GRID_RTOL = 1e-9
_AREA_2PI_RTOL = 1e-6


@dataclass(frozen=True)
class Spectrum:
    """A spectral density on a uniform energy grid.

    Parameters
    ----------
    energies : ndarray
        Uniformly spaced energies in ueV (absolute or detuning from the
        zero-phonon line).
    values : ndarray
        Nonnegative spectral density per ueV (or raw counts).
    normalization : str
        One of "area-one", "area-2pi", "raw-counts".
    """

    energies: np.ndarray
    values: np.ndarray
    normalization: str = RAW_COUNTS

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if energies.ndim != 1 or energies.size < 2:
            raise ValueError("spectrum grid must be a 1-d array with >= 2 points")
        if values.shape != energies.shape:
            raise ValueError("energies and values must have the same shape")
        steps = np.diff(energies)
        if steps[0] <= 0:
            raise ValueError("spectrum grid must be ascending")
        if np.any(np.abs(steps - steps[0]) > _GRID_RTOL * abs(steps[0])):
            raise ValueError("spectrum grid must be uniform to 1 part in 1e9")
        if np.any(values < 0):
            raise ValueError("spectral values must be nonnegative")
        if self.normalization not in _NORMALIZATIONS:
            raise ValueError(
                f"unknown normalization {self.normalization!r}, "
                f"expected one of {_NORMALIZATIONS}"
            )
        energies.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "values", values)
        if self.normalization == AREA_2PI:
            area = self.area()
            if abs(area - 2.0 * np.pi) > _AREA_2PI_RTOL * 2.0 * np.pi:
                raise ValueError(
                    f"area-2pi spectrum has trapezoid integral {area:.9g}, "
                    f"outside 2*pi*(1 +- {_AREA_2PI_RTOL:g})"
                )

    @property
    def step(self):
        """Grid spacing in ueV."""
        return (self.energies[-1] - self.energies[0]) / (self.energies.size - 1)

    def area(self):
        """Trapezoid integral of the spectrum over its grid."""
        return float(np.trapezoid(self.values, self.energies))

    def value_at(self, energy):
        """Linear interpolation of the spectrum (0 outside the grid)."""
        return np.interp(energy, self.energies, self.values, left=0.0, right=0.0)

    def with_values(self, values, normalization=None):
        """Copy of this spectrum with new values (same grid)."""
        return Spectrum(
            self.energies.copy(),
            values,
            self.normalization if normalization is None else normalization,
        )


@dataclass(frozen=True)
class SidebandShape:
    """Parametric one-phonon acoustic wing: spectral density
    J(w) = (w/cutoff)**exponent * exp(-w/cutoff)."""

    exponent: float = 1.0
    cutoff_uev: float = 1000.0

    def __post_init__(self):
        if self.exponent <= 0:
            raise ValueError(f"sideband exponent must be > 0, got {self.exponent}")
        if self.cutoff_uev <= 0:
            raise ValueError(f"sideband cutoff must be > 0, got {self.cutoff_uev}")

    def density(self, energy_uev):
        """J evaluated at |energy| (vectorized)."""
        w = np.abs(np.asarray(energy_uev, dtype=float))
        return (w / self.cutoff_uev) ** self.exponent * np.exp(-w / self.cutoff_uev)


@dataclass(frozen=True)
class EmitterModel:
    """Free-space spectral and dynamical parameters of one emitter.

    zpl_fwhm_uev lumps pure dephasing and fast spectral diffusion into a
    single ZPL width.  gamma_fs_uev is the total free-space decay rate
    (HBAR/tau); eta_qy is the radiative fraction of it.
    """

    zpl_energy_uev: float
    zpl_fwhm_uev: float
    debye_waller: float
    sideband: SidebandShape = field(default_factory=SidebandShape)
    temperature_k: float = 4.2
    gamma_fs_uev: float = 2.5711
    eta_qy: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.debye_waller <= 1.0:
            raise ValueError(f"Debye-Waller factor must be in (0, 1], got {self.debye_waller}")
        if self.zpl_fwhm_uev <= 0:
            raise ValueError(f"ZPL width must be > 0, got {self.zpl_fwhm_uev}")
        if self.gamma_fs_uev <= 0:
            raise ValueError(f"free-space decay rate must be > 0, got {self.gamma_fs_uev}")
        if self.temperature_k < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature_k}")
        if not 0.0 <= self.eta_qy <= 1.0:
            raise ValueError(f"quantum yield must be in [0, 1], got {self.eta_qy}")

    @property
    def gamma_radiative_uev(self):
        """Radiative part of the free-space decay rate."""
        return self.eta_qy * self.gamma_fs_uev


def energy_grid(center_uev, half_span_uev, step_uev):
    """Uniform, symmetric energy grid centered on `center_uev`.

    The grid always contains the center point, with an odd number of
    points spanning at least +- half_span_uev.
    """
    if step_uev <= 0 or half_span_uev <= 0:
        raise ValueError("grid step and half-span must be positive")
    n_half = int(np.ceil(half_span_uev / step_uev))
    offsets = np.arange(-n_half, n_half + 1) * step_uev
    return center_uev + offsets


def lorentzian(energy_uev, center_uev, fwhm_uev):
    """Unit-area Lorentzian of full width `fwhm_uev` (peak 2/(pi*fwhm))."""
    x = 2.0 * (np.asarray(energy_uev, dtype=float) - center_uev) / fwhm_uev
    return (2.0 / (np.pi * fwhm_uev)) / (1.0 + x * x)


def sideband_profile(model, energies):
    """Unnormalized one-phonon wing of the emission spectrum.

    Red wing (negative detuning): J(|d|) * (n_B(|d|) + 1), phonon emission.
    Blue wing (positive detuning): J(|d|) * n_B(|d|), phonon absorption.
    Vanishes at zero detuning (J -> 0), so the wing never double-counts
    the ZPL.
    """
    detuning = np.asarray(energies, dtype=float) - model.zpl_energy_uev
    wing = np.zeros_like(detuning)
    off = detuning != 0.0
    if np.any(off):
        j = model.sideband.density(detuning[off])
        n_b = bose_occupation(np.abs(detuning[off]), model.temperature_k)
        wing[off] = j * np.where(detuning[off] < 0, n_b + 1.0, n_b)
    return wing


def build_fs_spectrum(model, energies):
    """Free-space emission spectrum: Lorentzian ZPL plus one-phonon wings.

    The ZPL carries a fraction `model.debye_waller` of the total area and
    the wings carry the rest, with the red/blue asymmetry set by the Bose
    occupation at `model.temperature_k`.  The result is normalized to
    trapezoid area 2*pi.

    Parameters
    ----------
    model : EmitterModel
    energies : ndarray
        Uniform grid spanning at least +- 10 ZPL widths around the ZPL,
        with spacing at most one tenth of the ZPL width.

    Returns
    -------
    Spectrum with normalization "area-2pi".
    """
    energies = np.asarray(energies, dtype=float)
    step = energies[1] - energies[0]
    if step > model.zpl_fwhm_uev / 10.0:
        raise ValueError(
            f"grid too coarse: spacing {step:g} ueV exceeds zpl_fwhm/10 = "
            f"{model.zpl_fwhm_uev / 10.0:g} ueV"
        )
    lo = model.zpl_energy_uev - energies[0]
    hi = energies[-1] - model.zpl_energy_uev
    if min(lo, hi) < 10.0 * model.zpl_fwhm_uev:
        raise ValueError(
            f"grid too narrow: spans -{lo:g}/+{hi:g} ueV around the ZPL, "
            f"needs at least +-10*zpl_fwhm = {10.0 * model.zpl_fwhm_uev:g} ueV"
        )

    zpl = lorentzian(energies, model.zpl_energy_uev, model.zpl_fwhm_uev)
    zpl_area = np.trapezoid(zpl, energies)
    values = (model.debye_waller / zpl_area) * zpl

    if model.debye_waller < 1.0:
        wing = sideband_profile(model, energies)
        wing_area = np.trapezoid(wing, energies)
        if wing_area <= 0:
            raise ValueError("sideband weight is nonzero but the wing has no support on this grid")
        values = values + ((1.0 - model.debye_waller) / wing_area) * wing

    values *= 2.0 * np.pi / np.trapezoid(values, energies)
    return Spectrum(energies, values, AREA_2PI)


def debye_waller(spectrum, zpl_window_uev):
    """Fraction of the total intensity inside a window around the peak.

    The window is centered on the grid point of maximum value (the ZPL
    for any realistic emission spectrum) and the returned value is the
    plain ratio of the windowed trapezoid integral to the total one;
    no correction is applied for ZPL tails leaking out of the window.
    """
    if zpl_window_uev <= 0:
        raise ValueError("window half-width must be positive")
    center = spectrum.energies[int(np.argmax(spectrum.values))]
    if (center - zpl_window_uev < spectrum.energies[0]
            or center + zpl_window_uev > spectrum.energies[-1]):
        raise ValueError(
            f"window +-{zpl_window_uev:g} ueV around {center:g} ueV exceeds the grid "
            f"[{spectrum.energies[0]:g}, {spectrum.energies[-1]:g}]"
        )
    inside = np.abs(spectrum.energies - center) <= zpl_window_uev
    num = np.trapezoid(np.where(inside, spectrum.values, 0.0), spectrum.energies)
    den = spectrum.area()
    if den <= 0:
        raise ValueError("cannot measure the ZPL fraction of an all-zero spectrum")
    return float(num / den)


def _truncated_convolve(values, step, kappa_uev):
    """Discrete convolution with a unit-area Lorentzian, edge-truncated.

    The kernel is sampled over the full +-(N-1) offset range and scaled
    to unit discrete area, so the center of the grid sees the exact
    convolution; mass convolved past the grid edges is dropped.
    """
    n = values.size
    offsets = np.arange(-(n - 1), n) * step
    kernel = lorentzian(offsets, 0.0, kappa_uev)
    kernel /= kernel.sum() * step
    full = fftconvolve(values, kernel) * step
    out = full[n - 1:2 * n - 1]
    return np.maximum(out, 0.0)


def convolve_lorentzian(spectrum, kappa_uev):
    """Convolve a spectrum with a unit-area Lorentzian of FWHM `kappa_uev`.

    The discrete convolution truncates at the grid edges; to keep the
    stated area contract the result is rescaled so its on-grid integral
    matches the input exactly.  Grids should over-span the region of
    interest by >= 10 kappa for the rescaling factor to stay small.

    Returns a Spectrum with the same grid and normalization tag.
    """
    if kappa_uev <= 0:
        raise ValueError(f"kappa must be positive, got {kappa_uev}")
    step = spectrum.step
    if step > kappa_uev / 5.0:
        raise ValueError(
            f"kappa below grid resolution: spacing {step:g} ueV exceeds "
            f"kappa/5 = {kappa_uev / 5.0:g} ueV"
        )
    out = _truncated_convolve(spectrum.values, step, kappa_uev)
    total_in = spectrum.area()
    total_out = np.trapezoid(out, spectrum.energies)
    if total_in > 0:
        if total_out <= 0:
            raise ValueError("convolution lost all spectral weight; grid badly under-spans")
        out *= total_in / total_out
    return spectrum.with_values(out)


def s_tilde_max(dw, gamma_star_uev, kappa_uev):
    """Peak of the cavity-filtered emission spectrum, 4*DW/(zpl_fwhm + kappa).

    This is the closed form for a ZPL-dominated area-2pi spectrum whose
    Lorentzian ZPL is convolved with the cavity Lorentzian, and links the
    peak of the filtered spectrum to the Debye-Waller factor.
    """
    if not 0.0 < dw <= 1.0:
        raise ValueError(f"Debye-Waller factor must be in (0, 1], got {dw}")
    if gamma_star_uev <= 0 or kappa_uev < 0:
        raise ValueError("widths must be positive (kappa may be zero)")
    return 4.0 * dw / (gamma_star_uev + kappa_uev)


def absorption_spectrum(s_emi, model):
    """Absorption spectrum matching an area-2pi emission spectrum.

    The spectrum is mirrored about the ZPL energy, which for a spectrum
    obeying detailed balance is the same as reweighting each sideband
    point by exp(detuning/kT): the strong red (phonon emission) wing of
    the emission becomes the strong blue wing of the absorption, and the
    symmetric ZPL is unchanged.  The result is renormalized to area 2*pi.
    """
    if s_emi.normalization != AREA_2PI:
        raise ValueError("absorption_spectrum expects an area-2pi emission spectrum")
    mirrored_energies = 2.0 * model.zpl_energy_uev - s_emi.energies
    values = np.interp(
        mirrored_energies[::-1], s_emi.energies, s_emi.values, left=0.0, right=0.0
    )[::-1]
    area = np.trapezoid(values, s_emi.energies)
    if area <= 0:
        raise ValueError("mirrored spectrum has no weight on the grid; is the ZPL on-grid?")
    values *= 2.0 * np.pi / area
    return Spectrum(s_emi.energies.copy(), values, AREA_2PI)


def load_spectrum_csv(path, normalization=RAW_COUNTS):
    """Load a spectrum from CSV with header `energy_ueV,value`.

    Rows must be in ascending energy order on a uniform grid.  The
    normalization tag is supplied by the caller (it is not stored in the
    file).
    """
    energies = []
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["energy_ueV", "value"]:
            raise ValueError(f"{path}: expected header 'energy_ueV,value', got {header}")
        for row in reader:
            if not row:
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: malformed row {row!r}")
            energies.append(float(row[0]))
            values.append(float(row[1]))
    if len(energies) < 2:
        raise ValueError(f"{path}: spectrum needs at least two rows")
    return Spectrum(np.array(energies), np.array(values), normalization)


def save_spectrum_csv(spectrum, path):
    """Write a spectrum as CSV with header `energy_ueV,value`.

    Floats are written with 17 significant digits so a load round-trips
    bit-exactly.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["energy_ueV", "value"])
        for e, v in zip(spectrum.energies, spectrum.values):
            writer.writerow([f"{e:.17g}", f"{v:.17g}"])
