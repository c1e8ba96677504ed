"""Time-domain dynamics: photoluminescence decay traces with instrument
response, biexponential lifetime fits, saturation curves with quantum
yield extraction, and intensity correlations g2(tau) of a three-level
(bright/ground/shelving) emitter.

Rates are expressed in ueV (rate = HBAR_UEV_PS / lifetime_ps) and times
in ps, like everywhere else in the package.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import fftconvolve

from .units import HBAR_UEV_PS

# relative tau1/tau2 separation below which a biexponential fit collapses
_DEGENERATE_TAU_RTOL = 0.05


@dataclass(frozen=True)
class DecayTrace:
    """Time-binned photon counts with the instrument response that
    produced them.  `irf` is a Gaussian FWHM in ps when scalar, or a
    tabulated kernel (same bin width as the trace) when an array."""

    time_ps: np.ndarray
    counts: np.ndarray
    irf: object = 32.0

    def __post_init__(self):
        t = np.asarray(self.time_ps, dtype=float)
        c = np.asarray(self.counts, dtype=float)
        if t.ndim != 1 or t.size < 2 or c.shape != t.shape:
            raise ValueError("trace needs matching 1-d time and count arrays")
        steps = np.diff(t)
        if np.any(np.abs(steps - steps[0]) > 1e-9 * abs(steps[0])) or steps[0] <= 0:
            raise ValueError("time bins must be uniform and ascending")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "time_ps", t)
        object.__setattr__(self, "counts", c)

    @property
    def bin_ps(self):
        return (self.time_ps[-1] - self.time_ps[0]) / (self.time_ps.size - 1)


@dataclass(frozen=True)
class BiexpFit:
    tau1_ps: float
    tau2_ps: float
    a1: float
    a2: float
    long_weight: float
    sigma_tau1_ps: float
    sigma_tau2_ps: float
    converged: bool
    flag: str = ""

    def to_record(self):
        return {
            "tau1_ps": self.tau1_ps,
            "tau2_ps": self.tau2_ps,
            "a1": self.a1,
            "a2": self.a2,
            "long_weight": self.long_weight,
            "sigma_tau1_ps": self.sigma_tau1_ps,
            "sigma_tau2_ps": self.sigma_tau2_ps,
            "converged": self.converged,
            "flag": self.flag,
        }


@dataclass(frozen=True)
class SaturationFit:
    i_sat: float
    p_sat: float
    sigma_i_sat: float
    sigma_p_sat: float
    converged: bool


@dataclass(frozen=True)
class LevelScheme:
    """Three-level rate scheme: ground, bright excited state and a dark
    shelf.  All rates in ueV equivalents; `background` is the
    uncorrelated fraction of the detected counts."""

    pump_uev: float
    gamma_total_uev: float
    k_shelve_uev: float = 0.0
    k_deshelve_uev: float = 0.0
    background: float = 0.0

    def __post_init__(self):
        for name in ("pump_uev", "gamma_total_uev", "k_shelve_uev", "k_deshelve_uev"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.gamma_total_uev == 0:
            raise ValueError("the bright state must decay (gamma_total > 0)")
        if self.k_shelve_uev > 0 and self.k_deshelve_uev == 0:
            raise ValueError("shelving without deshelving has no steady state")
        if not 0.0 <= self.background < 1.0:
            raise ValueError(f"background fraction must be in [0, 1), got {self.background}")


def _irf_kernel(irf, bin_ps, n_bins):
    """Unit-sum discrete IRF kernel centered on zero delay."""
    if irf is None:
        return None
    if np.isscalar(irf):
        fwhm = float(irf)
        if fwhm <= 0:
            return None
        sigma = fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        half = min(int(np.ceil(5.0 * sigma / bin_ps)), n_bins - 1)
        t = np.arange(-half, half + 1) * bin_ps
        kernel = np.exp(-0.5 * (t / sigma) ** 2)
    else:
        kernel = np.asarray(irf, dtype=float)
        if kernel.ndim != 1 or kernel.size == 0 or np.any(kernel < 0) or kernel.sum() <= 0:
            raise ValueError("tabulated IRF must be a nonnegative 1-d array with weight")
    return kernel / kernel.sum()


def _convolve_centered(values, kernel):
    """Convolve with a centered kernel, preserving total counts."""
    if kernel is None:
        return values
    half = (kernel.size - 1) // 2
    full = fftconvolve(values, kernel)
    out = full[half:half + values.size]
    # fold edge spillover back so the discrete sum is conserved
    total = values.sum()
    got = out.sum()
    if got > 0:
        out = out * (total / got)
    return out


def _biexp_model(time_ps, tau1, tau2, a1, a2, kernel):
    decay = np.where(
        time_ps >= 0,
        a1 * np.exp(-np.maximum(time_ps, 0.0) / tau1)
        + a2 * np.exp(-np.maximum(time_ps, 0.0) / tau2),
        0.0,
    )
    return _convolve_centered(decay, kernel)


def simulate_decay(gamma_fs_uev, decay_ratio=1.0, weights=(2.0, 1.0),
                   tau_short_ps=23.0, irf=32.0, time_grid_ps=None):
    """Noiseless biexponential decay trace convolved with the IRF.

    The long component is the emitter lifetime HBAR/gamma_fs divided by
    `decay_ratio` (the cavity acceleration of the total decay); the short
    component `tau_short_ps` is untouched by the cavity.  `weights` are
    the (short, long) amplitudes at t = 0.

    The time grid must extend to at least 5 long lifetimes.
    """
    if gamma_fs_uev <= 0 or decay_ratio <= 0 or tau_short_ps <= 0:
        raise ValueError("rates, ratios and lifetimes must be positive")
    tau_long = HBAR_UEV_PS / gamma_fs_uev / decay_ratio
    if time_grid_ps is None:
        bin_ps = max(tau_short_ps / 8.0, 1.0)
        time_grid_ps = np.arange(-np.ceil(160.0 / bin_ps), np.ceil(6.0 * tau_long / bin_ps) + 1) * bin_ps
    time_grid_ps = np.asarray(time_grid_ps, dtype=float)
    if time_grid_ps[-1] < 5.0 * tau_long:
        raise ValueError(
            f"grid too short: ends at {time_grid_ps[-1]:g} ps, needs >= 5*tau_long "
            f"= {5.0 * tau_long:g} ps"
        )
    bin_ps = time_grid_ps[1] - time_grid_ps[0]
    kernel = _irf_kernel(irf, bin_ps, time_grid_ps.size)
    a1, a2 = weights
    counts = _biexp_model(time_grid_ps, tau_short_ps, tau_long, a1, a2, kernel)
    return DecayTrace(time_grid_ps, np.maximum(counts, 0.0), irf)


def fit_biexponential(trace, x0=None):
    """Weighted least-squares biexponential fit of an IRF-convolved trace.

    Residuals carry Poisson weights 1/sqrt(max(counts, 1)).  If the two
    lifetimes converge to within 5% of each other the fit collapses to a
    monoexponential and is flagged; non-convergence returns the best
    iterate with a flag and a warning.
    """
    if trace.time_ps.size < 50:
        raise ValueError("need at least 50 bins for a biexponential fit")
    if trace.counts.max() <= 0:
        raise ValueError("trace has no counts")

    t = trace.time_ps
    c = trace.counts
    bin_ps = trace.bin_ps
    kernel = _irf_kernel(trace.irf, bin_ps, t.size)
    sigma = np.sqrt(np.maximum(c, 1.0))

    if x0 is None:
        x0 = _initial_biexp_guess(t, c, kernel)

    def residuals(params):
        tau1, tau2, a1, a2 = params
        return (_biexp_model(t, tau1, tau2, a1, a2, kernel) - c) / sigma

    lower = [bin_ps / 10.0, bin_ps / 10.0, 0.0, 0.0]
    result = least_squares(residuals, x0, bounds=(lower, np.inf),
                           xtol=1e-10, ftol=1e-10, max_nfev=500 * 4)
    tau1, tau2, a1, a2 = result.x
    if tau1 > tau2:
        tau1, tau2, a1, a2 = tau2, tau1, a2, a1

    flag = ""
    converged = bool(result.status > 0)
    if not converged:
        flag = "not-converged"
        warnings.warn("biexponential fit did not converge; returning best iterate")

    if abs(tau2 - tau1) < _DEGENERATE_TAU_RTOL * tau2:
        return _monoexp_collapse(t, c, sigma, kernel, tau2, a1 + a2)

    sig = _parameter_sigmas(result)
    long_weight = a2 * tau2 / (a1 * tau1 + a2 * tau2)
    return BiexpFit(float(tau1), float(tau2), float(a1), float(a2),
                    float(long_weight), sig[0], sig[1], converged, flag)


def _initial_biexp_guess(t, c, kernel):
    """Tail slope for the long lifetime, linear solve for amplitudes."""
    peak_idx = int(np.argmax(c))
    tail_start = peak_idx + int(0.3 * (t.size - peak_idx))
    tail = slice(tail_start, t.size)
    good = c[tail] > 0
    if good.sum() >= 5:
        slope = np.polyfit(t[tail][good], np.log(c[tail][good]), 1)[0]
        tau2_0 = -1.0 / slope if slope < 0 else (t[-1] - t[peak_idx]) / 3.0
    else:
        tau2_0 = (t[-1] - t[peak_idx]) / 3.0
    tau2_0 = max(tau2_0, 2.0 * (t[1] - t[0]))
    tau1_0 = tau2_0 / 8.0
    basis = np.column_stack([
        _biexp_model(t, tau1_0, tau2_0, 1.0, 0.0, kernel),
        _biexp_model(t, tau1_0, tau2_0, 0.0, 1.0, kernel),
    ])
    amps, *_ = np.linalg.lstsq(basis, c, rcond=None)
    a1_0, a2_0 = np.maximum(amps, c.max() * 1e-3)
    return [tau1_0, tau2_0, a1_0, a2_0]


def _monoexp_collapse(t, c, sigma, kernel, tau0, a0):
    def residuals(params):
        tau, a = params
        return (_biexp_model(t, tau, tau, 0.0, a, kernel) - c) / sigma

    result = least_squares(residuals, [tau0, a0], bounds=([1e-6, 0.0], np.inf))
    tau, a = result.x
    sig = _parameter_sigmas(result)
    return BiexpFit(float(tau), float(tau), 0.0, float(a), 1.0, sig[0], sig[0],
                    bool(result.status > 0), "degenerate-collapsed-to-monoexponential")


def _parameter_sigmas(result):
    """One-sigma estimates from the Jacobian at the optimum."""
    try:
        jtj = result.jac.T @ result.jac
        cov = np.linalg.pinv(jtj)
        dof = max(result.fun.size - result.x.size, 1)
        scale = 2.0 * result.cost / dof
        return np.sqrt(np.maximum(np.diag(cov) * scale, 0.0))
    except np.linalg.LinAlgError:
        return np.full(result.x.size, np.nan)


def saturation_curve(powers, i_sat, p_sat, mode="cw"):
    """Detected rate vs excitation power.

    cw:     I = I_sat * P / (P + P_sat)
    pulsed: I = I_sat * (1 - exp(-P / P_sat))

    Both are strictly increasing and approach I_sat from below.
    """
    powers = np.asarray(powers, dtype=float)
    if np.any(powers < 0):
        raise ValueError("powers must be >= 0")
    if i_sat <= 0 or p_sat <= 0:
        raise ValueError("I_sat and P_sat must be positive")
    if mode == "cw":
        return i_sat * powers / (powers + p_sat)
    if mode == "pulsed":
        return i_sat * (1.0 - np.exp(-powers / p_sat))
    raise ValueError(f"mode must be 'cw' or 'pulsed', got {mode!r}")


def fit_saturation(powers, counts, mode="cw"):
    """Least-squares fit of a saturation curve, returns SaturationFit."""
    powers = np.asarray(powers, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if powers.shape != counts.shape or powers.size < 3:
        raise ValueError("need matching power/count arrays with >= 3 points")
    i0 = float(counts.max()) * 1.2
    p0 = float(np.median(powers))

    def residuals(params):
        return saturation_curve(powers, params[0], params[1], mode) - counts

    result = least_squares(residuals, [i0, p0], bounds=([0.0, 0.0], np.inf))
    sig = _parameter_sigmas(result)
    return SaturationFit(float(result.x[0]), float(result.x[1]),
                         sig[0], sig[1], bool(result.status > 0))


def qy_from_saturation(i_sat, eta_coll, f_rep_hz):
    """Quantum yield from a pulsed saturation plateau,
    eta_QY = I_sat / (eta_coll * f_rep).

    Warns (without raising) if the result exceeds one, which signals an
    inconsistent collection efficiency.
    """
    if i_sat <= 0 or eta_coll <= 0 or f_rep_hz <= 0:
        raise ValueError("saturation rate, efficiency and repetition rate must be positive")
    eta_qy = i_sat / (eta_coll * f_rep_hz)
    if eta_qy > 1.0:
        warnings.warn(f"quantum yield {eta_qy:.3g} > 1 is unphysical; "
                      "check the collection efficiency")
    return eta_qy


def _rate_matrix_per_ps(scheme):
    """Population rate matrix d[g,e,d]/dt = M [g,e,d] in 1/ps."""
    pump = scheme.pump_uev / HBAR_UEV_PS
    gamma = scheme.gamma_total_uev / HBAR_UEV_PS
    k_s = scheme.k_shelve_uev / HBAR_UEV_PS
    k_d = scheme.k_deshelve_uev / HBAR_UEV_PS
    return np.array([
        [-pump, gamma, k_d],
        [pump, -(gamma + k_s), 0.0],
        [0.0, k_s, -k_d],
    ])


def g2_emitter_cw(scheme, tau_ps):
    """Source intensity correlation of the three-level scheme, no
    background, no IRF: excited-state population at |tau| after a reset
    to the ground state, normalized by its steady-state value.

    Computed by eigendecomposition of the 3x3 rate matrix, so it is the
    closed form g2 = 1 - (1+A) exp(-l1|t|) + A exp(-l2|t|) with the
    eigen-rates and amplitude of the scheme.
    """
    matrix = _rate_matrix_per_ps(scheme)
    eigvals, eigvecs = np.linalg.eig(matrix)
    coeffs = np.linalg.solve(eigvecs, np.array([1.0, 0.0, 0.0]))
    tau = np.abs(np.asarray(tau_ps, dtype=float))
    populations = (eigvecs[1, :] * coeffs) @ np.exp(np.outer(eigvals, tau))
    # the steady state is the span of the (possibly degenerate) zero
    # eigenvalues; a decoupled dark state contributes one of them
    zero = np.abs(eigvals) <= 1e-12 * np.max(np.abs(eigvals))
    p_e_ss = float(np.real(np.sum(eigvecs[1, zero] * coeffs[zero])))
    if p_e_ss <= 0:
        raise ValueError("scheme has no steady-state excited population")
    return np.maximum(np.real(populations) / p_e_ss, 0.0)


def g2_eigenrates(scheme):
    """(antibunching rate, bunching rate) in 1/ps from the rate matrix.

    The antibunching rate is the fastest decaying eigenmode; the
    bunching rate is the slow one (zero when there is no shelving).
    """
    eigvals = np.sort(np.real(np.linalg.eigvals(_rate_matrix_per_ps(scheme))))
    return -eigvals[0], -eigvals[1]


def apply_background(g2_values, background):
    """Uncorrelated-background transform (1-b)^2 g2 + b(2-b)."""
    b = background
    return (1.0 - b) ** 2 * np.asarray(g2_values, float) + b * (2.0 - b)


def g2_correlation(scheme, mode, tau_grid_ps, irf=32.0, f_rep_hz=None):
    """Measured g2(tau) of the three-level emitter.

    cw: closed-form correlation with the scheme's background fraction
    folded in, convolved with the (pair) timing response.

    pulsed: comb of correlation peaks at multiples of 1/f_rep whose areas
    follow the cw correlation sampled at the peak centers (the zero-delay
    peak carries only the background coincidences), each peak shaped as
    the two-sided exponential of the bright-state lifetime, convolved
    with the timing response.
    """
    tau = np.asarray(tau_grid_ps, dtype=float)
    if tau.size < 3:
        raise ValueError("tau grid needs at least 3 points")
    if abs(tau[0] + tau[-1]) > 1e-6 * max(abs(tau[0]), abs(tau[-1])):
        raise ValueError("tau grid must be symmetric about zero")
    bin_ps = tau[1] - tau[0]
    kernel = _irf_kernel(irf, bin_ps, tau.size)

    if mode == "cw":
        g2 = apply_background(g2_emitter_cw(scheme, tau), scheme.background)
        if kernel is not None:
            # pad with the asymptotic value so the edge bins stay near 1
            half = (kernel.size - 1) // 2
            padded = np.concatenate([np.full(half, g2[0]), g2, np.full(half, g2[-1])])
            g2 = np.convolve(padded, kernel, mode="valid")
        return g2

    if mode == "pulsed":
        if not f_rep_hz or f_rep_hz <= 0:
            raise ValueError("pulsed correlations need a positive f_rep_hz")
        period_ps = 1e12 / f_rep_hz
        tau_e = HBAR_UEV_PS / scheme.gamma_total_uev
        n_side = int(np.floor(tau[-1] / period_ps))
        centers = np.arange(-n_side, n_side + 1) * period_ps
        areas = apply_background(g2_emitter_cw(scheme, centers), scheme.background)
        areas[n_side] = apply_background(0.0, scheme.background)
        comb = np.zeros_like(tau)
        for center, area in zip(centers, areas):
            peak = np.exp(-np.abs(tau - center) / tau_e) / (2.0 * tau_e)
            comb += area * peak * period_ps
        if kernel is not None:
            comb = _convolve_centered(comb, kernel)
        return comb

    raise ValueError(f"mode must be 'cw' or 'pulsed', got {mode!r}")


def pulsed_g2_zero(tau_ps, g2_values, f_rep_hz):
    """Zero-delay peak area over the mean side-peak area, each integrated
    over a window of +-half the pulse period."""
    tau = np.asarray(tau_ps, dtype=float)
    values = np.asarray(g2_values, dtype=float)
    period_ps = 1e12 / f_rep_hz
    half = period_ps / 2.0

    def window_area(center):
        mask = np.abs(tau - center) <= half
        return float(np.trapezoid(np.where(mask, values, 0.0), tau))

    zero = window_area(0.0)
    n_side = int(np.floor((tau[-1] - half) / period_ps))
    if n_side < 1:
        raise ValueError("tau grid too short to hold a side peak")
    sides = [window_area(m * period_ps) for m in range(1, n_side + 1)]
    sides += [window_area(-m * period_ps) for m in range(1, n_side + 1)]
    return zero / float(np.mean(sides))
