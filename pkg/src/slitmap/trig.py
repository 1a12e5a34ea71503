"""Spectral helpers for 2*pi-periodic data on equispaced nodes.

All boundary curves and boundary functions in this package live on uniform
parameter grids t_k = 2*pi*k/N, so trigonometric interpolation, FFT
differentiation, and the periodic trapezoid rule are the workhorses. For
analytic data these are spectrally accurate.
"""

from __future__ import annotations

import numpy as np


def nodes(n: int) -> np.ndarray:
    """Equispaced parameter nodes 2*pi*k/n, k=0..n-1."""
    return 2.0 * np.pi * np.arange(n) / n


def coeffs(samples: np.ndarray) -> np.ndarray:
    """Fourier coefficients c_k (fft layout) of samples on uniform nodes."""
    samples = np.asarray(samples)
    return np.fft.fft(samples) / samples.size


def freqs(n: int) -> np.ndarray:
    """Integer frequencies in fft layout: 0,1,..,n/2-1,-n/2,..,-1."""
    return np.fft.fftfreq(n, d=1.0 / n)


def eval_series(c: np.ndarray, t) -> np.ndarray:
    """Evaluate the trigonometric interpolant with coefficients c at t.

    The Nyquist mode of an even-length series is split symmetrically
    (cos(n t / 2)), matching the standard real trig interpolant.
    """
    c = np.asarray(c)
    n = c.size
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = freqs(n)
    phases = np.exp(1j * np.outer(t, k))
    if n % 2 == 0:
        phases[:, n // 2] = np.cos(t * (n // 2))
    out = phases @ c
    return out if out.size > 1 else out[0]


def diff(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Differentiate periodic samples spectrally, returning node values."""
    samples = np.asarray(samples)
    n = samples.size
    k = freqs(n)
    mult = (1j * k) ** order
    if n % 2 == 0:
        # zero the Nyquist mode: its derivative is not representable
        mult[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(samples) * mult)


def diff_coeffs(c: np.ndarray, order: int = 1) -> np.ndarray:
    """Coefficients of the derivative series."""
    c = np.asarray(c)
    n = c.size
    mult = (1j * freqs(n)) ** order
    if n % 2 == 0:
        mult[n // 2] = 0.0
    return c * mult


def trapezoid(samples: np.ndarray) -> complex:
    """Periodic trapezoid rule: (2*pi/N) * sum of samples."""
    samples = np.asarray(samples)
    return 2.0 * np.pi * samples.sum() / samples.size


def refine(samples: np.ndarray, factor: int) -> np.ndarray:
    """Resample periodic data on a grid `factor` times finer (zero padding)."""
    samples = np.asarray(samples)
    n = samples.size
    m = n * factor
    c = np.fft.fft(samples)
    cpad = np.zeros(m, dtype=complex)
    half = n // 2
    cpad[:half] = c[:half]
    cpad[-half:] = c[-half:]
    if n % 2 == 0:
        # split the Nyquist mode across +-n/2
        cpad[half] = 0.5 * c[half]
        cpad[m - half] = 0.5 * c[half]
    vals = np.fft.ifft(cpad) * factor
    if np.isrealobj(samples):
        return vals.real
    return vals


def argmin_refined(samples: np.ndarray, newton_steps: int = 8):
    """Locate the minimum of the interpolant of real periodic samples.

    Returns (t_min, value). Starts from the discrete argmin and runs Newton
    on the derivative of the interpolant.
    """
    return _extremum(samples, sign=+1.0, newton_steps=newton_steps)


def argmax_refined(samples: np.ndarray, newton_steps: int = 8):
    """Locate the maximum of the interpolant of real periodic samples."""
    t, v = _extremum(-np.asarray(samples, dtype=float), sign=+1.0,
                     newton_steps=newton_steps)
    return t, -v


def _extremum(samples, sign, newton_steps):
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    c = coeffs(samples)
    dc = diff_coeffs(c)
    d2c = diff_coeffs(c, 2)
    t = nodes(n)[int(np.argmin(sign * samples))]
    for _ in range(newton_steps):
        g = np.real(eval_series(dc, t))
        h = np.real(eval_series(d2c, t))
        if h == 0.0:
            break
        step = g / h
        # keep Newton local: never jump more than one node spacing
        step = np.clip(step, -2.0 * np.pi / n, 2.0 * np.pi / n)
        t = t - step
    return float(t % (2.0 * np.pi)), float(np.real(eval_series(c, t)))
