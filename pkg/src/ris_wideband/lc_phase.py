"""Frequency-dependent phase response of liquid-crystal unit cells.

Device semantics: the center-frequency profile omega_c lives in [0, 2*pi);
at frequency f each element applies beta_factor(f) * omega_c, *unwrapped*
(downstream only ever exponentiates, so wrapping is immaterial, and the
unwrapped product is the physical dispersion law). Matrix Hadamard powers
used by the SDP linearization take entry phases on the principal branch
(-pi, pi]; rank-one powers go through the factor, mirroring how the rank/PSD
preservation result is actually proved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .scenario import LcMaterial

TWO_PI = 2.0 * math.pi


class DispersionError(ValueError):
    pass


def beta_factor(f, f_c: float, beta: float):
    """Per-frequency phase scaling 1 + beta*(f/f_c - 1)."""
    if f_c <= 0:
        raise DispersionError("center frequency must be > 0")
    return 1.0 + beta * (np.asarray(f, float) / f_c - 1.0)


def validate_band(f_lo: float, f_hi: float, f_c: float, beta: float) -> None:
    """The dispersion model needs beta_k > 0 across the configured band."""
    if min(beta_factor(f_lo, f_c, beta), beta_factor(f_hi, f_c, beta)) <= 0:
        raise DispersionError("dispersion model invalid for bandwidth: beta_k <= 0 in band")


@dataclass(frozen=True)
class PhaseProfile:
    """Center-frequency phase vector plus the dispersion slope."""
    omega_c: np.ndarray          # radians, each in [0, 2*pi)
    beta: float
    f_c: float

    def __post_init__(self):
        om = np.asarray(self.omega_c, float)
        if om.ndim != 1:
            raise ValueError("omega_c must be a vector")
        if np.any(om < 0) or np.any(om >= TWO_PI):
            raise ValueError("omega_c entries must lie in [0, 2*pi)")
        object.__setattr__(self, "omega_c", om)

    @property
    def n(self) -> int:
        return self.omega_c.size


def phases_at_frequency(profile: PhaseProfile, f) -> np.ndarray:
    """omega(f) = omega_c * beta_factor(f); unwrapped, may exceed 2*pi."""
    bk = beta_factor(f, profile.f_c, profile.beta)
    return profile.omega_c * bk


def reflection_coefficients(profile: PhaseProfile, f, amplitude=1.0) -> np.ndarray:
    """Diagonal of the reflection matrix: Omega_n * exp(j*omega_n(f))."""
    return np.asarray(amplitude) * np.exp(1j * phases_at_frequency(profile, f))


def phase_vector(profile: PhaseProfile, f) -> np.ndarray:
    """Unit-modulus s_k = exp(j * omega(f))."""
    return np.exp(1j * phases_at_frequency(profile, f))


def profile_from_complex(s: np.ndarray, beta: float, f_c: float) -> PhaseProfile:
    """Entrywise phases of a unit-modulus vector, mapped into [0, 2*pi)."""
    om = np.mod(np.angle(np.asarray(s)), TWO_PI)
    om[om >= TWO_PI] = 0.0  # guard the mod boundary
    return PhaseProfile(omega_c=om, beta=beta, f_c=f_c)


def max_phase_range(material: LcMaterial, f: float, f_c: float, beta: float) -> float:
    """Tuning range 2*pi*l*dn_max*(f_c + beta*(f - f_c))/c; reporting only."""
    return (TWO_PI * material.length_m * material.birefringence
            * (f_c + beta * (f - f_c)) / SPEED_OF_LIGHT)


def phase_to_voltage(material: LcMaterial, omega_c: np.ndarray) -> np.ndarray:
    """Invert the empirical voltage->phase table by piecewise-linear interpolation."""
    return np.interp(np.asarray(omega_c, float),
                     np.asarray(material.phase_rad, float),
                     np.asarray(material.voltage_v, float))


# ---------------------------------------------------------------------------
# Hadamard powers
# ---------------------------------------------------------------------------

def entrywise_power(m: np.ndarray, p: float, *, min_modulus: float = 1e-12) -> np.ndarray:
    """Principal-branch entrywise power |m|^p * exp(j*p*Arg(m)).

    Raises when an entry's modulus is below min_modulus and p < 1 would need
    it (degenerate Taylor reference).
    """
    m = np.asarray(m, np.complex128)
    mod = np.abs(m)
    if p < 1.0 and np.any(mod < min_modulus):
        raise ValueError("Taylor reference degenerate: entry modulus below 1e-12")
    with np.errstate(divide="ignore"):
        out = mod ** p * np.exp(1j * p * np.angle(m))
    out[mod == 0.0] = 0.0
    return out


def rank_one_power(s_or_matrix: np.ndarray, p: float) -> np.ndarray:
    """Hadamard power of a rank-one PSD unit-diagonal matrix via its factor.

    The factor's entry phases are mapped to [0, 2*pi) (device branch), scaled
    by p, and re-outer-producted; this preserves rank one, PSD-ness and the
    unit diagonal exactly for any p.
    """
    m = np.asarray(s_or_matrix, np.complex128)
    if m.ndim == 1:
        s = m
    else:
        w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
        s = v[:, -1]
        mod = np.abs(s)
        mod[mod == 0.0] = 1.0
        s = s / mod
    om = np.mod(np.angle(s), TWO_PI)
    sp = np.exp(1j * p * om)
    return np.outer(sp, sp.conj())
