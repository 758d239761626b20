"""Coefficient distributions, seeded sampling, and polynomial evaluation.

Coefficients are stored in ascending order (c0 first).  Everything here is
pure: sampling is a deterministic function of (distribution, degree, master
seed, trial index), and all returned objects are immutable, so values can be
shared freely between worker processes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDegreeError, DegenerateReciprocalError

RADEMACHER = "rademacher"
GAUSSIAN_REAL = "gaussian_real"
GAUSSIAN_COMPLEX = "gaussian_complex"
UNIFORM_INT_CENTERED = "uniform_int_centered"
UNIFORM_INT_RAW = "uniform_int_raw"
FIXED = "fixed"

KINDS = (RADEMACHER, GAUSSIAN_REAL, GAUSSIAN_COMPLEX,
         UNIFORM_INT_CENTERED, UNIFORM_INT_RAW, FIXED)

# Degrees above this use compensated (Kahan) accumulation in Horner loops.
COMPENSATION_THRESHOLD = 512


@dataclass(frozen=True)
class CoefficientDistribution:
    """A named coefficient law for random polynomials.

    ``kind`` is one of :data:`KINDS`.  ``k`` is the support size for the
    uniform-integer kinds (values 1..k before centering).  ``coeffs`` pins an
    explicit coefficient sequence for the ``fixed`` kind, which exists for
    wiring checks.
    """

    kind: str
    k: int = 240
    coeffs: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind in (UNIFORM_INT_CENTERED, UNIFORM_INT_RAW) and self.k < 2:
            raise ValueError("uniform integer kinds need k >= 2")
        if self.kind == FIXED and not self.coeffs:
            raise ValueError("fixed kind needs explicit coefficients")

    @property
    def is_complex(self) -> bool:
        return self.kind == GAUSSIAN_COMPLEX

    @property
    def mean_zero_unit_variance(self) -> bool:
        return self.kind in (RADEMACHER, GAUSSIAN_REAL, GAUSSIAN_COMPLEX,
                             UNIFORM_INT_CENTERED)

    @property
    def theorem_eligible(self) -> bool:
        """Mean zero, unit variance, and no atom at zero.

        Centered uniform integers hit zero exactly when k is odd, so only
        even k qualifies.
        """
        if self.kind in (RADEMACHER, GAUSSIAN_REAL, GAUSSIAN_COMPLEX):
            return True
        if self.kind == UNIFORM_INT_CENTERED:
            return self.k % 2 == 0
        return False

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == RADEMACHER:
            return rng.integers(0, 2, size).astype(np.float64) * 2.0 - 1.0
        if self.kind == GAUSSIAN_REAL:
            return rng.standard_normal(size)
        if self.kind == GAUSSIAN_COMPLEX:
            return (rng.standard_normal(size)
                    + 1j * rng.standard_normal(size)) / math.sqrt(2.0)
        if self.kind == UNIFORM_INT_CENTERED:
            u = rng.integers(1, self.k + 1, size).astype(np.float64)
            sigma = math.sqrt((self.k ** 2 - 1) / 12.0)
            return (u - (self.k + 1) / 2.0) / sigma
        if self.kind == UNIFORM_INT_RAW:
            return rng.integers(1, self.k + 1, size).astype(np.float64)
        # fixed
        if size != len(self.coeffs):
            raise ValueError(
                f"fixed distribution has {len(self.coeffs)} coefficients, "
                f"requested {size}")
        return np.asarray(self.coeffs, dtype=np.float64)


@dataclass(frozen=True)
class Coefficients:
    """An immutable coefficient sequence c0..cn with nonzero leading term."""

    coeffs: np.ndarray
    seed_provenance: tuple | str = "manual"

    def __post_init__(self):
        arr = np.asarray(self.coeffs)
        if arr.ndim != 1 or arr.size < 2:
            raise DegenerateDegreeError("need at least two coefficients (degree >= 1)")
        if not np.iscomplexobj(arr):
            arr = arr.astype(np.float64)
        else:
            arr = arr.astype(np.complex128)
        if arr[-1] == 0:
            raise DegenerateDegreeError("leading coefficient is zero")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    def to_json(self) -> str:
        if self.is_real:
            entries = [float(c) for c in self.coeffs]
        else:
            entries = [[float(c.real), float(c.imag)] for c in self.coeffs]
        return json.dumps({"degree": self.degree, "coeffs": entries})

    @classmethod
    def from_json(cls, text: str) -> "Coefficients":
        obj = json.loads(text)
        raw = obj["coeffs"]
        if any(isinstance(e, list) for e in raw):
            arr = np.array([complex(e[0], e[1]) if isinstance(e, list) else complex(e)
                            for e in raw])
        else:
            arr = np.array(raw, dtype=np.float64)
        if obj.get("degree") is not None and obj["degree"] != len(raw) - 1:
            raise ValueError("stated degree does not match coefficient count")
        return cls(arr)


@dataclass(frozen=True)
class EvalResult:
    """Value and first two derivatives at a point, plus a magnitude scale.

    ``scale`` is sum_k |c_k| |z|^k, the natural normalizer for residuals.
    """

    f: complex
    fp: complex
    fpp: complex
    scale: float


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Counter-derived stream for one trial: independent of scheduling order."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def sample_kac(dist: CoefficientDistribution, n: int, master_seed: int,
               trial: int) -> Coefficients:
    """Draw the n+1 coefficients of a random degree-n polynomial.

    Deterministic in (dist, n, master_seed, trial).  Raises
    DegenerateDegreeError if the terminal draw is zero (impossible for the
    built-in random kinds, possible for ``fixed``).
    """
    if n < 1:
        raise ValueError("degree must be >= 1")
    rng = trial_rng(master_seed, trial)
    draws = dist.draw(rng, n + 1)
    if draws[-1] == 0:
        raise DegenerateDegreeError("terminal coefficient draw was zero")
    return Coefficients(draws, seed_provenance=(master_seed, trial))


def _horner3(coeffs: np.ndarray, z, compensated: bool):
    """One pass computing p(z), p'(z), p''(z)/2 (returned as p'') and scale."""
    b = coeffs[-1] * np.ones_like(z)
    d = np.zeros_like(b)
    e = np.zeros_like(b)
    az = np.abs(z)
    s = np.abs(coeffs[-1]) * np.ones_like(az)
    if not compensated:
        for c in coeffs[-2::-1]:
            e = e * z + d
            d = d * z + b
            b = b * z + c
            s = s * az + abs(c)
    else:
        cb = np.zeros_like(b)
        cd = np.zeros_like(b)
        ce = np.zeros_like(b)
        for c in coeffs[-2::-1]:
            # Kahan-compensated additions on each accumulator
            t = e * z
            y = d - ce
            e = t + y
            ce = (e - t) - y
            t = d * z
            y = b - cd
            d = t + y
            cd = (d - t) - y
            t = b * z
            y = c - cb
            b = t + y
            cb = (b - t) - y
            s = s * az + abs(c)
    return b, d, 2.0 * e, s


def evaluate(p: Coefficients, z: complex) -> EvalResult:
    """Horner evaluation of f, f', f'' at z with a residual scale.

    Intended for |z| up to about 1 + O(1/degree); for much larger |z| the
    scale can overflow while the log-space helpers below stay finite.
    """
    z = complex(z)
    comp = p.degree > COMPENSATION_THRESHOLD
    f, fp, fpp, s = _horner3(p.coeffs, np.complex128(z), comp)
    return EvalResult(complex(f), complex(fp), complex(fpp), float(s))


def _split_by_modulus(z: np.ndarray):
    inside = np.abs(z) <= 1.0
    return inside, ~inside


def _horner_value(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full_like(z, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def log_abs_poly(p: Coefficients, z: np.ndarray) -> np.ndarray:
    """log|p(z)| elementwise, stable for any modulus.

    Outside the unit circle the reversed-coefficient form
    p(z) = z^n * prev(1/z) is used, so |z|^n is never materialized.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    n = p.degree
    out = np.empty(z.shape, dtype=np.float64)
    inside, outside = _split_by_modulus(z)
    if inside.any():
        with np.errstate(divide="ignore"):
            out[inside] = np.log(np.abs(_horner_value(p.coeffs, z[inside])))
    if outside.any():
        u = 1.0 / z[outside]
        with np.errstate(divide="ignore"):
            out[outside] = (n * np.log(np.abs(z[outside]))
                            + np.log(np.abs(_horner_value(p.coeffs[::-1], u))))
    return out


def log_abs_deriv(p: Coefficients, z: np.ndarray) -> np.ndarray:
    """log|p'(z)| elementwise, with the same overflow-safe split."""
    n = p.degree
    dcoeffs = p.coeffs[1:] * np.arange(1, n + 1)
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = np.empty(z.shape, dtype=np.float64)
    inside, outside = _split_by_modulus(z)
    if inside.any():
        with np.errstate(divide="ignore"):
            out[inside] = np.log(np.abs(_horner_value(dcoeffs, z[inside])))
    if outside.any():
        u = 1.0 / z[outside]
        with np.errstate(divide="ignore"):
            out[outside] = ((n - 1) * np.log(np.abs(z[outside]))
                            + np.log(np.abs(_horner_value(dcoeffs[::-1], u))))
    return out


def newton_ratio(p: Coefficients, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z) elementwise without overflow.

    For |z| > 1, with q(u) = u^n p(1/u) (reversed coefficients),
    p/p' at z = 1/u equals q(u) / (u * (n q(u) - u q'(u))).
    """
    n = p.degree
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(z.shape, dtype=np.complex128)
    inside, outside = _split_by_modulus(z)
    if inside.any():
        zi = z[inside]
        b = np.full_like(zi, p.coeffs[-1])
        d = np.zeros_like(zi)
        for c in p.coeffs[-2::-1]:
            d = d * zi + b
            b = b * zi + c
        with np.errstate(divide="ignore", invalid="ignore"):
            out[inside] = b / d
    if outside.any():
        u = 1.0 / z[outside]
        rev = p.coeffs[::-1]
        qb = np.full_like(u, rev[-1])
        qd = np.zeros_like(u)
        for c in rev[-2::-1]:
            qd = qd * u + qb
            qb = qb * u + c
        with np.errstate(divide="ignore", invalid="ignore"):
            out[outside] = qb / (u * (n * qb - u * qd))
    return out


def relative_residual(p: Coefficients, z: np.ndarray) -> np.ndarray:
    """|p(z)| / sum_k |c_k||z|^k elementwise, stable for any modulus."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = np.empty(z.shape, dtype=np.float64)
    inside, outside = _split_by_modulus(z)
    aco = np.abs(p.coeffs)
    if inside.any():
        zi = z[inside]
        val = _horner_value(p.coeffs, zi)
        sc = _horner_value(aco.astype(np.complex128), np.abs(zi).astype(np.complex128))
        out[inside] = np.abs(val) / np.abs(sc)
    if outside.any():
        u = 1.0 / z[outside]
        val = _horner_value(p.coeffs[::-1], u)
        sc = _horner_value(aco[::-1].astype(np.complex128),
                           np.abs(u).astype(np.complex128))
        out[outside] = np.abs(val) / np.abs(sc)
    return out


def reciprocal(p: Coefficients) -> Coefficients:
    """Coefficient reversal; roots map to their reciprocals."""
    if p.coeffs[0] == 0:
        raise DegenerateReciprocalError("constant coefficient is zero")
    return Coefficients(np.array(p.coeffs[::-1]), seed_provenance="manual")


def derivative_coefficients(p: Coefficients, order: int) -> np.ndarray:
    """Ascending coefficients of the order-th derivative."""
    c = np.array(p.coeffs)
    for _ in range(order):
        c = c[1:] * np.arange(1, c.size)
    return c


def circle_values(coeffs: np.ndarray, radius: float, grid_points: int) -> np.ndarray:
    """Values of the polynomial on the uniform angular grid at given radius.

    Entry j is the value at radius * exp(2*pi*i*j/grid_points), computed in
    one FFT pass.
    """
    scaled = np.asarray(coeffs, dtype=np.complex128) * (radius ** np.arange(coeffs.size))
    return np.fft.ifft(scaled, grid_points) * grid_points


def circle_extremes(p: Coefficients, radius: float, grid_points: int,
                    deriv_order: int = 0):
    """Grid max/min of |f^(deriv_order)| on the circle of given radius.

    Returns (max, min, argmin_angle).  This is a grid approximation, not a
    certified global extremum.
    """
    if deriv_order not in (0, 1, 2):
        raise ValueError("deriv_order must be 0, 1 or 2")
    if grid_points < 16 * (p.degree + 1):
        raise ValueError("grid_points must be at least 16*(degree+1)")
    c = derivative_coefficients(p, deriv_order)
    mags = np.abs(circle_values(c, radius, grid_points))
    jmin = int(np.argmin(mags))
    return float(mags.max()), float(mags.min()), 2.0 * math.pi * jmin / grid_points
