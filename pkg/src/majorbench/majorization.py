"""Lorenz cumulants, ensemble fluctuation curves and majorization.

The cumulant vector of a distribution ``p`` over ``N`` outcomes is the prefix
sum of ``p`` sorted in descending order. Across an ensemble of circuits the
per-``k`` standard deviation of these cumulants gives a fluctuation curve,
and the Euclidean distance between two such curves measures how far a device
ensemble is from a reference ensemble.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .core import clean_probabilities

COMPARE_TOL = 1e-12


class AnalysisError(ValueError):
    pass


def _n_from_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise AnalysisError(f"length {dim} is not a power of two >= 2")
    return n


def lorenz_cumulants(p: np.ndarray) -> np.ndarray:
    """Prefix sums of ``p`` sorted in nonincreasing order.

    Accepts one distribution or a stack of them along the last axis.

    >>> lorenz_cumulants(np.array([0.1, 0.5, 0.2, 0.2]))
    array([0.5, 0.7, 0.9, 1. ])
    """
    p = np.asarray(p, dtype=float)
    return np.cumsum(-np.sort(-p, axis=-1), axis=-1)


@dataclass
class FluctuationCurve:
    """Per-``k`` standard deviation of the cumulants over an ensemble."""

    n_qubits: int
    values: np.ndarray
    ensemble_size: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.shape != (2**self.n_qubits,):
            raise AnalysisError(f"expected {2**self.n_qubits} entries, got {self.values.shape}")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise AnalysisError("fluctuation values must be finite and nonnegative")

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.dim + 1)

    @property
    def k_over_n(self) -> np.ndarray:
        return self.k / self.dim


def ensemble_fluctuations(curves: Union[np.ndarray, Sequence[np.ndarray]]) -> FluctuationCurve:
    """Population standard deviation of each cumulant across the ensemble.

    Args:
        curves: ``(M, N)`` array (or list of length-``N`` vectors) of Lorenz
            cumulants, one row per ensemble member.
    """
    if isinstance(curves, np.ndarray):
        arr = np.asarray(curves, dtype=float)
    else:
        if len(curves) == 0:
            raise AnalysisError("empty ensemble")
        dims = {np.shape(c) for c in curves}
        if len(dims) != 1:
            raise AnalysisError(f"ensemble members have mixed dimensions {sorted(dims)}")
        arr = np.array(curves, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise AnalysisError("expected a nonempty (members, N) array")
    n = _n_from_dim(arr.shape[1])
    # shifting by one member leaves the spread unchanged and makes identical
    # members give exactly zero
    return FluctuationCurve(n, (arr - arr[0]).std(axis=0), arr.shape[0])


class MajorizationOrder(enum.Enum):
    Q_MAJORIZES_P = "q_majorizes_p"
    P_MAJORIZES_Q = "p_majorizes_q"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def mirrored(self) -> "MajorizationOrder":
        swap = {MajorizationOrder.Q_MAJORIZES_P: MajorizationOrder.P_MAJORIZES_Q,
                MajorizationOrder.P_MAJORIZES_Q: MajorizationOrder.Q_MAJORIZES_P}
        return swap.get(self, self)


def majorization_compare(p: np.ndarray, q: np.ndarray, tol: float = COMPARE_TOL) -> MajorizationOrder:
    """Order of ``p`` and ``q`` under majorization.

    ``Q_MAJORIZES_P`` means every cumulant of ``q`` is at least the matching
    cumulant of ``p`` (within ``tol``) and some cumulant is strictly larger.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise AnalysisError(f"length mismatch: {p.shape} vs {q.shape}")
    fp = lorenz_cumulants(p)
    fq = lorenz_cumulants(q)
    q_ge = bool(np.all(fq >= fp - tol))
    p_ge = bool(np.all(fp >= fq - tol))
    if q_ge and p_ge:
        return MajorizationOrder.EQUAL
    if q_ge:
        return MajorizationOrder.Q_MAJORIZES_P
    if p_ge:
        return MajorizationOrder.P_MAJORIZES_Q
    return MajorizationOrder.INCOMPARABLE


def _values(c) -> np.ndarray:
    return c.values if isinstance(c, FluctuationCurve) else np.asarray(c, dtype=float)


def distance_to_reference(a: FluctuationCurve, b: FluctuationCurve) -> float:
    """Euclidean distance between two fluctuation curves of equal size."""
    va, vb = _values(a), _values(b)
    if va.shape != vb.shape:
        raise AnalysisError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return float(np.sqrt(np.sum((va - vb) ** 2)))


def _check_f(f: float) -> float:
    f = float(f)
    if not 0.0 <= f <= 1.0:
        raise AnalysisError(f"f must lie in [0, 1], got {f}")
    return f


def white_noise_transform(p: np.ndarray, f: float) -> np.ndarray:
    """Mix ``p`` with the uniform distribution: ``f p + (1 - f) / N``.

    Works on a single vector or a stack of vectors (last axis).
    """
    f = _check_f(f)
    p = np.asarray(p, dtype=float)
    return f * p + (1.0 - f) / p.shape[-1]


def rescale_reference(curve: FluctuationCurve, f: float) -> FluctuationCurve:
    """Fluctuation curve of the white-noise-mixed ensemble (every entry times ``f``)."""
    f = _check_f(f)
    return FluctuationCurve(curve.n_qubits, f * curve.values, curve.ensemble_size)


def estimate_from_shots(samples: Sequence[int], n_qubits: int) -> np.ndarray:
    """Empirical outcome frequencies from measured basis indices."""
    s = np.asarray(samples, dtype=np.int64).reshape(-1)
    if s.size == 0:
        raise AnalysisError("no samples")
    dim = 2**n_qubits
    if s.min() < 0 or s.max() >= dim:
        raise AnalysisError(f"outcome outside [0, {dim})")
    return np.bincount(s, minlength=dim) / s.size


def sample_shots(p: np.ndarray, shots: int, gen: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` basis outcomes from ``p`` and return their frequencies."""
    p = clean_probabilities(p)
    counts = gen.multinomial(shots, p)
    return counts / shots


# ---------------------------------------------------------------------------
# bootstrap error bars


def _bootstrap_weights(m: int, n_boot: int, gen: np.random.Generator) -> np.ndarray:
    return gen.multinomial(m, np.full(m, 1.0 / m), size=n_boot).astype(float) / m


def bootstrap_curves(cumulants: np.ndarray, n_boot: int, gen: np.random.Generator,
                     chunk: int = 64) -> np.ndarray:
    """Fluctuation curves of ``n_boot`` resampled ensembles, shape ``(n_boot, N)``.

    Resampling with replacement is expressed as multinomial weights, so each
    replicate costs two weighted means instead of a gather.
    """
    f = np.asarray(cumulants, dtype=float)
    f = f - f.mean(axis=0)  # centring keeps the second-moment formula accurate
    m = f.shape[0]
    f2 = f * f
    out = np.empty((n_boot, f.shape[1]))
    for start in range(0, n_boot, chunk):
        w = _bootstrap_weights(m, min(chunk, n_boot - start), gen)
        mean = w @ f
        var = w @ f2 - mean * mean
        out[start:start + len(w)] = np.sqrt(np.clip(var, 0.0, None))
    return out


def bootstrap_curve_se(cumulants: np.ndarray, n_boot: int, gen: np.random.Generator) -> np.ndarray:
    """Bootstrap standard error of each entry of the fluctuation curve."""
    return bootstrap_curves(cumulants, n_boot, gen).std(axis=0)


def bootstrap_distance_se(cumulants: np.ndarray, reference: FluctuationCurve, n_boot: int,
                          gen: np.random.Generator) -> float:
    """Bootstrap standard error of the distance from the ensemble's curve to ``reference``.

    The reference is held fixed; only the ensemble members are resampled.
    """
    reps = bootstrap_curves(cumulants, n_boot, gen)
    d = np.sqrt(np.sum((reps - reference.values) ** 2, axis=1))
    return float(d.std())


# ---------------------------------------------------------------------------
# CSV


CSV_COLUMNS = ("k", "k_over_N", "std_F")


def write_curve_csv(path: Union[str, Path], curve: FluctuationCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for k, x, v in zip(curve.k, curve.k_over_n, curve.values):
            w.writerow([int(k), repr(float(x)), repr(float(v))])


def read_curve_csv(path: Union[str, Path], ensemble_size: Optional[int] = None) -> FluctuationCurve:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or any(c not in rows[0] for c in CSV_COLUMNS):
        raise AnalysisError(f"{path}: expected columns {CSV_COLUMNS}")
    ks = np.array([int(r["k"]) for r in rows])
    if not np.array_equal(ks, np.arange(1, len(rows) + 1)):
        raise AnalysisError(f"{path}: k column must run 1..N")
    values = np.array([float(r["std_F"]) for r in rows])
    return FluctuationCurve(_n_from_dim(len(values)), values, ensemble_size or 0)
