"""Finite Jacobi sections, sign-flip symmetry, comparison operators and form inequalities"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidParametersError
from .sequences import CoefficientSequence, Decomposition, coefficients

log = logging.getLogger(__name__)

DEFAULT_MARGIN = 10


@dataclass(frozen=True, eq=False)
class TruncatedJacobi:
    """
    Dirichlet section of a Jacobi matrix on sites 1..n.

    Only the diagonal (b_1..b_n) and the upper line (a_1..a_{n-1}) are stored;
    the arrays are made read-only on construction.
    """
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=np.float64)
        offdiag = np.array(self.offdiag, dtype=np.float64)
        if diag.ndim != 1 or offdiag.ndim != 1 or offdiag.size != max(diag.size - 1, 0):
            raise InvalidParametersError(
                f"section needs n diagonal and n-1 off-diagonal entries, got {diag.size} and {offdiag.size}"
            )
        if offdiag.size and not np.all(offdiag > 0):
            k = int(np.flatnonzero(~(offdiag > 0))[0]) + 1
            raise InvalidParametersError(f"off-diagonal a_{k} = {offdiag[k - 1]} is not positive")
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def n(self) -> int:
        return self.diag.size

    @classmethod
    def free(cls, n: int) -> 'TruncatedJacobi':
        """The free section (a = 1, b = 0)"""
        return cls(np.zeros(n), np.ones(n - 1))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def quadratic_form(self, u) -> float:
        """<u, J u> for a vector on sites 1..n"""
        u = np.asarray(u, dtype=np.float64)
        return float(np.dot(self.diag, u * u) + 2.0 * np.dot(self.offdiag, u[:-1] * u[1:]))

    def norm_bound(self) -> float:
        """Gershgorin bound on the operator norm"""
        row = np.abs(self.diag).copy()
        row[:-1] += self.offdiag
        row[1:] += self.offdiag
        return float(row.max())

    def to_csv(self, path) -> Path:
        """Write index, b, a rows (the last row has no a entry)"""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "b", "a"])
            for k in range(self.n):
                a = "%.17g" % self.offdiag[k] if k < self.n - 1 else ""
                writer.writerow([k + 1, "%.17g" % self.diag[k], a])
        return path


@dataclass(frozen=True)
class ShiftedSequences:
    """A sequence on sites 1..n with its shifts: tilde_n = x_{n+1}, sharp_n = x_{n-1}"""
    base: np.ndarray
    tilde: np.ndarray
    sharp: np.ndarray


def shifted(x: np.ndarray, n: int, sharp_first: float) -> ShiftedSequences:
    """
    Shifts of x (x[0] is site 1, at least n+1 entries) restricted to sites 1..n.

    sharp_first is the boundary value x_0 used for sharp_1.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < n + 1:
        raise InvalidParametersError(f"sequence covers {x.size} sites, {n + 1} needed")
    sharp = np.empty(n)
    sharp[0] = sharp_first
    sharp[1:] = x[:n - 1]
    return ShiftedSequences(base=x[:n].copy(), tilde=x[1:n + 1].copy(), sharp=sharp)


def truncate(seq: CoefficientSequence, n: int) -> TruncatedJacobi:
    """Section on sites 1..n with diag b_k and offdiag a_k"""
    if n < 2:
        raise InvalidParametersError(f"section size must be >= 2, got {n}")
    a, b = coefficients(seq, n)
    return TruncatedJacobi(b, a[:n - 1])


def flip_sign(J: TruncatedJacobi) -> TruncatedJacobi:
    """b -> -b; conjugation by diag((-1)^k) makes the spectrum the negation of J's"""
    return TruncatedJacobi(-J.diag, J.offdiag)


def comparison_operators(f, n: int) -> Tuple[TruncatedJacobi, TruncatedJacobi]:
    """Free sections with diagonals +2(f_k^2 + f_{k+1}^2) and -2(f_k^2 + f_{k+1}^2)"""
    f = shifted(f, n, 0.0)
    diag = 2.0 * (f.base ** 2 + f.tilde ** 2)
    ones = np.ones(n - 1)
    return TruncatedJacobi(diag, ones), TruncatedJacobi(-diag, ones)


def potential_W(dec: Decomposition, n: int) -> np.ndarray:
    """
    Comparison potential of the general divergence-form bound.

    W_k = 2e_k + 2|c_k| + 2|c#_k| + 12[f_k^2 + f_{k+1}^2] + 48[d#_k^2 + 2d_k^2 + d_{k+1}^2]
    with c#_1 = 0 and d#_1 = d_1 (a_0 = 1 forces d_0 = d_1).
    """
    if n > dec.horizon:
        raise InvalidParametersError(f"decomposition covers sites 1..{dec.horizon + 1}, W needs 1..{n + 1}")
    c = shifted(dec.c, n, 0.0)
    d = shifted(dec.d, n, dec.d[0])
    f = shifted(dec.f, n, 0.0)
    e = dec.e[:n]
    return (2 * e + 2 * np.abs(c.base) + 2 * np.abs(c.sharp)
            + 12 * (f.base ** 2 + f.tilde ** 2)
            + 48 * (d.sharp ** 2 + 2 * d.base ** 2 + d.tilde ** 2))


def form_gap(J: TruncatedJacobi, W, margin: int = DEFAULT_MARGIN) -> float:
    """
    Smallest eigenvalue of (2 - J) - 1/2 (2 - J_0 - W) on vectors vanishing on the last `margin` sites.

    Nonnegative exactly when 2 - J >= 1/2 (2 - J_0 - W) holds on those vectors.
    """
    if not 0 <= margin < J.n:
        raise InvalidParametersError(f"margin must lie in [0, {J.n}), got {margin}")
    W = np.asarray(W, dtype=np.float64)
    if W.size < J.n:
        raise InvalidParametersError(f"W covers {W.size} sites, section has {J.n}")
    m = J.n - margin
    d = 1.0 - J.diag[:m] + 0.5 * W[:m]
    e = 0.5 - J.offdiag[:m - 1]
    if m == 1:
        return float(d[0])
    gap = eigh_tridiagonal(d, e, eigvals_only=True, select='i', select_range=(0, 0))
    return float(gap[0])


def dirichlet_energy(u) -> float:
    """sum |u(n+1) - u(n)|^2 with u extended by zero on both sides"""
    u = np.asarray(u, dtype=np.float64)
    return float(np.sum(np.diff(u, prepend=0.0, append=0.0) ** 2))


def sbp_bound_check(u, f) -> Tuple[float, float]:
    """
    Summation-by-parts bound |<u, b u>| <= <u,(2-H_0)u>^(1/2) [2 <u,(f^2 + f~^2) u>]^(1/2).

    u lives on consecutive whole-line sites k = 0..m-1; f holds f_k for k = 0..m
    and b_k = f_{k+1} - f_k.
    """
    u = np.asarray(u, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if f.size != u.size + 1:
        raise InvalidParametersError(f"f needs {u.size + 1} entries for a vector of length {u.size}")
    u2 = u * u
    b = np.diff(f)
    lhs = abs(float(np.dot(b, u2)))
    weight = 2.0 * float(np.dot(f[:-1] ** 2 + f[1:] ** 2, u2))
    rhs = float(np.sqrt(dirichlet_energy(u)) * np.sqrt(weight))
    return lhs, rhs
