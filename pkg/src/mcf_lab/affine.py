"""One-parameter affine families ``F(x, t) = R(t) F0(x) + T(t)``.

``R(t)`` (with positive determinant) is factored as ``U(t) s(t) V(t)``:
``U`` special orthogonal, ``s > 0`` a scalar and ``V`` upper triangular with
``V[0, 0] = 1``.  Differentiating at ``t = 0`` splits the generator ``R'(0)``
into a skew part (rotation), a scalar part (scaling) and a strictly upper
part, and the family is self-similar at the generator level iff the last one
vanishes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import DifferentiationError, ParamError, SingularMatrix

__all__ = ["AffineFamily", "USVDecomposition", "usv_decompose", "InfinitesimalSplit",
           "infinitesimal_split", "FamilyVerdict", "classify_family", "rotation_matrix",
           "named_family", "NAMED_FAMILIES", "fd_weights"]


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class USVDecomposition:
    U: np.ndarray
    s: float
    V: np.ndarray

    def matrix(self):
        return self.s * self.U @ self.V


def usv_decompose(R) -> USVDecomposition:
    """Factor ``R = U (s I) V`` through QR with a positive triangular diagonal.

    Raises
    ------
    SingularMatrix
        ``det R <= 0`` or ``R`` numerically rank-deficient.
    """
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError("R must be square")
    if not np.all(np.isfinite(R)):
        raise SingularMatrix("R has non-finite entries")
    Q, T = np.linalg.qr(R)
    d = np.sign(np.diag(T))
    d[d == 0] = 1.0
    Q, T = Q * d, d[:, None] * T
    diag = np.diag(T)
    if np.min(diag) <= np.finfo(float).eps * max(np.max(np.abs(diag)), 1e-300) * R.shape[0]:
        raise SingularMatrix("R is rank-deficient")
    if np.linalg.det(R) <= 0:
        raise SingularMatrix("det R must be positive")
    s = float(T[0, 0])
    return USVDecomposition(Q, s, np.triu(T / s))


def fd_weights(nodes, order: int = 1, at: float = 0.0) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``at`` (Fornberg)."""
    z = np.asarray(nodes, dtype=float) - at
    n = len(z)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@dataclass(frozen=True, eq=False)
class AffineFamily:
    """``R(t), T(t)`` given as callables or as samples ``(t_i, R_i, T_i)``."""

    n: int
    R: Optional[Callable] = None
    T: Optional[Callable] = None
    samples: Optional[tuple] = None
    name: str = "family"
    h: float = 1e-3

    def __post_init__(self):
        if (self.R is None) == (self.samples is None):
            raise ValueError("give exactly one of R or samples")
        if self.samples is not None:
            ts, Rs, Ts = self.samples
            ts = np.asarray(ts, dtype=float)
            Rs = np.asarray(Rs, dtype=float).reshape(len(ts), self.n, self.n)
            Ts = np.zeros((len(ts), self.n)) if Ts is None else np.asarray(Ts, dtype=float).reshape(len(ts), self.n)
            order = np.argsort(ts)
            object.__setattr__(self, "samples", (ts[order], Rs[order], Ts[order]))
        R0, T0 = self._at_zero()
        if R0 is not None and (np.max(np.abs(R0 - np.eye(self.n))) > 1e-9 or np.max(np.abs(T0)) > 1e-9):
            raise ParamError("family must satisfy R(0) = I and T(0) = 0")

    @classmethod
    def from_samples(cls, ts, Rs, Ts=None, name="sampled"):
        Rs = np.asarray(Rs, dtype=float)
        return cls(Rs.shape[-1], samples=(ts, Rs, Ts), name=name)

    @classmethod
    def from_json(cls, doc: dict):
        """``{"n": 2, "samples": [[t, R, T], ...]}`` or ``{"named": "shear", ...params}``."""
        if "named" in doc:
            params = {k: v for k, v in doc.items() if k != "named"}
            return named_family(doc["named"], **params)
        unknown = set(doc) - {"n", "samples", "name"}
        if unknown:
            raise ValueError(f"unknown affine keys: {sorted(unknown)}")
        rows = doc["samples"]
        ts = [r[0] for r in rows]
        Rs = [r[1] for r in rows]
        Ts = [r[2] if len(r) > 2 else [0.0] * doc["n"] for r in rows]
        return cls(int(doc["n"]), samples=(ts, Rs, Ts), name=doc.get("name", "sampled"))

    def _at_zero(self):
        if self.R is not None:
            T0 = np.zeros(self.n) if self.T is None else np.asarray(self.T(0.0), dtype=float)
            return np.asarray(self.R(0.0), dtype=float), T0
        ts, Rs, Ts = self.samples
        hit = np.flatnonzero(np.abs(ts) < 1e-14)
        return (Rs[hit[0]], Ts[hit[0]]) if len(hit) else (None, None)

    def stencil(self):
        """Times, matrices and translations used to differentiate at ``t = 0``."""
        if self.R is not None:
            ts = self.h * np.arange(-2, 3)
            Rs = np.array([self.R(t) for t in ts], dtype=float)
            Ts = np.array([np.zeros(self.n) if self.T is None else self.T(t) for t in ts], dtype=float)
            return ts, Rs, Ts
        ts, Rs, Ts = self.samples
        if len(ts) < 5:
            raise DifferentiationError(f"need at least 5 samples, got {len(ts)}")
        idx = np.sort(np.argsort(np.abs(ts))[:5])
        if not (ts[idx].min() < 0.0 < ts[idx].max()):
            raise DifferentiationError("samples nearest t=0 do not straddle it")
        return ts[idx], Rs[idx], Ts[idx]


@dataclass(frozen=True)
class InfinitesimalSplit:
    skew: np.ndarray
    scalar: float
    upper: np.ndarray
    translation: np.ndarray
    generator: np.ndarray

    def reconstruction_error(self) -> float:
        n = len(self.skew)
        return float(np.max(np.abs(self.skew + self.scalar * np.eye(n) + self.upper - self.generator)))


def infinitesimal_split(family: AffineFamily) -> InfinitesimalSplit:
    """Derivatives at ``t = 0`` of the factors ``U``, ``s I`` and ``V`` and of ``T``.

    Each factor is differentiated with a five-point stencil (fourth order for
    symmetric spacing).  ``generator`` is the directly differenced ``R'(0)``.

    Raises
    ------
    DifferentiationError
        Too few samples around ``t = 0``, or a sample that cannot be factored.
    """
    ts, Rs, Ts = family.stencil()
    w = fd_weights(ts)
    try:
        facs = [usv_decompose(R) for R in Rs]
    except SingularMatrix as exc:
        raise DifferentiationError(f"cannot factor a sample: {exc}") from None
    dU = np.tensordot(w, np.array([f.U for f in facs]), axes=1)
    ds = float(np.dot(w, [f.s for f in facs]))
    dV = np.tensordot(w, np.array([f.V for f in facs]), axes=1)
    dT = np.tensordot(w, Ts, axes=1)
    dR = np.tensordot(w, Rs, axes=1)
    skew = 0.5 * (dU - dU.T)
    upper = np.triu(dV)
    upper[0, 0] = 0.0
    return InfinitesimalSplit(skew, ds, upper, dT, dR)


class FamilyVerdict(str, Enum):
    SELF_SIMILAR = "SelfSimilar"
    SHEAR_GENERATOR = "ShearGenerator"
    INDETERMINATE = "Indeterminate"


def classify_family(family: AffineFamily, tol: float = 1e-8):
    """Classify the generator of an affine family.

    The strictly upper part is measured relative to ``||R'(0)||`` so the
    verdict does not change under ``t -> c t``.  A linear generator with
    norm below ``tol`` (identity or pure translation) counts as self-similar.  Returns ``(verdict, note)``;
    the note records that a shear generator may still move the curve only
    tangentially, which is not decided here.
    """
    sp = infinitesimal_split(family)
    scale = float(np.linalg.norm(sp.generator))
    ratio = float(np.linalg.norm(sp.upper)) / scale if scale > tol else 0.0
    if ratio <= tol:
        return FamilyVerdict.SELF_SIMILAR, "generator = rotation + scaling"
    if ratio >= 100 * tol:
        return FamilyVerdict.SHEAR_GENERATOR, ("strictly upper generator present; a solution of the flow "
                                                "requires it to act tangentially (not checked)")
    return FamilyVerdict.INDETERMINATE, f"relative upper part {ratio:.3e} in dead zone"


def _shear(n=2, rate=1.0):
    def R(t):
        M = np.eye(n)
        M[0, 1] = rate * t
        return M
    return R


NAMED_FAMILIES = {
    "identity": lambda n=2: AffineFamily(n, R=lambda t: np.eye(n), name="identity"),
    "shear": lambda n=2, rate=1.0: AffineFamily(n, R=_shear(n, rate), name="shear"),
    "rotation": lambda omega=1.0: AffineFamily(2, R=lambda t: rotation_matrix(omega * t), name="rotation"),
    "shrinker": lambda n=2: AffineFamily(n, R=lambda t: np.sqrt(1 - 2 * t) * np.eye(n), name="shrinker"),
    "spiral": lambda: AffineFamily(2, R=lambda t: np.exp(t) * rotation_matrix(t), name="spiral"),
    "translator": lambda n=2: AffineFamily(n, R=lambda t: np.eye(n), T=lambda t: t * np.eye(n)[-1],
                                           name="translator"),
}


def named_family(name: str, time_scale: float = 1.0, **params) -> AffineFamily:
    """A closed-form family, optionally reparametrised by ``t -> time_scale * t``."""
    if name not in NAMED_FAMILIES:
        raise KeyError(f"unknown family {name!r}; choose from {sorted(NAMED_FAMILIES)}")
    fam = NAMED_FAMILIES[name](**params)
    if time_scale == 1.0:
        return fam
    R, T = fam.R, fam.T
    return AffineFamily(fam.n, R=lambda t: R(time_scale * t),
                        T=None if T is None else (lambda t: T(time_scale * t)),
                        name=f"{fam.name}(t*{time_scale:g})")
