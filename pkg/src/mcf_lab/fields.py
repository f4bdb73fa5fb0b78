"""Scalar fields on 2-D coordinate patches and rectangular domains.

A :class:`ScalarField` wraps a callable ``f(p, q)`` that returns the value and
all partial derivatives up to second order as a :class:`Jet2`.  Everything is
vectorised: ``p`` and ``q`` may be scalars or broadcastable numpy arrays.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, SingularDomainError

__all__ = ["Jet2", "ScalarField", "Domain", "Q_LIBRARY", "OneVarFunction"]


class Jet2(NamedTuple):
    """Value and partials to order 2 of a function of two variables ``(p, q)``."""

    f: np.ndarray
    fp: np.ndarray
    fq: np.ndarray
    fpp: np.ndarray
    fpq: np.ndarray
    fqq: np.ndarray


def _broadcast_jet(values, p, q):
    shape = np.broadcast(np.asarray(p, dtype=float), np.asarray(q, dtype=float)).shape
    out = []
    for v in values:
        v = np.asarray(v, dtype=float)
        if v.shape != shape:
            v = np.broadcast_to(v, shape).copy()
        out.append(v if shape else float(v))
    return Jet2(*out)


class ScalarField:
    """A smooth scalar function of two coordinates with analytic partials.

    Parameters
    ----------
    func : callable
        ``func(p, q)`` returning a 6-sequence
        ``(f, f_p, f_q, f_pp, f_pq, f_qq)``.
    name : str, optional
        Label used in reports.
    """

    def __init__(self, func: Callable, name: str = "field"):
        self._func = func
        self.name = name

    def __call__(self, p, q) -> Jet2:
        return _broadcast_jet(self._func(p, q), p, q)

    def value(self, p, q):
        return self(p, q).f

    def __repr__(self):
        return f"ScalarField({self.name!r})"

    @classmethod
    def constant(cls, c: float = 0.0, name: str = None) -> "ScalarField":
        c = float(c)
        return cls(lambda p, q: (c, 0.0, 0.0, 0.0, 0.0, 0.0), name or f"const({c:g})")

    @classmethod
    def from_values(cls, f: Callable, step: float = 1e-5, step2: float = 1e-4,
                    name: str = "fd") -> "ScalarField":
        """Wrap a value-only callable using central differences.

        First partials use ``step``; second partials use the wider ``step2``
        because the 3-point second difference loses ``eps/h**2`` to roundoff.
        """
        h, k = step, step2

        def func(p, q):
            p = np.asarray(p, dtype=float)
            q = np.asarray(q, dtype=float)
            f0 = f(p, q)
            fp = (f(p + h, q) - f(p - h, q)) / (2 * h)
            fq = (f(p, q + h) - f(p, q - h)) / (2 * h)
            fpp = (f(p + k, q) - 2 * f0 + f(p - k, q)) / k**2
            fqq = (f(p, q + k) - 2 * f0 + f(p, q - k)) / k**2
            fpq = (f(p + k, q + k) - f(p + k, q - k) - f(p - k, q + k) + f(p - k, q - k)) / (4 * k * k)
            return f0, fp, fq, fpp, fpq, fqq

        return cls(func, name)

    @classmethod
    def from_expression(cls, expr: str, variables: Sequence[str] = ("u", "v"),
                        name: str = None) -> "ScalarField":
        """Build a field from a sympy-parsable expression string."""
        import sympy as sp

        a, b = sp.symbols(variables)
        e = sp.sympify(expr, locals={variables[0]: a, variables[1]: b})
        parts = [e, e.diff(a), e.diff(b), e.diff(a, 2), e.diff(a, b), e.diff(b, 2)]
        fns = [sp.lambdify((a, b), d, modules="numpy") for d in parts]
        return cls(lambda p, q: tuple(fn(p, q) for fn in fns), name or str(expr))

    def check_partials(self, p, q, step: float = 1e-5) -> float:
        """Largest relative mismatch between declared and differenced partials.

        First partials are compared against central differences of the value,
        second partials against central differences of the first partials.
        The denominator is ``max(|declared|, 1)``.
        """
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        h = step
        j = self(p, q)
        jp_plus, jp_minus = self(p + h, q), self(p - h, q)
        jq_plus, jq_minus = self(p, q + h), self(p, q - h)
        pairs = [
            (j.fp, (jp_plus.f - jp_minus.f) / (2 * h)),
            (j.fq, (jq_plus.f - jq_minus.f) / (2 * h)),
            (j.fpp, (jp_plus.fp - jp_minus.fp) / (2 * h)),
            (j.fpq, (jq_plus.fp - jq_minus.fp) / (2 * h)),
            (j.fqq, (jq_plus.fq - jq_minus.fq) / (2 * h)),
        ]
        worst = 0.0
        for declared, fd in pairs:
            err = np.abs(declared - fd) / np.maximum(np.abs(declared), 1.0)
            worst = max(worst, float(np.max(err)))
        return worst


class OneVarFunction(NamedTuple):
    """A twice differentiable function of one variable: ``(f, f', f'')``."""

    name: str
    f: Callable
    df: Callable
    d2f: Callable


Q_LIBRARY = {
    "zero": OneVarFunction("zero", lambda w: 0.0 * w, lambda w: 0.0 * w, lambda w: 0.0 * w),
    "linear": OneVarFunction("linear", lambda w: w, lambda w: 1.0 + 0.0 * w, lambda w: 0.0 * w),
    "quadratic": OneVarFunction("quadratic", lambda w: w * w / 10.0, lambda w: w / 5.0,
                                lambda w: 0.2 + 0.0 * w),
}


def _locus_distance(locus, p, q):
    kind = locus[0]
    if kind == "p":
        return np.abs(p - locus[1])
    if kind == "q":
        return np.abs(q - locus[1])
    if kind == "diag":
        return np.abs(q - p) / np.sqrt(2.0)
    if kind == "point":
        return np.hypot(p - locus[1], q - locus[2])
    raise ValueError(f"unknown locus {locus!r}")


def _locus_touches(locus, lo, hi, margin):
    kind = locus[0]
    if kind == "p":
        return lo[0] - margin <= locus[1] <= hi[0] + margin
    if kind == "q":
        return lo[1] - margin <= locus[1] <= hi[1] + margin
    if kind == "diag":
        # the line q = p meets the rectangle iff the interval overlaps
        return max(lo[0], lo[1]) - margin * np.sqrt(2.0) <= min(hi[0], hi[1]) + margin * np.sqrt(2.0)
    if kind == "point":
        cx = np.clip(locus[1], lo[0], hi[0])
        cy = np.clip(locus[2], lo[1], hi[1])
        return np.hypot(cx - locus[1], cy - locus[2]) <= margin
    raise ValueError(f"unknown locus {locus!r}")


@dataclass(frozen=True)
class Domain:
    """Axis-aligned rectangle ``[p0, p1] x [q0, q1]`` minus singular loci.

    ``exclusions`` holds loci as tuples: ``("p", c)`` for the line ``p = c``,
    ``("q", c)`` for ``q = c``, ``("diag",)`` for ``q = p`` and
    ``("point", a, b)``.  Points within ``margin`` of a locus are rejected.
    """

    p_range: tuple
    q_range: tuple
    exclusions: tuple = field(default=())
    margin: float = 1e-3

    @classmethod
    def from_list(cls, bounds, exclusions=(), margin=1e-3) -> "Domain":
        (p0, p1), (q0, q1) = bounds
        return cls((float(p0), float(p1)), (float(q0), float(q1)), tuple(exclusions), margin)

    @property
    def lower(self):
        return np.array([self.p_range[0], self.q_range[0]])

    @property
    def upper(self):
        return np.array([self.p_range[1], self.q_range[1]])

    def contains(self, p, q, tol: float = 1e-12):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        inside = ((p >= self.p_range[0] - tol) & (p <= self.p_range[1] + tol)
                  & (q >= self.q_range[0] - tol) & (q <= self.q_range[1] + tol))
        for locus in self.exclusions:
            inside &= _locus_distance(locus, p, q) >= self.margin
        return inside

    def check(self, p, q):
        ok = np.atleast_1d(self.contains(p, q))
        if not ok.all():
            pp, qq = np.broadcast_arrays(np.atleast_1d(np.asarray(p, dtype=float)),
                                         np.atleast_1d(np.asarray(q, dtype=float)))
            i = int(np.argmin(ok.ravel()))
            raise DomainError(f"point ({pp.ravel()[i]:.6g}, {qq.ravel()[i]:.6g}) outside domain "
                              f"{self.p_range}x{self.q_range}")

    def check_clear_of_singular(self):
        for locus in self.exclusions:
            if _locus_touches(locus, self.lower, self.upper, self.margin):
                raise SingularDomainError(f"domain {self.p_range}x{self.q_range} touches singular locus {locus}")

    def shrink(self, frac: float) -> "Domain":
        """Rectangle shrunk towards its centre by ``frac`` of each side on both ends."""
        dp = (self.p_range[1] - self.p_range[0]) * frac
        dq = (self.q_range[1] - self.q_range[0]) * frac
        return Domain((self.p_range[0] + dp, self.p_range[1] - dp),
                      (self.q_range[0] + dq, self.q_range[1] - dq), self.exclusions, self.margin)

    def sample(self, n: int, rng: np.random.Generator):
        """``n`` uniform random points (rejection-sampled away from loci)."""
        out = np.empty((0, 2))
        while len(out) < n:
            pts = rng.uniform(self.lower, self.upper, size=(2 * n, 2))
            pts = pts[self.contains(pts[:, 0], pts[:, 1])]
            out = np.vstack([out, pts])
        return out[:n]

    def grid(self, n: int = 20):
        """``n x n`` tensor grid of interior points (cell centres)."""
        p = self.p_range[0] + (np.arange(n) + 0.5) * (self.p_range[1] - self.p_range[0]) / n
        q = self.q_range[0] + (np.arange(n) + 0.5) * (self.q_range[1] - self.q_range[0]) / n
        P, Qg = np.meshgrid(p, q, indexing="ij")
        P, Qg = P.ravel(), Qg.ravel()
        keep = self.contains(P, Qg)
        return np.column_stack([P[keep], Qg[keep]])

    def to_list(self):
        return [list(self.p_range), list(self.q_range)]
