"""Lattice-relative volumes of margin-constrained polytopes.

The moment asymptotics in this package carry three geometric constants,
each realized as the volume of a polytope of nonnegative matrices or
edge weights:

* ``birkhoff(k)``   : k x k matrices, every row and column sum equal;
* ``beta_mixed(k)`` : (k-1) x k matrices, row sums equal, column sums
                      bounded (adding the column-slack row turns one
                      family into the other, which is why their dilation
                      counts must agree, entry for entry);
* ``alpha_box(k)``  : k x k matrices with row and column sums bounded;
* ``gamma_sym(k)``  : edge weights on the complete graph K_{2k} with all
                      vertex degrees equal (dilations counted at even
                      degree 2t to stay on the integer lattice).

Volumes are normalized as leading coefficients of Ehrhart polynomials,
interpolated exactly over rationals from dilation counts produced by
memoized dynamic programming, then validated at out-of-sample dilations.
Floating interpolation is hopeless at degree 9 and up; everything here
is integer and Fraction arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

from .errors import ResourceLimitError
from .estimates import MomentEstimate

__all__ = [
    "PolytopeSpec",
    "RationalPolynomial",
    "birkhoff",
    "beta_mixed",
    "alpha_box",
    "gamma_sym",
    "lattice_count",
    "ehrhart_polynomial",
    "relative_volume",
    "beta_constant",
    "alpha_constant",
    "gamma_constant",
    "mc_volume",
    "count_margin_matrices",
]

_FAMILIES = ("birkhoff", "beta_mixed", "alpha_box", "gamma_sym")


@dataclass(frozen=True)
class PolytopeSpec:
    family: str
    k: int

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "gamma_sym":
            if not 2 <= self.k <= 3:
                raise ValueError("gamma_sym supports k in {2, 3}")
        else:
            if not 1 <= self.k <= 5:
                raise ValueError(f"{self.family} supports k in 1..5")

    @property
    def dimension(self) -> int:
        k = self.k
        if self.family in ("birkhoff", "beta_mixed"):
            return (k - 1) ** 2
        if self.family == "alpha_box":
            return k * k
        return 2 * k * k - 3 * k


def birkhoff(k: int) -> PolytopeSpec:
    return PolytopeSpec("birkhoff", k)


def beta_mixed(k: int) -> PolytopeSpec:
    return PolytopeSpec("beta_mixed", k)


def alpha_box(k: int) -> PolytopeSpec:
    return PolytopeSpec("alpha_box", k)


def gamma_sym(k: int) -> PolytopeSpec:
    return PolytopeSpec("gamma_sym", k)


# ---------------------------------------------------------------------------
# composition enumeration and margin DPs


def _compositions(total: int, caps: tuple[int, ...]):
    """Yield tuples c, 0 <= c_i <= caps_i, sum c = total, with suffix pruning."""
    n = len(caps)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    out = [0] * n

    def rec(i: int, rem: int):
        if i == n:
            if rem == 0:
                yield tuple(out)
            return
        if rem > suffix[i]:
            return
        lo = max(0, rem - suffix[i + 1])
        hi = min(caps[i], rem)
        for c in range(lo, hi + 1):
            out[i] = c
            yield from rec(i + 1, rem - c)
        out[i] = 0

    yield from rec(0, total)


@cache
def count_margin_matrices(rows: tuple[int, ...], cols: tuple[int, ...]) -> int:
    """Nonnegative integer matrices with exact row sums and column sums.

    Row order is irrelevant to the count, as is column order; callers may
    pass margins in any order.  The recursion peels off the first row and
    canonicalizes the reduced column margins by sorting.
    """
    if any(r < 0 for r in rows) or any(c < 0 for c in cols):
        return 0
    if sum(rows) != sum(cols):
        return 0
    if not rows:
        return 1 if all(c == 0 for c in cols) else 0
    rows = tuple(sorted(rows, reverse=True))
    cols = tuple(sorted(cols, reverse=True))
    total = 0
    for comp in _compositions(rows[0], cols):
        reduced = tuple(sorted((c - v for c, v in zip(cols, comp)), reverse=True))
        total += count_margin_matrices(rows[1:], reduced)
    return total


@cache
def _count_rows_capped(nrows: int, rowsum: int, caps: tuple[int, ...]) -> int:
    """Matrices with ``nrows`` rows each summing to ``rowsum``, col sums <= caps."""
    if nrows == 0:
        return 1
    total = 0
    for comp in _compositions(rowsum, caps):
        reduced = tuple(sorted((c - v for c, v in zip(caps, comp)), reverse=True))
        total += _count_rows_capped(nrows - 1, rowsum, reduced)
    return total


@cache
def _count_rows_atmost(nrows: int, rowcap: int, caps: tuple[int, ...]) -> int:
    """Matrices with ``nrows`` rows each summing to at most ``rowcap``, col sums <= caps."""
    if nrows == 0:
        return 1
    total = 0
    for u in range(rowcap + 1):
        for comp in _compositions(u, caps):
            reduced = tuple(sorted((c - v for c, v in zip(caps, comp)), reverse=True))
            total += _count_rows_atmost(nrows - 1, rowcap, reduced)
    return total


@cache
def _count_graph_degrees(res: tuple[int, ...]) -> int:
    """Edge-weightings of a complete graph with the given residual degrees.

    Eliminates the vertex with the largest residual: enumerate its edge
    values toward the others, reduce, recurse on the sorted remainder.
    """
    if len(res) == 1:
        return 1 if res[0] == 0 else 0
    if sum(res) % 2:
        return 0
    res = tuple(sorted(res, reverse=True))
    head, rest = res[0], res[1:]
    if head > sum(rest):
        return 0
    total = 0
    for comp in _compositions(head, rest):
        reduced = tuple(sorted((r - v for r, v in zip(rest, comp)), reverse=True))
        total += _count_graph_degrees(reduced)
    return total


def lattice_count(spec: PolytopeSpec, t: int) -> int:
    """Exact number of lattice points in the t-th dilation."""
    if t < 0:
        raise ValueError("dilation must be nonnegative")
    k = spec.k
    if spec.family == "birkhoff":
        return count_margin_matrices((t,) * k, (t,) * k)
    if spec.family == "beta_mixed":
        return _count_rows_capped(k - 1, t, (t,) * k)
    if spec.family == "alpha_box":
        return _count_rows_atmost(k, t, (t,) * k)
    # gamma_sym: degrees 2t on K_{2k}
    return _count_graph_degrees((2 * t,) * (2 * k))


# ---------------------------------------------------------------------------
# Ehrhart interpolation


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with exact rational coefficients, ascending order."""

    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coefficients[-1]

    def __call__(self, t: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc


def _newton_interpolate(values: list[int]) -> RationalPolynomial:
    """Exact interpolation through (i, values[i]), i = 0..d."""
    d = len(values) - 1
    diffs = [Fraction(v) for v in values]
    # divided differences on the unit grid reduce to forward differences / i!
    table = [diffs[0]]
    work = diffs
    for i in range(1, d + 1):
        work = [work[j + 1] - work[j] for j in range(len(work) - 1)]
        table.append(work[0] / math.factorial(i))
    # expand prod_{j<i} (t - j) into monomials
    coeffs = [Fraction(0)] * (d + 1)
    basis = [Fraction(1)]
    for i in range(d + 1):
        for j, b in enumerate(basis):
            coeffs[j] += table[i] * b
        new_basis = [Fraction(0)] * (len(basis) + 1)
        for j, b in enumerate(basis):
            new_basis[j] -= b * i
            new_basis[j + 1] += b
        basis = new_basis
    return RationalPolynomial(tuple(coeffs))


def ehrhart_polynomial(spec: PolytopeSpec) -> RationalPolynomial:
    """Interpolate the dilation-count polynomial and validate it out of sample.

    The count at t = 0..d pins a degree-d polynomial; predictions at
    t = d+1, d+2, d+3 are then checked against fresh DP counts.  A
    mismatch means a DP bug, not a data issue, hence RuntimeError.
    """
    d = spec.dimension
    values = [lattice_count(spec, t) for t in range(d + 1)]
    poly = _newton_interpolate(values)
    for t in range(d + 1, d + 4):
        predicted = poly(t)
        actual = lattice_count(spec, t)
        if predicted != actual:
            raise RuntimeError(
                f"interpolation mismatch for {spec.family}(k={spec.k}) at t={t}: "
                f"predicted {predicted}, counted {actual}"
            )
    return poly


@cache
def _ehrhart_cached(spec: PolytopeSpec) -> RationalPolynomial:
    return ehrhart_polynomial(spec)


def relative_volume(spec: PolytopeSpec) -> Fraction:
    """Leading Ehrhart coefficient: the volume in the affine span, measured
    against the induced lattice."""
    lc = _ehrhart_cached(spec).leading_coefficient
    if lc <= 0:
        raise RuntimeError(f"nonpositive volume for {spec.family}(k={spec.k})")
    return lc


# ---------------------------------------------------------------------------
# named constants


def beta_constant(k: int) -> Fraction:
    """beta(k) as an exact rational, computed by two routes that must agree.

    The equal-margin route and the capped-column route count the same
    matrices (append the column-slack row to a capped matrix and its row
    sum is forced), but the two DPs share no code path: one recurses on
    exact margins, the other on residual caps.  Equality of the full
    Ehrhart polynomials is therefore a strong implementation check, and
    it pins the volume normalization used everywhere else.
    """
    if not 1 <= k <= 4:
        raise ValueError("beta_constant supports k in 1..4")
    pa = _ehrhart_cached(birkhoff(k))
    pb = _ehrhart_cached(beta_mixed(k))
    if pa.coefficients != pb.coefficients:
        raise RuntimeError(
            f"beta route disagreement at k={k}: {pa.coefficients} vs {pb.coefficients}"
        )
    return pa.leading_coefficient


def alpha_constant(k: int) -> Fraction:
    """alpha(k): plain volume of the box-constrained margin polytope."""
    if not 1 <= k <= 4:
        raise ValueError("alpha_constant supports k in 1..4")
    return relative_volume(alpha_box(k))


def gamma_constant(k: int) -> Fraction:
    """gamma(k) from the degree-constrained edge polytope of K_{2k}.

    The dilation counts run over even degree targets 2t, so the leading
    coefficient ell(k) measures the dilation-by-2 volume, a factor 2^dim;
    one more factor of 2 accounts for the even-total sublattice that the
    degree map actually hits (the sum of all degrees is twice the total
    edge weight, so odd-sum degree vectors are never realized).  Hence
    gamma(k) = ell(k) / 2^(dim + 1).
    """
    if not 2 <= k <= 3:
        raise ValueError("gamma_constant supports k in {2, 3}")
    spec = gamma_sym(k)
    ell = relative_volume(spec)
    return ell / 2 ** (spec.dimension + 1)


# ---------------------------------------------------------------------------
# Monte Carlo cross-check


def mc_volume(spec: PolytopeSpec, samples: int, seed: int) -> MomentEstimate:
    """Stochastic volume estimate for the families with at-most constraints.

    beta_mixed: each equality row is sampled uniformly from the standard
    simplex (normalized exponential spacings) and the column caps decide
    acceptance; the estimate is the simplex-volume product times the
    acceptance rate.  alpha_box: plain rejection from the unit box.
    """
    if samples < 1000:
        raise ValueError("samples must be at least 1000")
    if spec.family not in ("beta_mixed", "alpha_box"):
        raise ValueError("mc_volume supports beta_mixed and alpha_box only")
    rng = np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, 0]))
    k = spec.k
    if spec.family == "beta_mixed":
        if k == 1:
            return MomentEstimate(mean=1.0, stderr=0.0, trials=samples, seed=seed)
        e = rng.exponential(size=(samples, k - 1, k))
        rows = e / e.sum(axis=2, keepdims=True)
        accept = (rows.sum(axis=1) <= 1.0).all(axis=1)
        scale = (1.0 / math.factorial(k - 1)) ** (k - 1)
    else:
        u = rng.random(size=(samples, k, k))
        ok_rows = (u.sum(axis=2) <= 1.0).all(axis=1)
        ok_cols = (u.sum(axis=1) <= 1.0).all(axis=1)
        accept = ok_rows & ok_cols
        scale = 1.0
    hits = int(accept.sum())
    p = hits / samples
    if hits == 0:
        # one-sided rule-of-three bound in place of a vanishing stderr
        return MomentEstimate(mean=0.0, stderr=scale * 3.0 / samples, trials=samples, seed=seed)
    se = scale * math.sqrt(p * (1.0 - p) / samples)
    return MomentEstimate(mean=scale * p, stderr=se, trials=samples, seed=seed)
