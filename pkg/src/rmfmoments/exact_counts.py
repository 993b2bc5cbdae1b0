"""Exact moment evaluations as finite lattice counts.

Three families of identities are implemented:

* Steinhaus: E|sum_{n<=x} X_n n^-sigma|^(2k) equals the weighted
  multiplicative energy sum_n n^(-2 sigma) r_k(n;x)^2, where r_k(n;x)
  counts ordered k-tuples of integers <= x with product n.  The map
  n -> r_k(n;x) is built by meet-in-the-middle convolution, so the cost
  is O(x^k) instead of O(x^(2k)).

* Rademacher: E(sum_{n<=x} Y_n)^(2k) is evaluated two independent ways,
  by full enumeration of sign assignments to the primes (a fast Walsh
  transform over 2^pi(x) patterns) and by counting 2k-tuples of
  squarefree integers whose product is a perfect square (GF(2) prime
  signatures with a half convolution).  Their exact agreement is the
  main cross-check of this module.

* Dirichlet characters mod a prime q: the character-averaged 2k-th
  moment equals an exact congruence count by orthogonality; both sides
  are computed independently (FFT over the index transform vs a residue
  convolution) and compared.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import primes_up_to
from .errors import ResourceLimitError

__all__ = [
    "MultiplicityMap",
    "EnergyResult",
    "CharAverageResult",
    "product_multiplicity_map",
    "steinhaus_energy",
    "rademacher_moment_sign_enum",
    "rademacher_moment_tuple_count",
    "char_moment_average",
    "congruence_count",
]

_MAP_ENTRY_GUARD = 2**33
# below this x the k=2 energy goes through the generic map; above it the
# totient identity is used (exact either way, the identity is just O(x))
_TOTIENT_CUTOFF = 4000


# ---------------------------------------------------------------------------
# multiplicity maps


@dataclass(frozen=True)
class MultiplicityMap:
    """r_k(n; x) for all products n of k factors <= x, stored sparsely.

    ``values`` holds the distinct products in ascending order and
    ``counts`` the matching multiplicities; sum(counts) = x^k.
    """

    k: int
    x: int
    values: np.ndarray
    counts: np.ndarray

    def count(self, n: int) -> int:
        i = int(np.searchsorted(self.values, n))
        if i < len(self.values) and self.values[i] == n:
            return int(self.counts[i])
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.values.tolist(), self.counts.tolist()))

    @property
    def total_tuples(self) -> int:
        return int(self.counts.sum())


def _group_sum(vals: np.ndarray, cnts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(vals, kind="stable")
    v = vals[order]
    c = cnts[order]
    starts = np.concatenate(([0], np.flatnonzero(v[1:] != v[:-1]) + 1))
    return v[starts], np.add.reduceat(c, starts)


def product_multiplicity_map(k: int, x: int) -> MultiplicityMap:
    """Build the product-multiplicity map by repeated convolution with [1..x]."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if x < 1:
        raise ValueError("x must be a positive integer")
    x = int(x)
    if x**k > _MAP_ENTRY_GUARD:
        raise ResourceLimitError(
            f"multiplicity map for x^k = {x**k} exceeds the {_MAP_ENTRY_GUARD} entry guard"
        )
    vals = np.arange(1, x + 1, dtype=np.int64)
    cnts = np.ones(x, dtype=np.int64)
    mult = np.arange(1, x + 1, dtype=np.int64)
    for _ in range(k - 1):
        block = max(1, int(8_000_000 // max(1, len(vals))))
        pieces_v: list[np.ndarray] = []
        pieces_c: list[np.ndarray] = []
        pending = 0
        for lo in range(0, x, block):
            m = mult[lo : lo + block]
            pv = (vals[:, None] * m[None, :]).ravel()
            pc = np.broadcast_to(cnts[:, None], (len(cnts), len(m))).ravel()
            pieces_v.append(pv)
            pieces_c.append(pc.copy())
            pending += len(pv)
            if pending > 24_000_000:
                gv, gc = _group_sum(np.concatenate(pieces_v), np.concatenate(pieces_c))
                pieces_v, pieces_c, pending = [gv], [gc], len(gv)
        vals, cnts = _group_sum(np.concatenate(pieces_v), np.concatenate(pieces_c))
    return MultiplicityMap(k=k, x=x, values=vals, counts=cnts)


# ---------------------------------------------------------------------------
# Steinhaus energy


@dataclass(frozen=True)
class EnergyResult:
    """Weighted multiplicative energy. ``value`` is an exact int at sigma=0."""

    k: int
    x: int
    sigma: float
    value: int | float
    tuple_space_size: int


def _totient_table(x: int) -> np.ndarray:
    phi = np.arange(x + 1, dtype=np.int64)
    for p in primes_up_to(x).tolist():
        phi[p::p] -= phi[p::p] // p
    return phi


def _energy_k2_sigma0(x: int) -> int:
    # Pairs ab = cd <= x^2 parametrized by g = gcd(a, c): the count is
    # sum_{m<=x} (2*phi(m) - [m=1]) * floor(x/m)^2, evaluated exactly.
    phi = _totient_table(x)
    m = np.arange(1, x + 1, dtype=np.int64)
    weights = 2 * phi[1:]
    weights[0] -= 1
    floors = x // m
    total = 0
    for lo in range(0, x, 1 << 20):
        w = weights[lo : lo + (1 << 20)]
        f = floors[lo : lo + (1 << 20)]
        total += int(np.dot(w, f * f))
    return total


def _sum_of_squares_exact(counts: np.ndarray) -> int:
    # chunked int64 dot with a per-chunk overflow budget check
    total = 0
    for lo in range(0, len(counts), 1 << 20):
        c = counts[lo : lo + (1 << 20)]
        top = int(c.max()) if len(c) else 0
        if top * top * len(c) > 4 * 10**18:
            total += sum(int(v) * int(v) for v in c.tolist())
        else:
            total += int(np.dot(c, c))
    return total


def steinhaus_energy(k: int, x: float, sigma: float = 0.0) -> EnergyResult:
    """sum_n n^(-2 sigma) r_k(n;x)^2, the 2k-th moment of the Steinhaus sum."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not 0.0 <= sigma <= 0.5:
        raise ValueError("sigma must lie in [0, 1/2]")
    xf = int(math.floor(x))
    if xf < 1:
        raise ValueError("x must be at least 1")
    space = xf ** (2 * k)

    if k == 1:
        # the equation surface is the diagonal m1 = m2
        if sigma == 0.0:
            return EnergyResult(k, xf, sigma, xf, space)
        val = math.fsum(n ** (-2.0 * sigma) for n in range(1, xf + 1))
        return EnergyResult(k, xf, sigma, val, space)

    if k == 2 and sigma == 0.0 and xf > _TOTIENT_CUTOFF:
        return EnergyResult(k, xf, sigma, _energy_k2_sigma0(xf), space)

    mm = product_multiplicity_map(k, xf)
    if sigma == 0.0:
        return EnergyResult(k, xf, sigma, _sum_of_squares_exact(mm.counts), space)
    chunks = []
    for lo in range(0, len(mm.values), 1 << 20):
        v = mm.values[lo : lo + (1 << 20)].astype(np.float64)
        c = mm.counts[lo : lo + (1 << 20)].astype(np.float64)
        chunks.append(math.fsum((v ** (-2.0 * sigma) * c * c).tolist()))
    return EnergyResult(k, xf, sigma, math.fsum(chunks), space)


# ---------------------------------------------------------------------------
# Rademacher moments


def _squarefree_masks(x: int) -> tuple[list[int], int]:
    """Prime-signature bitmasks of the squarefree integers in [1, x]."""
    primes = primes_up_to(x).tolist()
    index = {p: i for i, p in enumerate(primes)}
    masks = []
    for n in range(1, x + 1):
        m = n
        mask = 0
        squarefree = True
        for p in primes:
            if p * p > m:
                break
            if m % p == 0:
                m //= p
                if m % p == 0:
                    squarefree = False
                    break
                mask |= 1 << index[p]
        if squarefree:
            if m > 1:
                mask |= 1 << index[m]
            masks.append(mask)
    return masks, len(primes)


def _walsh_hadamard(a: np.ndarray) -> np.ndarray:
    n = len(a)
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        top = a[:, 0, :].copy()
        a[:, 0, :] = top + a[:, 1, :]
        a[:, 1, :] = top - a[:, 1, :]
        a = a.reshape(n)
        h *= 2
    return a


def rademacher_moment_sign_enum(k: int, x: int) -> int:
    """E (sum_{n<=x} Y_n)^(2k) by enumerating all 2^pi(x) sign patterns.

    The Walsh transform of the signature histogram gives the sum S for
    every sign assignment at once; the moment is the exact average of
    S^(2k), which is always an integer (it equals the tuple count).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if x < 1:
        raise ValueError("x must be at least 1")
    x = int(x)
    masks, nprimes = _squarefree_masks(x)
    if nprimes > 24:
        raise ResourceLimitError(f"pi({x}) = {nprimes} primes exceeds the 24-bit sign-pattern guard")
    f = np.zeros(1 << nprimes, dtype=np.int64)
    for mask in masks:
        f[mask] += 1
    sums = _walsh_hadamard(f)
    hist = np.bincount((sums + x).astype(np.int64), minlength=2 * x + 1)
    total = 0
    for s, c in enumerate(hist.tolist()):
        if c:
            total += c * (s - x) ** (2 * k)
    denom = 1 << nprimes
    if total % denom:
        raise RuntimeError("sign-pattern average was not an integer; enumeration bug")
    return total // denom


def rademacher_moment_tuple_count(k: int, x: int) -> int:
    """Count 2k-tuples of squarefree n_i <= x whose product is a square.

    The parity of each prime's exponent is tracked as a GF(2) signature;
    a product is a square iff the XOR of all 2k signatures vanishes, so
    the count is sum over signatures s of (number of k-tuples with XOR s)^2.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if x < 1:
        raise ValueError("x must be at least 1")
    x = int(x)
    if x > 10_000:
        raise ResourceLimitError("tuple-count guard: x must be <= 10^4")
    masks, _ = _squarefree_masks(x)
    base = {}
    for m in masks:
        base[m] = base.get(m, 0) + 1
    level = dict(base)
    for _ in range(k - 1):
        if len(level) * len(base) > 3 * 10**8:
            raise ResourceLimitError("tuple-count guard: signature convolution too large")
        nxt: dict[int, int] = {}
        for s1, c1 in level.items():
            for s2, c2 in base.items():
                key = s1 ^ s2
                nxt[key] = nxt.get(key, 0) + c1 * c2
        level = nxt
    return sum(c * c for c in level.values())


# ---------------------------------------------------------------------------
# Dirichlet characters mod a prime


@dataclass(frozen=True)
class CharAverageResult:
    """Character-averaged 2k-th moment together with its exact counterpart.

    ``avg_all`` is the average over all phi(q) characters, stated as the
    exact rational it provably is; ``float_error`` records how far the
    floating FFT evaluation landed from that rational (the honesty check
    lives in the test suite, which compares the float against the
    independent ``congruence_count``).
    """

    k: int
    q: int
    x: int
    avg_all: Fraction
    avg_nonprincipal: Fraction
    congruence_count: int
    avg_all_float: float
    float_error: float


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def _primitive_root(q: int) -> int:
    phi = q - 1
    fac = [p for p, _ in _trial_factor(phi)]
    g = 2
    while True:
        if all(pow(g, phi // p, q) != 1 for p in fac):
            return g
        g += 1
        if g >= q:
            raise RuntimeError(f"no primitive root found for q={q}")


def _trial_factor(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _index_histogram(q: int, x: int) -> np.ndarray:
    """h[t] = #{n <= x : n coprime to q, ind_g(n) = t} for a fixed root g."""
    g = _primitive_root(q)
    ind = np.zeros(q, dtype=np.int64)
    acc = 1
    for t in range(q - 1):
        ind[acc] = t
        acc = acc * g % q
    r = np.arange(1, x + 1, dtype=np.int64) % q
    r = r[r != 0]
    return np.bincount(ind[r], minlength=q - 1)


def congruence_count(k: int, q: int, x: int) -> int:
    """#{(m_1..m_2k): m_i <= x, gcd(m_i, q)=1, prod first k = prod last k mod q}."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not _is_prime(q):
        raise ValueError("q must be prime (composite moduli are out of scope)")
    if q > 10_000:
        raise ResourceLimitError("congruence-count guard: q must be <= 10^4")
    if x < 1:
        raise ValueError("x must be at least 1")
    if x**k > 4 * 10**18:
        raise ResourceLimitError("congruence-count guard: x^k too large for exact counts")
    counts = np.zeros(q, dtype=object)
    n = np.arange(1, x + 1)
    r = n % q
    for residue, c in zip(*np.unique(r[r != 0], return_counts=True)):
        counts[int(residue)] = int(c)
    level = counts
    for _ in range(k - 1):
        nxt = np.zeros(q, dtype=object)
        for t in range(1, q):
            if level[t]:
                prod = (t * np.arange(q)) % q
                nxt[prod] += level[t] * counts
        level = nxt
    return int(sum(int(c) * int(c) for c in level[1:]))


def char_moment_average(k: int, q: int, x: int) -> CharAverageResult:
    """Average of |sum_{n<=x} chi(n)|^(2k) over all characters mod prime q.

    All phi(q) character sums come from one FFT of the index histogram;
    the average is rounded to the exact rational with denominator q-1
    that orthogonality guarantees, and the rounding residue is reported.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not _is_prime(q):
        raise ValueError("q must be prime (composite moduli are out of scope)")
    if q > 10**6:
        raise ResourceLimitError("character guard: q must be <= 10^6")
    if x < 1:
        raise ValueError("x must be at least 1")
    h = _index_histogram(q, x)
    # chi_j(g^t) = exp(2 pi i j t / (q-1)); sums for all j at once
    sums = np.fft.fft(h.astype(np.float64))
    powers = np.abs(sums) ** (2 * k)
    total_float = float(np.sum(powers))
    phi = q - 1
    # orthogonality forces the average to be an integer, so round there,
    # not at the (phi times larger) total
    avg_int = round(total_float / phi)
    avg_all = Fraction(avg_int)
    principal = int(h.sum())  # chi_0 sum is just the coprime count
    if phi > 1:
        avg_nonprincipal = Fraction(avg_int * phi - principal ** (2 * k), phi - 1)
    else:
        avg_nonprincipal = Fraction(0)
    cc = congruence_count(k, q, x) if q <= 10_000 else -1
    return CharAverageResult(
        k=k,
        q=q,
        x=x,
        avg_all=avg_all,
        avg_nonprincipal=avg_nonprincipal,
        congruence_count=cc,
        avg_all_float=total_float / phi,
        float_error=abs(total_float / phi - avg_int),
    )
