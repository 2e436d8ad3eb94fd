"""Bigraded Hilbert functions of explicit ideals by exact rank computation.

Graded pieces of R/I are measured as (#monomials) - rank of the relation
matrix, with the rank computed over two random 31-bit prime fields and
cross-checked.  An exact linear fit then inverts the Euler-characteristic
cubic to recover triple intersection numbers and c2-degrees.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from .cones import C2Form, TriForm

DEFAULT_DEGREE_CAP = 6


class PolyParseError(ValueError):
    """Syntax or grading error in the generator grammar, with position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class RankDisagreement(RuntimeError):
    """Ranks over independently chosen prime fields kept disagreeing."""


class FitInconsistency(ValueError):
    """Hilbert samples do not lie on a single Euler cubic."""


@dataclass(frozen=True)
class BiPolyRing:
    """Polynomial ring with x-variables of bidegree (1,0), y-variables (0,1)."""

    x_count: int
    y_count: int

    def __post_init__(self):
        if self.x_count < 1 or self.y_count < 1:
            raise ValueError("variable counts must be at least 1")


@dataclass(frozen=True)
class BiPoly:
    """Bihomogeneous polynomial: map (x-exponents, y-exponents) -> coefficient."""

    ring: BiPolyRing
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(self.terms)))
        degs = {(sum(xe), sum(ye)) for (xe, ye), _ in self.terms}
        if len(degs) > 1:
            raise ValueError(f"not bihomogeneous: bidegrees {sorted(degs)}")
        if any(not c for _, c in self.terms):
            raise ValueError("zero coefficients must not be stored")

    @classmethod
    def from_dict(cls, ring: BiPolyRing, d: dict) -> BiPoly:
        return cls(ring, tuple((k, v) for k, v in d.items() if v))

    @property
    def bidegree(self):
        if not self.terms:
            return None
        (xe, ye), _ = self.terms[0]
        return (sum(xe), sum(ye))

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class IdealSpec:
    ring: BiPolyRing
    generators: tuple[BiPoly, ...]

    def __post_init__(self):
        for g in self.generators:
            if g.ring != self.ring:
                raise ValueError("generator ring mismatch")
            if g.is_zero():
                raise ValueError("zero generator")


_FACTOR_RE = re.compile(r"^([xy])(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, ring: BiPolyRing) -> BiPoly:
    """Parse terms joined by +/-; a term is an optional integer coefficient
    and '*'-separated powers like "x2^3" or "y0"."""
    terms: dict = {}
    pos = 0
    sign = 1
    first = True
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            if first:
                raise PolyParseError("empty polynomial", 0)
            break
        ch = text[pos]
        if ch in "+-":
            if first and ch == "+":
                raise PolyParseError("leading '+' not allowed", pos)
            sign = 1 if ch == "+" else -1
            pos += 1
            while pos < n and text[pos].isspace():
                pos += 1
        elif not first:
            raise PolyParseError(f"expected '+' or '-', found {ch!r}", pos)
        start = pos
        while pos < n and text[pos] not in "+-":
            pos += 1
        chunk = text[start:pos].strip()
        if not chunk:
            raise PolyParseError("empty term", start)
        coeff = sign
        xe = [0] * ring.x_count
        ye = [0] * ring.y_count
        for j, factor in enumerate(chunk.split("*")):
            factor = factor.strip()
            fpos = start + chunk.find(factor)
            if not factor:
                raise PolyParseError("empty factor", fpos)
            if factor.isdigit():
                if j != 0:
                    raise PolyParseError("integer coefficient must come first", fpos)
                coeff *= int(factor)
                continue
            m = _FACTOR_RE.match(factor)
            if not m:
                raise PolyParseError(f"cannot parse factor {factor!r}", fpos)
            kind, idx, power = m.group(1), int(m.group(2)), int(m.group(3) or 1)
            bound = ring.x_count if kind == "x" else ring.y_count
            if idx >= bound:
                raise PolyParseError(f"unknown variable {kind}{idx}", fpos)
            (xe if kind == "x" else ye)[idx] += power
        key = (tuple(xe), tuple(ye))
        bid = (sum(xe), sum(ye))
        for (oxe, oye), _ in terms.items():
            obid = (sum(oxe), sum(oye))
            if obid != bid:
                raise PolyParseError(f"mixed bidegrees {obid} and {bid}", start)
            break
        terms[key] = terms.get(key, 0) + coeff
        sign = 1
        first = False
    return BiPoly.from_dict(ring, terms)


_RING_RE = re.compile(r"^ring\s+x=(\d+)\s+y=(\d+)\s*$")


def parse_ideal_text(text: str) -> IdealSpec:
    """Ideal file: header "ring x=<n> y=<m>", then one generator per line.
    Blank lines and '#' comment lines are skipped."""
    ring = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ring is None:
            m = _RING_RE.match(line)
            if not m:
                raise ValueError(f"line {lineno}: expected header 'ring x=<n> y=<m>'")
            ring = BiPolyRing(int(m.group(1)), int(m.group(2)))
            continue
        try:
            gens.append(parse_poly(line, ring))
        except PolyParseError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if ring is None:
        raise ValueError("missing ring header")
    return IdealSpec(ring, tuple(gens))


def load_ideal_file(path) -> IdealSpec:
    return parse_ideal_text(Path(path).read_text())


def merge_ideals(*ideals: IdealSpec) -> IdealSpec:
    rings = {i.ring for i in ideals}
    if len(rings) != 1:
        raise ValueError(f"cannot merge ideals over different rings: {rings}")
    gens = tuple(g for i in ideals for g in i.generators)
    return IdealSpec(rings.pop(), gens)


@lru_cache(maxsize=None)
def _monomials(nvars: int, deg: int) -> tuple:
    out = []
    for combo in combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


def _is_prime(n: int) -> bool:
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _random_prime(rng: random.Random) -> int:
    while True:
        c = rng.randrange((1 << 30) | 1, 1 << 31, 2)
        if _is_prime(c):
            return c


def _rank_mod_p(base: np.ndarray, p: int) -> int:
    """Gaussian elimination over F_p on an int64 copy; p < 2^31 keeps every
    intermediate product inside int64."""
    A = base % p
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        below = r + 1 + np.flatnonzero(A[r + 1 :, c])
        if below.size:
            f = (A[below, c] * inv) % p
            A[below, c:] = (A[below, c:] - f[:, None] * A[r, c:]) % p
        r += 1
    return r


def hilbert_dim(
    ideal: IdealSpec, bidegree: tuple[int, int], degree_cap: int = DEFAULT_DEGREE_CAP
) -> int:
    """Dimension of the degree-(a, b) piece of ring/ideal."""
    a, b = bidegree
    if a < 0 or b < 0:
        raise ValueError(f"bidegree must be non-negative, got {bidegree}")
    if a > degree_cap or b > degree_cap:
        raise ValueError(f"bidegree {bidegree} exceeds the configured cap {degree_cap}")
    ring = ideal.ring
    xm = _monomials(ring.x_count, a)
    ym = _monomials(ring.y_count, b)
    xi = {e: i for i, e in enumerate(xm)}
    yi = {e: i for i, e in enumerate(ym)}
    ncols = len(xm) * len(ym)

    rows: list[list[tuple[int, int]]] = []
    for g in ideal.generators:
        ga, gb = g.bidegree
        if ga > a or gb > b:
            continue
        for xq in _monomials(ring.x_count, a - ga):
            for yq in _monomials(ring.y_count, b - gb):
                row = []
                for (xe, ye), c in g.terms:
                    xk = tuple(u + v for u, v in zip(xe, xq))
                    yk = tuple(u + v for u, v in zip(ye, yq))
                    row.append((xi[xk] * len(ym) + yi[yk], c))
                rows.append(row)
    if not rows:
        return ncols

    base = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for col, c in row:
            base[i, col] += c

    for attempt in range(3):
        rng = random.Random(f"hilbert-rank:{a}:{b}:{len(rows)}:{attempt}")
        p1 = _random_prime(rng)
        p2 = _random_prime(rng)
        while p2 == p1:
            p2 = _random_prime(rng)
        r1 = _rank_mod_p(base, p1)
        r2 = _rank_mod_p(base, p2)
        if r1 == r2:
            return ncols - r1
    raise RankDisagreement(
        f"rank at bidegree {bidegree} disagreed over three independent prime pairs"
    )


def default_sample_grid(max_degree: int = 3) -> list[tuple[int, int]]:
    """Fit sample bidegrees: 1 <= a, b <= max_degree (so a + b >= 2)."""
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    return [(a, b) for a in range(1, max_degree + 1) for b in range(1, max_degree + 1)]


def fit_chi(samples) -> tuple[TriForm, C2Form]:
    """Invert chi(a,b) = (a^3 t1 + 3 a^2 b t2 + 3 a b^2 t3 + b^3 t4)/6
    + (a c5 + b c6)/12 for the six unknowns, exactly.

    The system must be uniquely solvable and every extra sample must be
    reproduced exactly; anything else signals non-stabilized samples and
    raises FitInconsistency.
    """
    samples = list(samples)
    if len(samples) < 6:
        raise ValueError(f"need at least 6 samples, got {len(samples)}")
    mat = []
    for (a, b), dim in samples:
        row = [2 * a**3, 6 * a * a * b, 6 * a * b * b, 2 * b**3, a, b, 12 * dim]
        mat.append([Fraction(v) for v in row])

    nrows = len(mat)
    rank = 0
    for c in range(6):
        piv = next((i for i in range(rank, nrows) if mat[i][c]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pv = mat[rank][c]
        mat[rank] = [v / pv for v in mat[rank]]
        for i in range(nrows):
            if i != rank and mat[i][c]:
                f = mat[i][c]
                mat[i] = [u - f * v for u, v in zip(mat[i], mat[rank])]
        rank += 1
    if rank < 6:
        raise ValueError("sample bidegrees are degenerate: system underdetermined")
    for i in range(rank, nrows):
        if any(mat[i]):
            raise FitInconsistency(
                "over-determined system inconsistent: Hilbert values at the sampled "
                "bidegrees do not agree with any single Euler cubic (not stabilized)"
            )
    sol = [mat[i][6] for i in range(6)]
    if any(v.denominator != 1 for v in sol):
        raise FitInconsistency(f"fit produced non-integral intersection data {sol}")
    t1, t2, t3, t4, c5, c6 = (int(v) for v in sol)
    return TriForm(t1, t2, t3, t4), C2Form(c5, c6)
