"""Rank-2 lattice model of the movable cone of a Calabi-Yau threefold.

Divisor classes are pairs over the integral basis (H1, H2).  Two birational
involutions tau1, tau2 (each of determinant -1, each fixing one nef boundary
ray) generate an infinite dihedral action; their composition sigma = tau2.tau1
is an infinite-order isometry whose eigenrays span the movable cone over
Q(sqrt(d)).  This module builds the exact eigen-analysis, the fundamental
domain, the invariant area/slope coordinates, and the reduction of movable
classes into the fundamental domain.

Matrix convention: columns are the images of H1, H2 written in the (H1, H2)
basis, so a map with t(H2) = 6*H1 - H2 has matrix [[1, 6], [0, -1]].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exact import QuadNum, squarefree_decompose

SIGMA = "sigma"
SIGMA_INV = "sigma_inv"
TAU2 = "tau2"

_MAX_DOMAIN_SHIFT = 64


@dataclass(frozen=True)
class DivisorClass:
    """Class p*H1 + q*H2 with exact (possibly irrational) coordinates."""

    p: QuadNum
    q: QuadNum

    @classmethod
    def from_ints(cls, p: int, q: int) -> DivisorClass:
        return cls(QuadNum(p), QuadNum(q))

    @property
    def is_integral(self) -> bool:
        return (
            self.p.is_rational
            and self.q.is_rational
            and self.p.a.denominator == 1
            and self.q.a.denominator == 1
        )

    def integer_coords(self) -> tuple[int, int]:
        if not self.is_integral:
            raise ValueError(f"{self} is not an integral class")
        return int(self.p.a), int(self.q.a)

    def is_zero(self) -> bool:
        return not (self.p or self.q)

    def __add__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(self.p + other.p, self.q + other.q)

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(self.p - other.p, self.q - other.q)

    def __neg__(self) -> DivisorClass:
        return DivisorClass(-self.p, -self.q)

    def scale(self, s) -> DivisorClass:
        return DivisorClass(self.p * s, self.q * s)

    def __str__(self):
        return f"[{self.p}, {self.q}]"


def det2(u: DivisorClass, v: DivisorClass) -> QuadNum:
    """Exact 2x2 determinant of the coordinate matrix (u, v)."""
    return u.p * v.q - u.q * v.p


def same_ray(u: DivisorClass, v: DivisorClass) -> bool:
    """True if u and v span the same ray (positive proportionality)."""
    if u.is_zero() or v.is_zero():
        return False
    if det2(u, v):
        return False
    c = u.p / v.p if v.p else u.q / v.q
    return c.compare(0) > 0


@dataclass(frozen=True)
class TriForm:
    """Symmetric trilinear intersection form via its values on H1, H2."""

    t111: int
    t112: int
    t122: int
    t222: int

    def cube(self, p, q):
        """D^3 for D = p*H1 + q*H2; works for int, Fraction or QuadNum."""
        return (
            self.t111 * p * p * p
            + 3 * self.t112 * p * p * q
            + 3 * self.t122 * p * q * q
            + self.t222 * q * q * q
        )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.t111, self.t112, self.t122, self.t222)


@dataclass(frozen=True)
class C2Form:
    """Linear form D -> c2(X).D via its values on H1, H2."""

    h1: int
    h2: int

    def pair(self, p, q):
        return self.h1 * p + self.h2 * q

    def as_tuple(self) -> tuple[int, int]:
        return (self.h1, self.h2)


@dataclass(frozen=True)
class LatticeMap:
    """Integer 2x2 matrix [[a, b], [c, d]] acting on (p, q) coordinates."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det() == 0:
            raise ValueError("lattice map must be invertible")

    @classmethod
    def identity(cls) -> LatticeMap:
        return cls(1, 0, 0, 1)

    @classmethod
    def from_flat(cls, vals) -> LatticeMap:
        a, b, c, d = (int(v) for v in vals)
        return cls(a, b, c, d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def apply(self, D: DivisorClass) -> DivisorClass:
        return DivisorClass(D.p * self.a + D.q * self.b, D.p * self.c + D.q * self.d)

    def __matmul__(self, other: LatticeMap) -> LatticeMap:
        return LatticeMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> LatticeMap:
        dt = self.det()
        if dt not in (1, -1):
            raise ValueError("only unimodular maps have integral inverses")
        return LatticeMap(self.d * dt, -self.b * dt, -self.c * dt, self.a * dt)

    def pow(self, k: int) -> LatticeMap:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = LatticeMap.identity()
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def flat(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class Cone2:
    """Closed 2-dimensional cone spanned by two non-proportional rays."""

    ray1: DivisorClass
    ray2: DivisorClass

    def __post_init__(self):
        if not det2(self.ray1, self.ray2):
            raise ValueError("cone rays must be non-proportional")


def cone_coords(cone: Cone2, D: DivisorClass) -> tuple[QuadNum, QuadNum]:
    """Coordinates of D in the (ray1, ray2) basis, exact over Q(sqrt(d))."""
    dt = det2(cone.ray1, cone.ray2)
    c1 = (D.p * cone.ray2.q - D.q * cone.ray2.p) / dt
    c2 = (cone.ray1.p * D.q - cone.ray1.q * D.p) / dt
    return c1, c2


def cone_contains(cone: Cone2, D: DivisorClass) -> bool:
    """Exact membership in the closed cone (boundary counts as inside)."""
    c1, c2 = cone_coords(cone, D)
    return c1.compare(0) >= 0 and c2.compare(0) >= 0


@dataclass(frozen=True)
class CYModel:
    """Intersection data plus the lattice action of the birational group.

    tau1 fixes the nef ray nef1, tau2 fixes nef2.  Models without birational
    involutions carry sigma directly (tau1 = tau2 = None).
    """

    name: str
    triform: TriForm
    c2form: C2Form
    tau1: LatticeMap | None
    tau2: LatticeMap | None
    sigma_direct: LatticeMap | None = None
    nef1: DivisorClass = DivisorClass(QuadNum(1), QuadNum(0))
    nef2: DivisorClass = DivisorClass(QuadNum(0), QuadNum(1))

    @property
    def has_involutions(self) -> bool:
        return self.tau1 is not None

    @property
    def sigma(self) -> LatticeMap:
        if self.has_involutions:
            return self.tau2 @ self.tau1
        if self.sigma_direct is None:
            raise ValueError("model defines neither involutions nor sigma")
        return self.sigma_direct

    def nef_cone(self) -> Cone2:
        return Cone2(self.nef1, self.nef2)


@dataclass(frozen=True)
class SigmaData:
    """Exact eigen-analysis of the infinite-order isometry.

    ray1 is the expanding eigenray (eigenvalue > 1), ray2 the contracting
    one; both are oriented so that every nef class has non-negative
    coordinates in the (ray1, ray2) basis.
    """

    sigma: LatticeMap
    eigenvalue: QuadNum
    eigenvalue_inv: QuadNum
    ray1: DivisorClass
    ray2: DivisorClass
    d: int


def _chi_fraction(model: CYModel, a: int, b: int) -> Fraction:
    g1p, g1q = model.nef1.integer_coords()
    g2p, g2q = model.nef2.integer_coords()
    p = a * g1p + b * g2p
    q = a * g1q + b * g2q
    return Fraction(model.triform.cube(p, q), 6) + Fraction(model.c2form.pair(p, q), 12)


def _poly_eval(coeffs, t):
    acc = None
    for c in reversed(coeffs):
        acc = c if acc is None else acc * t + c
    return acc


def _cubic_positive_on_nef(model: CYModel) -> bool:
    """Exact positivity of D^3 on nef classes with positive coordinates.

    Restricts the cubic to the segment (1-t)*g1 + t*g2 and checks the
    endpoints plus every interior critical point; quadratic-irrational
    critical points are evaluated exactly in their own field.
    """
    g1p, g1q = model.nef1.integer_coords()
    g2p, g2q = model.nef2.integer_coords()
    P = (Fraction(g1p), Fraction(g2p - g1p))
    Q = (Fraction(g1q), Fraction(g2q - g1q))

    def pmul(u, v):
        out = [Fraction(0)] * (len(u) + len(v) - 1)
        for i, x in enumerate(u):
            for j, y in enumerate(v):
                out[i + j] += x * y
        return out

    P2, Q2 = pmul(P, P), pmul(Q, Q)
    f = [Fraction(0)] * 4
    for coeff, poly in (
        (model.triform.t111, pmul(P2, P)),
        (3 * model.triform.t112, pmul(P2, Q)),
        (3 * model.triform.t122, pmul(P, Q2)),
        (model.triform.t222, pmul(Q2, Q)),
    ):
        for i, v in enumerate(poly):
            f[i] += coeff * v
    if not any(f):
        return False
    if _poly_eval(f, Fraction(0)) < 0 or _poly_eval(f, Fraction(1)) < 0:
        return False
    A, B, C = 3 * f[3], 2 * f[2], f[1]
    roots: list = []
    if A == 0:
        if B != 0:
            roots.append(-C / B)
    else:
        disc = B * B - 4 * A * C
        if disc > 0:
            num, den = disc.numerator * disc.denominator, disc.denominator
            k, dd = squarefree_decompose(num)
            if dd == 1:
                r = Fraction(k, den)
                roots.extend([(-B + r) / (2 * A), (-B - r) / (2 * A)])
            else:
                half = QuadNum(Fraction(-B) / (2 * A), Fraction(k, den) / (2 * A), dd)
                roots.extend([half, QuadNum(Fraction(-B) / (2 * A), -Fraction(k, den) / (2 * A), dd)])
    for r in roots:
        t = r if isinstance(r, QuadNum) else QuadNum(r)
        if t.compare(0) > 0 and t.compare(1) < 0:
            val = _poly_eval([QuadNum(c) for c in f], t)
            if val.compare(0) <= 0:
                return False
    return True


def validate_model(model: CYModel) -> list[str]:
    """Check every model invariant; returns a list of violations (empty = ok)."""
    issues: list[str] = []
    gens_ok = True
    for label, g in (("nef1", model.nef1), ("nef2", model.nef2)):
        if not g.is_integral:
            issues.append(f"{label}: nef generator must be integral")
            gens_ok = False
    if gens_ok and not det2(model.nef1, model.nef2):
        issues.append("nef generators are proportional")
        gens_ok = False

    if model.has_involutions:
        ident = LatticeMap.identity()
        pairs = (("tau1", model.tau1, model.nef1), ("tau2", model.tau2, model.nef2))
        for label, t, g in pairs:
            if t.det() != -1:
                issues.append(f"{label}: determinant must be -1, got {t.det()}")
            if t @ t != ident:
                issues.append(f"{label}: squared map is not the identity")
            if gens_ok and t.apply(g) != g:
                issues.append(f"{label}: does not fix its nef boundary ray")
    try:
        sig = model.sigma
    except ValueError as exc:
        issues.append(str(exc))
        return issues
    if sig.det() != 1:
        issues.append(f"sigma: determinant must be +1, got {sig.det()}")
    tr = sig.trace()
    if abs(tr) <= 2:
        issues.append(f"sigma: |trace| = {abs(tr)} <= 2, the action has finite order")
    else:
        _, d = squarefree_decompose(tr * tr - 4)
        if d == 1:
            issues.append("sigma: trace^2 - 4 is a perfect square, eigenrays are rational")

    if gens_ok:
        if not _cubic_positive_on_nef(model):
            issues.append("triple form: D^3 is not positive on the open nef cone")
        for label, g in (("nef1", model.nef1), ("nef2", model.nef2)):
            p, q = g.integer_coords()
            if model.c2form.pair(p, q) < 0:
                issues.append(f"c2 form: negative against nef generator {label}")
        for a in range(4):
            for b in range(4):
                if _chi_fraction(model, a, b).denominator != 1:
                    issues.append(
                        f"chi integrality fails at {a}*nef1 + {b}*nef2 "
                        f"(chi = {_chi_fraction(model, a, b)})"
                    )
    return issues


def eigen_sigma(model: CYModel) -> SigmaData:
    """Exact eigenvalue and eigenrays of sigma over Q(sqrt(d)).

    The expanding eigenray keeps the shape with H2-coordinate 1; either ray
    is sign-flipped if needed so the ample test class nef1 + nef2 has
    positive coordinates in the eigenbasis (the movable cone is then exactly
    the non-negative span of the two rays).
    """
    sig = model.sigma
    tr = sig.trace()
    if abs(tr) <= 2:
        raise ValueError("sigma has finite order (|trace| <= 2); no expanding eigenray")
    if tr < 0:
        raise ValueError("sigma must have positive eigenvalues to preserve the cone")
    k, d = squarefree_decompose(tr * tr - 4)
    if d == 1:
        raise ValueError("sigma eigenvalues are rational; model has rational boundary rays")
    lam = QuadNum(Fraction(tr, 2), Fraction(k, 2), d)
    lam_inv = lam.conjugate()
    if lam * lam_inv != QuadNum(1):
        raise ValueError("sigma determinant is not +1")

    def ray_for(ev: QuadNum) -> DivisorClass:
        # row-1 relation (a - ev) p + b q = 0; b != 0 because ev is irrational
        raw = DivisorClass(QuadNum(sig.b), ev - sig.a)
        return DivisorClass(raw.p / raw.q, QuadNum(1))

    r1, r2 = ray_for(lam), ray_for(lam_inv)
    test = model.nef1 + model.nef2
    basis = Cone2(r1, r2)
    a1, a2 = cone_coords(basis, test)
    if not a1 or not a2:
        raise ValueError("ample test class lies on an eigenray; model degenerate")
    if a1.compare(0) < 0:
        r1 = -r1
    if a2.compare(0) < 0:
        r2 = -r2
    data = SigmaData(sig, lam, lam_inv, r1, r2, d)
    for ray, ev in ((r1, lam), (r2, lam_inv)):
        img = sig.apply(ray)
        if img.p != ray.p * ev or img.q != ray.q * ev:
            raise ValueError("eigenray verification failed; inconsistent model data")
    return data


def movable_cone(s: SigmaData) -> Cone2:
    return Cone2(s.ray1, s.ray2)


def eigen_coords(D: DivisorClass, s: SigmaData) -> tuple[QuadNum, QuadNum]:
    """Coordinates (a1, a2) of D in the eigenray basis."""
    return cone_coords(Cone2(s.ray1, s.ray2), D)


def area_coordinate(D: DivisorClass, s: SigmaData) -> QuadNum:
    """Product a1*a2 of the eigen-coordinates; invariant under sigma."""
    a1, a2 = eigen_coords(D, s)
    return a1 * a2


def slope_coordinate(D: DivisorClass, s: SigmaData) -> QuadNum:
    """Ratio a1/a2 of the eigen-coordinates; scales by eigenvalue^2 under sigma."""
    a1, a2 = eigen_coords(D, s)
    if not a2:
        raise ZeroDivisionError("slope coordinate undefined on the expanding eigenray")
    return a1 / a2


def in_open_movable(D: DivisorClass, s: SigmaData) -> bool:
    a1, a2 = eigen_coords(D, s)
    return a1.compare(0) > 0 and a2.compare(0) > 0


def _primitive(D: DivisorClass) -> DivisorClass:
    p, q = D.integer_coords()
    g = gcd(abs(p), abs(q))
    if g > 1:
        p, q = p // g, q // g
    return DivisorClass.from_ints(p, q)


def _order_by_slope(c: Cone2, s: SigmaData) -> Cone2:
    if slope_coordinate(c.ray1, s).compare(slope_coordinate(c.ray2, s)) > 0:
        return Cone2(c.ray2, c.ray1)
    return c


def fundamental_domain(model: CYModel, x: DivisorClass) -> Cone2:
    """Rational polyhedral fundamental domain containing the nef cone.

    With involutions: the cone on z1 = x + tau1(x) and z2 = z1 + sigma(z1),
    shifted by a power of sigma and/or swapped with its tau2-mirror until it
    contains the nef cone.  Without involutions: the cone on a nef boundary
    class and its image under sigma (or its inverse).
    """
    nef = model.nef_cone()
    c1, c2 = cone_coords(nef, x)
    if not (x.is_integral and c1.compare(0) > 0 and c2.compare(0) > 0):
        raise ValueError("x must be an integral class interior to the nef cone (ample)")
    s = eigen_sigma(model)
    sig = model.sigma

    if not model.has_involutions:
        for x0 in (model.nef1, model.nef2):
            for mat in (sig, sig.inverse()):
                cand = Cone2(_primitive(x0), _primitive(mat.apply(x0)))
                if cone_contains(cand, model.nef1) and cone_contains(cand, model.nef2):
                    return _order_by_slope(cand, s)
        raise ValueError("sigma does not move the nef cone off itself; model invalid")

    z1 = x + model.tau1.apply(x)
    z2 = z1 + sig.apply(z1)
    base = (_primitive(z1), _primitive(z2))
    mirror = (_primitive(model.tau2.apply(base[0])), _primitive(model.tau2.apply(base[1])))
    for k in range(_MAX_DOMAIN_SHIFT + 1):
        for n in ((0,) if k == 0 else (k, -k)):
            power = sig.pow(n)
            for rays in (base, mirror):
                cand = Cone2(_primitive(power.apply(rays[0])), _primitive(power.apply(rays[1])))
                if cone_contains(cand, model.nef1) and cone_contains(cand, model.nef2):
                    return _order_by_slope(cand, s)
    raise ValueError("fundamental domain alignment with the nef cone did not terminate")


def _floor_log(u: QuadNum, base: QuadNum) -> int:
    """Largest n with base**n <= u, for u > 0 and base > 1, fully exact."""
    one = QuadNum(1)
    if u.compare(one) >= 0:
        if u.compare(base) < 0:
            return 0
        e = 1
        while (base ** (2 * e)).compare(u) <= 0:
            e *= 2
        lo, hi = e, 2 * e
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if (base**mid).compare(u) <= 0:
                lo = mid
            else:
                hi = mid
        return lo
    v = one / u
    m = _floor_log(v, base)
    if (base ** (-m)).compare(u) == 0:
        return -m
    return -m - 1


def reduce_to_domain(
    model: CYModel, s: SigmaData, pi: Cone2, D: DivisorClass
) -> tuple[list[str], DivisorClass]:
    """Pull an integral class of the open movable cone into the domain.

    Returns (word, reduced) with the word over {sigma, sigma_inv, tau2},
    applied left to right to transform D into the reduced class.  Classes
    already in the closed domain take the empty word (first match in pi
    wins); classes in its tau2 mirror cross back with one involution.
    Otherwise the power of sigma is located by exact doubling/bisection on
    the slope coordinate, followed by at most one tau2 crossing.
    """
    if not D.is_integral:
        raise ValueError("only integral classes are reduced")
    if not in_open_movable(D, s):
        raise ValueError(f"{D} is not in the open movable cone; reduction undefined")

    lam2 = s.eigenvalue * s.eigenvalue
    pieces = [pi]
    if model.has_involutions:
        t2 = model.tau2
        pieces.append(Cone2(t2.apply(pi.ray1), t2.apply(pi.ray2)))
    slopes = [
        slope_coordinate(ray, s) for piece in pieces for ray in (piece.ray1, piece.ray2)
    ]
    lo, hi = min(slopes), max(slopes)
    if hi != lam2 * lo:
        raise ValueError("domain pieces do not tile a full sigma window")

    if cone_contains(pi, D):
        return [], D
    if model.has_involutions and cone_contains(pieces[1], D):
        reduced = model.tau2.apply(D)
        if cone_contains(pi, reduced):
            return [TAU2], reduced
    n = _floor_log(slope_coordinate(D, s) / lo, lam2)
    word: list[str] = [SIGMA_INV] * n if n >= 0 else [SIGMA] * (-n)
    reduced = model.sigma.pow(-n).apply(D) if n else D
    if cone_contains(pi, reduced):
        return word, reduced
    if model.has_involutions and cone_contains(pieces[1], reduced):
        reduced = model.tau2.apply(reduced)
        word.append(TAU2)
        if cone_contains(pi, reduced):
            return word, reduced
    raise ValueError("reduction landed outside the fundamental window; model data inconsistent")
