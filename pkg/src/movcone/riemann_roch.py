"""Section counting: the Euler characteristic on nef integral classes and
section counts of arbitrary integral movable classes via reduction to the
fundamental domain."""

from __future__ import annotations

from fractions import Fraction

from .cones import (
    Cone2,
    CYModel,
    DivisorClass,
    SigmaData,
    cone_contains,
    reduce_to_domain,
    same_ray,
)


class ChamberCoveringError(ValueError):
    """Fundamental domain differs from the nef cone; chi is only known there."""


def chi_nef(model: CYModel, D: DivisorClass) -> int:
    """chi(D) = D^3/6 + c2.D/12 for an integral nef class, exactly."""
    if not D.is_integral:
        raise ValueError(f"chi requires an integral class, got {D}")
    if not cone_contains(model.nef_cone(), D):
        raise ValueError(f"{D} is not nef")
    p, q = D.integer_coords()
    val = Fraction(model.triform.cube(p, q), 6) + Fraction(model.c2form.pair(p, q), 12)
    if val.denominator != 1:
        raise ValueError(
            f"chi({p},{q}) = {val} is not an integer; model intersection data invalid"
        )
    return int(val)


def _domain_is_nef(model: CYModel, pi: Cone2) -> bool:
    nef = model.nef_cone()
    return (same_ray(pi.ray1, nef.ray1) and same_ray(pi.ray2, nef.ray2)) or (
        same_ray(pi.ray1, nef.ray2) and same_ray(pi.ray2, nef.ray1)
    )


def h0_movable(
    model: CYModel, s: SigmaData, pi: Cone2, D: DivisorClass
) -> tuple[int, list[str]]:
    """Sections of an integral class in the open movable cone.

    Reduces D into the fundamental domain (a composition of birational
    pullbacks, so the count is preserved) and evaluates chi there.  Only
    models whose fundamental domain equals the nef cone are supported.
    """
    if not _domain_is_nef(model, pi):
        raise ChamberCoveringError(
            "chamber covering not implemented: fundamental domain is not the nef cone"
        )
    word, reduced = reduce_to_domain(model, s, pi, D)
    return chi_nef(model, reduced), word
