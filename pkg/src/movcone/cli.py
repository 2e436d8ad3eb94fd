"""Command-line surface: verify, derive, sweep, reduce and h0 on model files.

Exit codes: 0 success, 2 validation failure, 3 parse error.
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import click

from . import chow, growth, hilbert, models
from .cones import (
    DivisorClass,
    area_coordinate,
    cone_contains,
    eigen_coords,
    eigen_sigma,
    fundamental_domain,
    movable_cone,
    reduce_to_domain,
    slope_coordinate,
    validate_model,
)
from .exact import QuadNum
from .riemann_roch import ChamberCoveringError, chi_nef, h0_movable

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PARSE = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str) -> models.ModelFile:
    try:
        return models.load_model(path)
    except models.ModelParseError as exc:
        _fail(EXIT_PARSE, str(exc))


def _parse_class(text: str) -> DivisorClass:
    try:
        p, q = (int(v.strip()) for v in text.split(","))
    except ValueError:
        _fail(EXIT_PARSE, f'expected an integral class "p,q", got {text!r}')
    return DivisorClass.from_ints(p, q)


@click.group()
def main():
    """Exact cone dynamics and section-count growth for rank-2 models."""


@main.command()
@click.argument("model_file")
@click.option("--samples", default=200, show_default=True, help="Random cases per property suite.")
@click.option("--seed", default=0, show_default=True, help="Seed for the property suites.")
def verify(model_file: str, samples: int, seed: int):
    """Validate a model and run its randomized property suites."""
    mf = _load(model_file)
    failures = 0

    def report(name: str, problem: str | None):
        nonlocal failures
        if problem is None:
            click.echo(f"PASS {name}")
        else:
            failures += 1
            click.echo(f"FAIL {name}: {problem}")

    try:
        model = mf.to_cymodel()
    except ValueError as exc:
        report("model-invariants", str(exc))
        sys.exit(EXIT_VALIDATION)

    issues = validate_model(model)
    if issues:
        for issue in issues:
            report("model-invariants", issue)
        sys.exit(EXIT_VALIDATION)
    report("model-invariants", None)

    try:
        s = eigen_sigma(model)
        click.echo(f"lambda = {s.eigenvalue}")
        report("eigen-analysis", None)
    except ValueError as exc:
        report("eigen-analysis", str(exc))
        sys.exit(EXIT_VALIDATION)

    x = model.nef1 + model.nef2
    try:
        pi = fundamental_domain(model, x)
        ok = cone_contains(pi, model.nef1) and cone_contains(pi, model.nef2)
        report("fundamental-domain", None if ok else "nef cone not contained")
    except ValueError as exc:
        pi = None
        report("fundamental-domain", str(exc))

    rng = random.Random(seed)
    lam2 = s.eigenvalue * s.eigenvalue

    def random_movable() -> DivisorClass:
        base = DivisorClass.from_ints(rng.randint(1, 9), rng.randint(1, 9))
        k = rng.randint(-3, 3)
        D = model.sigma.pow(k).apply(base)
        if model.has_involutions and rng.random() < 0.5:
            D = model.tau2.apply(D)
        return D

    problem = None
    for _ in range(samples):
        D = random_movable()
        if area_coordinate(D, s) != area_coordinate(model.sigma.apply(D), s):
            problem = f"area changed under sigma for {D}"
            break
    report("area-invariance", problem)

    problem = None
    for _ in range(samples):
        D = random_movable()
        lhs = slope_coordinate(model.sigma.apply(D), s)
        if lhs != lam2 * slope_coordinate(D, s):
            problem = f"slope scaling violated for {D}"
            break
    report("slope-scaling", problem)

    if model.has_involutions and pi is not None:
        problem = None
        for _ in range(samples):
            d1, d2 = rng.randint(1, 50), rng.randint(1, 50)
            D = pi.ray1.scale(d1) + pi.ray2.scale(d2)
            val = area_coordinate(model.tau2.apply(D), s)
            ref = area_coordinate(D, s)
            if not (
                val.compare(ref / s.eigenvalue) > 0 and val.compare(ref * s.eigenvalue) < 0
            ):
                problem = f"wall-crossing area sandwich violated for {D}"
                break
        report("wall-crossing-sandwich", problem)

        try:
            problem = None
            for _ in range(max(1, samples // 5)):
                D = random_movable()
                base_h0, _ = h0_movable(model, s, pi, D)
                word_maps = [model.sigma, model.sigma.inverse(), model.tau1, model.tau2]
                g = D
                for _ in range(rng.randint(1, 5)):
                    g = rng.choice(word_maps).apply(g)
                h0_g, _ = h0_movable(model, s, pi, g)
                if h0_g != base_h0:
                    problem = f"section count changed along a word for {D}"
                    break
            report("section-count-word-invariance", problem)
        except ChamberCoveringError as exc:
            click.echo(f"SKIP section-count-word-invariance: {exc}")
    else:
        click.echo("SKIP wall-crossing-sandwich: model has no birational involutions")
        click.echo("SKIP section-count-word-invariance: model has no birational involutions")

    problem = None
    for a in range(6):
        for b in range(6):
            D = model.nef1.scale(a) + model.nef2.scale(b)
            try:
                chi_nef(model, D)
            except ValueError as exc:
                problem = str(exc)
    report("chi-integrality", problem)

    problem = None
    for _ in range(samples):
        x_val = QuadNum(
            rng.randint(-500, 500),
            rng.randint(-50, 50),
            rng.choice([2, 3, 5, s.d]),
        ) / rng.randint(1, 20)
        f = x_val.floor()
        if not (x_val.compare(f) >= 0 and x_val.compare(f + 1) < 0):
            problem = f"floor bracketing violated for {x_val}"
            break
    report("floor-bracketing", problem)

    problem = None
    mov = movable_cone(s)
    for _ in range(samples):
        D = DivisorClass.from_ints(rng.randint(-20, 20), rng.randint(-20, 20))
        if D.is_zero():
            continue
        a1, a2 = eigen_coords(D, s)
        expect = a1.compare(0) >= 0 and a2.compare(0) >= 0
        if cone_contains(mov, D) != expect:
            problem = f"cone membership inconsistent for {D}"
            break
    report("cone-membership", problem)

    sys.exit(EXIT_VALIDATION if failures else EXIT_OK)


@main.command()
@click.argument("model_file")
@click.option("--grid", default=3, show_default=True, help="Max bidegree coordinate for fit samples.")
@click.option("--out", type=click.Path(), default=None, help="Write here instead of in place.")
@click.option("--force", is_flag=True, help="Overwrite conflicting stored values.")
def derive(model_file: str, grid: int, out: str | None, force: bool):
    """Derive triform/c2form from the ci block and/or ideal files."""
    mf = _load(model_file)
    if mf.ci is None and mf.ideal_files is None:
        _fail(EXIT_VALIDATION, "model has neither a ci block nor ideal files to derive from")

    results = {}
    if mf.ci is not None:
        ci = chow.CIData(chow.MultiProjAmbient(tuple(mf.ci["dims"])), tuple(tuple(d) for d in mf.ci["degrees"]))
        try:
            results["chow"] = chow.intersection_data(ci)
        except ValueError as exc:
            _fail(EXIT_VALIDATION, f"chow derivation failed: {exc}")
    if mf.ideal_files is not None:
        try:
            ideal = hilbert.merge_ideals(*(hilbert.load_ideal_file(p) for p in mf.ideal_paths()))
        except (OSError, ValueError) as exc:
            _fail(EXIT_PARSE, f"ideal files: {exc}")
        t0 = time.perf_counter()
        try:
            samples = [
                (bd, hilbert.hilbert_dim(ideal, bd)) for bd in hilbert.default_sample_grid(grid)
            ]
            results["hilbert-fit"] = hilbert.fit_chi(samples)
        except (ValueError, hilbert.RankDisagreement) as exc:
            _fail(EXIT_VALIDATION, f"hilbert derivation failed: {exc}")
        click.echo(f"hilbert fit over {len(samples)} bidegrees in {time.perf_counter() - t0:.1f}s")

    values = list(results.values())
    if len(values) == 2 and values[0] != values[1]:
        _fail(
            EXIT_VALIDATION,
            f"derivations disagree: chow gives {values[0][0].as_tuple()}/{values[0][1].as_tuple()}, "
            f"hilbert fit gives {values[1][0].as_tuple()}/{values[1][1].as_tuple()}",
        )
    tri, c2 = values[0]
    tag = "+".join(results)
    click.echo(f"triform = {tri.as_tuple()}  c2form = {c2.as_tuple()}  [{tag}]")

    stored = (tuple(mf.triform), tuple(mf.c2form))
    derived = (tri.as_tuple(), c2.as_tuple())
    if stored != derived and not force:
        _fail(
            EXIT_VALIDATION,
            f"derived values {derived} conflict with stored {stored}; use --force to overwrite",
        )
    mf.triform = tri.as_tuple()
    mf.c2form = c2.as_tuple()
    prov = dict(mf.provenance or {})
    prov["triform"] = tag
    prov["c2form"] = tag
    mf.provenance = prov
    target = Path(out) if out else mf.path
    models.save_model(mf, target)
    click.echo(f"wrote {target}")


def _prepare_dynamics(mf: models.ModelFile):
    model = mf.to_cymodel()
    issues = validate_model(model)
    if issues:
        _fail(EXIT_VALIDATION, "; ".join(issues))
    s = eigen_sigma(model)
    pi = fundamental_domain(model, model.nef1 + model.nef2)
    return model, s, pi


@main.command()
@click.argument("model_file")
@click.option("--ray", type=click.Choice(["r1", "r2"]), default="r1", show_default=True)
@click.option("--dir", "direction", default=None, help='Integral sweep direction "p,q" (overrides --ray).')
@click.option("--ample", default="5,5", show_default=True, help='Ample shift "p,q".')
@click.option("--mmin", default=256, show_default=True)
@click.option("--mmax", default=1 << 20, show_default=True)
@click.option("--out", type=click.Path(), default="sweep.csv", show_default=True)
def sweep(model_file: str, ray: str, direction: str | None, ample: str, mmin: int, mmax: int, out: str):
    """Run the section-count growth sweep and fit the exponent."""
    mf = _load(model_file)
    model, s, pi = _prepare_dynamics(mf)
    ample_cls = _parse_class(ample)
    ray_arg = _parse_class(direction) if direction else ray
    try:
        ms = growth.geometric_grid(mmin, mmax)
        records = growth.sweep(model, s, pi, ample_cls, ms, ray=ray_arg)
        report = growth.estimate_exponent(records)
    except (ValueError, ChamberCoveringError) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    with open(out, "w") as fp:
        growth.write_csv(records, fp)
    click.echo(f"wrote {out} ({len(records)} records)")
    click.echo(
        f"slope = {report.slope:.4f}  intercept = {report.intercept:.4f}  "
        f"residual = {report.residual:.4f}"
    )
    click.echo(f"h0/m^1.5 band = [{report.band_min:.4f}, {report.band_max:.4f}]")


@main.command()
@click.argument("model_file")
@click.argument("cls")
def reduce(model_file: str, cls: str):
    """Reduce an integral movable class into the fundamental domain."""
    mf = _load(model_file)
    model, s, pi = _prepare_dynamics(mf)
    D = _parse_class(cls)
    try:
        word, reduced = reduce_to_domain(model, s, pi, D)
    except ValueError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    p, q = reduced.integer_coords()
    click.echo(f"word = [{' '.join(word)}]")
    click.echo(f"reduced = {p},{q}")


@main.command()
@click.argument("model_file")
@click.argument("cls")
def h0(model_file: str, cls: str):
    """Section count of an integral class in the open movable cone."""
    mf = _load(model_file)
    model, s, pi = _prepare_dynamics(mf)
    D = _parse_class(cls)
    try:
        count, word = h0_movable(model, s, pi, D)
        _, reduced = reduce_to_domain(model, s, pi, D)
    except (ValueError, ChamberCoveringError) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    p, q = reduced.integer_coords()
    click.echo(f"word = [{' '.join(word)}]")
    click.echo(f"reduced = {p},{q}")
    click.echo(f"h0 = {count}")


if __name__ == "__main__":
    main()
