import random
from fractions import Fraction

import pytest

from movcone import (
    C2Form,
    Cone2,
    CYModel,
    DivisorClass,
    LatticeMap,
    QuadNum,
    TriForm,
    area_coordinate,
    cone_contains,
    cone_coords,
    eigen_coords,
    eigen_sigma,
    fundamental_domain,
    in_open_movable,
    movable_cone,
    reduce_to_domain,
    slope_coordinate,
    validate_model,
)
from movcone.cones import SIGMA, SIGMA_INV, TAU2, same_ray

D = DivisorClass.from_ints


def model_ex41():
    return CYModel(
        "ex41", TriForm(2, 6, 8, 2), C2Form(44, 56), LatticeMap(1, 6, 0, -1), LatticeMap(-1, 0, 8, 1)
    )


def test_lattice_map_conventions():
    t1 = LatticeMap(1, 6, 0, -1)
    assert t1.apply(D(0, 1)) == D(6, -1)  # H2 -> 6 H1 - H2
    assert t1.apply(D(1, 0)) == D(1, 0)
    assert t1.det() == -1 and t1.trace() == 0


def test_sigma_composition():
    m = model_ex41()
    assert m.sigma.flat() == (-1, -6, 8, 47)
    assert m.sigma.apply(D(1, 0)) == D(-1, 8)


def test_mat_pow():
    s = model_ex41().sigma
    assert s.pow(0) == LatticeMap.identity()
    assert s.pow(2) == s @ s
    assert s.pow(-3) @ s.pow(3) == LatticeMap.identity()
    assert s.pow(5).apply(D(3, 2)) == s.apply(s.apply(s.apply(s.apply(s.apply(D(3, 2))))))


def test_lattice_map_rejects_singular():
    with pytest.raises(ValueError):
        LatticeMap(1, 2, 2, 4)


def test_validate_bundled_model():
    assert validate_model(model_ex41()) == []


def test_validate_identity_tau_flags_violations():
    bad = CYModel(
        "bad", TriForm(2, 6, 8, 2), C2Form(44, 56), LatticeMap.identity(), LatticeMap(-1, 0, 8, 1)
    )
    issues = validate_model(bad)
    assert any("determinant" in v for v in issues)
    assert any("finite order" in v for v in issues)


def test_validate_non_involution():
    bad = CYModel(
        "bad", TriForm(2, 6, 8, 2), C2Form(44, 56), LatticeMap(1, 6, 0, -1), LatticeMap(-1, 0, 8, -1)
    )
    issues = validate_model(bad)
    assert any("not the identity" in v or "determinant" in v for v in issues)


def test_validate_chi_integrality():
    bad = CYModel(
        "bad", TriForm(2, 6, 8, 2), C2Form(45, 56), LatticeMap(1, 6, 0, -1), LatticeMap(-1, 0, 8, 1)
    )
    assert any("chi integrality" in v for v in validate_model(bad))


def test_validate_ray_fixing():
    bad = CYModel(
        "bad", TriForm(2, 6, 8, 2), C2Form(44, 56), LatticeMap(-1, 0, 8, 1), LatticeMap(1, 6, 0, -1)
    )
    assert any("does not fix" in v for v in validate_model(bad))


def test_validate_cubic_positivity():
    # endpoints are positive but the section dips negative inside the cone
    bad = CYModel(
        "bad", TriForm(1, -50, -50, 1), C2Form(0, 0), LatticeMap(1, 6, 0, -1), LatticeMap(-1, 0, 8, 1)
    )
    assert any("not positive" in v for v in validate_model(bad))


def test_validate_negative_c2():
    bad = CYModel(
        "bad", TriForm(2, 6, 8, 2), C2Form(-12, 56), LatticeMap(1, 6, 0, -1), LatticeMap(-1, 0, 8, 1)
    )
    assert any("negative against nef" in v for v in validate_model(bad))


def test_eigen_sigma_exact_values(ex41):
    s = ex41.sigma
    assert s.eigenvalue == QuadNum(23, 4, 33)
    assert s.eigenvalue_inv == QuadNum(23, -4, 33)
    assert s.eigenvalue * s.eigenvalue_inv == QuadNum(1)
    assert s.d == 33
    assert s.ray1 == DivisorClass(QuadNum(-3, Fraction(1, 2), 33), QuadNum(1))
    # contracting ray is sign-flipped so the movable cone contains the nef cone
    assert s.ray2 == DivisorClass(QuadNum(3, Fraction(1, 2), 33), QuadNum(-1))


def test_eigenvalue_satisfies_characteristic_polynomial(ex41):
    lam = ex41.sigma.eigenvalue
    assert lam * lam - 46 * lam + 1 == QuadNum(0)


def test_eigenrays_are_exact_eigenvectors(ex41):
    s = ex41.sigma
    sig = ex41.model.sigma
    for ray, ev in ((s.ray1, s.eigenvalue), (s.ray2, s.eigenvalue_inv)):
        img = sig.apply(ray)
        assert img.p == ray.p * ev and img.q == ray.q * ev


def test_eigen_sigma_oguiso(oguiso):
    assert oguiso.model.sigma.trace() == 34
    assert oguiso.sigma.eigenvalue == QuadNum(17, 12, 2)


def test_eigen_sigma_rejects_finite_order():
    m = CYModel("rot", TriForm(2, 6, 8, 2), C2Form(44, 56), None, None,
                sigma_direct=LatticeMap(0, -1, 1, 0))
    with pytest.raises(ValueError):
        eigen_sigma(m)


def test_fundamental_domain_is_nef_cone(ex41, oguiso):
    for dyn in (ex41, oguiso):
        pi = fundamental_domain(dyn.model, D(1, 1))
        assert same_ray(pi.ray1, D(1, 0))
        assert same_ray(pi.ray2, D(0, 1))


def test_fundamental_domain_intermediate_classes(ex41):
    m = ex41.model
    x = D(1, 1)
    z1 = x + m.tau1.apply(x)
    assert same_ray(z1, D(1, 0))  # (8, 0)
    z2 = z1 + m.sigma.apply(z1)
    assert same_ray(z2, D(0, 1))  # (0, 64)


def test_fundamental_domain_rejects_non_ample(ex41):
    with pytest.raises(ValueError):
        fundamental_domain(ex41.model, D(0, 1))
    with pytest.raises(ValueError):
        fundamental_domain(ex41.model, D(-1, 2))


def test_fundamental_domain_independent_of_ample_choice(ex41, oguiso):
    rng = random.Random(11)
    for dyn in (ex41, oguiso):
        ref = fundamental_domain(dyn.model, D(1, 1))
        for _ in range(100):
            x = D(rng.randint(1, 40), rng.randint(1, 40))
            pi = fundamental_domain(dyn.model, x)
            assert pi == ref


def test_fundamental_domain_sigma_only(synthetic):
    pi = synthetic.pi
    assert cone_contains(pi, D(1, 0)) and cone_contains(pi, D(0, 1))
    assert same_ray(pi.ray1, D(1, 0))
    assert same_ray(pi.ray2, D(-1, 4))


def test_cone_membership_examples(ex41):
    nef = ex41.model.nef_cone()
    assert cone_contains(nef, D(1, 0))
    mov = movable_cone(ex41.sigma)
    assert cone_contains(mov, D(1, 1))
    assert not cone_contains(mov, D(-1, 0))


def test_cone_membership_matches_eigen_sign(ex41):
    rng = random.Random(5)
    s = ex41.sigma
    mov = movable_cone(s)
    for _ in range(2000):
        cls = D(rng.randint(-30, 30), rng.randint(-30, 30))
        if cls.is_zero():
            continue
        a1, a2 = eigen_coords(cls, s)
        assert cone_contains(mov, cls) == (a1.compare(0) >= 0 and a2.compare(0) >= 0)


def test_cone_rejects_proportional_rays():
    with pytest.raises(ValueError):
        Cone2(D(1, 2), D(2, 4))


def test_area_invariance_and_slope_scaling(ex41):
    rng = random.Random(17)
    m, s = ex41.model, ex41.sigma
    lam2 = s.eigenvalue**2
    for _ in range(10_000):
        cls = m.sigma.pow(rng.randint(-4, 4)).apply(D(rng.randint(1, 60), rng.randint(1, 60)))
        assert area_coordinate(m.sigma.apply(cls), s) == area_coordinate(cls, s)
        assert slope_coordinate(m.sigma.apply(cls), s) == lam2 * slope_coordinate(cls, s)


def test_eigen_coordinate_square_identities(ex41):
    rng = random.Random(23)
    s = ex41.sigma
    for _ in range(500):
        cls = D(rng.randint(1, 50), rng.randint(1, 50))
        a1, a2 = eigen_coords(cls, s)
        l1 = area_coordinate(cls, s)
        l2 = slope_coordinate(cls, s)
        assert a1 * a1 == l1 * l2
        assert a2 * a2 == l1 / l2


def test_slope_undefined_on_expanding_ray(ex41):
    s = ex41.sigma
    with pytest.raises(ZeroDivisionError):
        slope_coordinate(s.ray1, s)


def test_wall_crossing_area_sandwich(ex41, oguiso):
    rng = random.Random(29)
    for dyn in (ex41, oguiso):
        m, s, pi = dyn.model, dyn.sigma, dyn.pi
        lam = s.eigenvalue
        for _ in range(1000):
            d1 = Fraction(rng.randint(1, 99), rng.randint(1, 9))
            d2 = Fraction(rng.randint(1, 99), rng.randint(1, 9))
            cls = pi.ray1.scale(d1) + pi.ray2.scale(d2)
            val = area_coordinate(m.tau2.apply(cls), s)
            ref = area_coordinate(cls, s)
            assert val.compare(ref / lam) > 0
            assert val.compare(ref * lam) < 0


def test_reduce_identity_inside_domain(ex41):
    word, red = reduce_to_domain(ex41.model, ex41.sigma, ex41.pi, D(1, 0))
    assert word == [] and red == D(1, 0)


def test_reduce_sigma_power(ex41):
    cls = ex41.model.sigma.pow(5).apply(D(3, 2))
    word, red = reduce_to_domain(ex41.model, ex41.sigma, ex41.pi, cls)
    assert word == [SIGMA_INV] * 5
    assert red == D(3, 2)


def test_reduce_negative_power(ex41):
    cls = ex41.model.sigma.pow(-4).apply(D(2, 3))
    word, red = reduce_to_domain(ex41.model, ex41.sigma, ex41.pi, cls)
    assert word == [SIGMA] * 4
    assert red == D(2, 3)


def test_reduce_involution(ex41):
    cls = ex41.model.tau2.apply(D(2, 1))
    word, red = reduce_to_domain(ex41.model, ex41.sigma, ex41.pi, cls)
    assert word == [TAU2]
    assert red == D(2, 1)


def test_reduce_rejects_outside_movable(ex41):
    with pytest.raises(ValueError):
        reduce_to_domain(ex41.model, ex41.sigma, ex41.pi, D(-1, 0))
    with pytest.raises(ValueError):
        reduce_to_domain(ex41.model, ex41.sigma, ex41.pi, D(0, 0))


def test_reduce_random_words_land_in_domain(ex41, synthetic):
    rng = random.Random(31)
    for dyn in (ex41, synthetic):
        m, s, pi = dyn.model, dyn.sigma, dyn.pi
        maps = [m.sigma, m.sigma.inverse()]
        if m.has_involutions:
            maps += [m.tau1, m.tau2]
        for _ in range(400):
            cls = D(rng.randint(1, 20), rng.randint(1, 20))
            for _ in range(rng.randint(0, 8)):
                cls = rng.choice(maps).apply(cls)
            word, red = reduce_to_domain(m, s, pi, cls)
            assert cone_contains(pi, red)
            assert red.is_integral
            assert len(word) <= 70


def test_reduce_word_replays_to_reduced_class(ex41):
    rng = random.Random(37)
    m, s, pi = ex41.model, ex41.sigma, ex41.pi
    lookup = {SIGMA: m.sigma, SIGMA_INV: m.sigma.inverse(), TAU2: m.tau2}
    for _ in range(200):
        cls = m.sigma.pow(rng.randint(-5, 5)).apply(D(rng.randint(1, 30), rng.randint(1, 30)))
        word, red = reduce_to_domain(m, s, pi, cls)
        replay = cls
        for token in word:
            replay = lookup[token].apply(replay)
        assert replay == red


def test_reduce_preserves_lattice(ex41):
    rng = random.Random(41)
    m = ex41.model
    for _ in range(300):
        cls = D(rng.randint(1, 15), rng.randint(1, 15))
        moved = m.sigma.pow(rng.randint(-6, 6)).apply(cls)
        assert moved.is_integral
        _, red = reduce_to_domain(m, ex41.sigma, ex41.pi, moved)
        assert red.is_integral


def test_synthetic_model_validates(synthetic):
    assert validate_model(synthetic.model) == []
    assert not synthetic.model.has_involutions


def test_divisor_class_api():
    c = D(3, -2)
    assert c.is_integral and c.integer_coords() == (3, -2)
    irr = DivisorClass(QuadNum(0, 1, 2), QuadNum(1))
    assert not irr.is_integral
    with pytest.raises(ValueError):
        irr.integer_coords()
    assert (c + D(1, 1)) == D(4, -1)
    assert c.scale(2) == D(6, -4)
    assert -c == D(-3, 2)


def test_cone_coords_reconstruct(ex41):
    rng = random.Random(43)
    mov = movable_cone(ex41.sigma)
    for _ in range(200):
        cls = D(rng.randint(-20, 20), rng.randint(-20, 20))
        a1, a2 = cone_coords(mov, cls)
        rebuilt = mov.ray1.scale(a1) + mov.ray2.scale(a2)
        assert rebuilt == cls

def test_in_open_movable(ex41):
    s = ex41.sigma
    assert in_open_movable(D(1, 1), s)
    assert in_open_movable(D(-1, 8), s)  # just inside the expanding side
    assert not in_open_movable(D(-1, 0), s)
    assert not in_open_movable(D(0, 0), s)
