import json

import pytest

from superchar.errors import ShapeError, SizeGuardError
from superchar.involution_group import (
    GroupSpec,
    build_group,
    extend_functional,
    h_u_product_order,
    load_spec,
    stabilizer_subgroup,
    sub_l_r_g,
)
from superchar.triangular import MirrorPoset, TriMatrix, strict_positions


def exhaustive_U(bg):
    """Oracle: filter the enumerated pattern group for u^dagger = u^(-1)."""
    return sorted(
        (g.serialize() for g in bg.enumerate_G() if bg.dagger(g) == g.inverse()),
    )


@pytest.mark.parametrize(
    "kwargs,dim,order",
    [
        (dict(family="UU", n=3, p=3, k=2), 3, 27),
        (dict(family="UO", n=3, p=3), 1, 3),
        (dict(family="USp", n=2, p=3), 1, 3),
        (dict(family="UO", n=4, p=3), 2, 9),
        (dict(family="USp", n=4, p=3), 4, 81),
        (dict(family="UU", n=2, p=3, k=2), 1, 3),
        (dict(family="UU", n=2, p=5, k=2), 1, 5),
    ],
)
def test_build_U_and_u_dimensions(kwargs, dim, order):
    bg = build_group(GroupSpec(**kwargs))
    assert bg.u_basis.dim == dim
    assert bg.order_U == order == bg.sc.size**dim


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="UU", n=3, p=3, k=2),
        dict(family="UO", n=3, p=3),
        dict(family="UO", n=4, p=3),
        dict(family="USp", n=4, p=3),
    ],
)
def test_build_U_matches_exhaustive_filter(kwargs):
    bg = build_group(GroupSpec(**kwargs))
    assert [u.serialize() for u in bg.U] == exhaustive_U(bg)


def test_ut2_order():
    bg = build_group(GroupSpec(family="UT", n=2, p=3))
    assert bg.order_G == 3
    assert bg.u_basis is None


def test_u_antisymmetry_exhaustive():
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    for coords in bg.u_basis.enumerate_coords():
        x = bg.u_basis.element(coords)
        assert bg.dagger(x) == -x


def test_uo3_u_is_one_dimensional_line():
    bg = build_group(GroupSpec(family="UO", n=3, p=3))
    (b,) = bg.u_basis.matrices
    # x_23 = -x_12 and x_13 = 0 forced in odd characteristic
    assert b.get(2, 3) == -b.get(1, 2)
    assert b.get(1, 3).enc == 0


def test_H_positions_and_orders():
    bg3 = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    assert bg3.h_positions == strict_positions(3)  # h = g when n = 3
    assert bg3.order_H == bg3.order_G
    bg4 = build_group(GroupSpec(family="UO", n=4, p=3))
    assert bg4.h_positions == [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="UU", n=4, p=3, k=2),
        dict(family="UO", n=4, p=3),
        dict(family="USp", n=4, p=3),
        dict(family="UU", n=3, p=3, k=2),
    ],
)
def test_G_equals_HU(kwargs):
    bg = build_group(GroupSpec(**kwargs))
    assert h_u_product_order(bg) == bg.order_G


def test_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec(family="USp", n=3, p=3)
    with pytest.raises(ValueError):
        GroupSpec(family="UU", n=3, p=3, k=1)
    with pytest.raises(ValueError):
        GroupSpec(family="XX", n=3, p=3)


def test_spec_file_loading(tmp_path):
    poset_file = tmp_path / "poset.txt"
    poset_file.write_text("4\n1 2\n3 4\n")
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(
        json.dumps({"family": "UO", "n": 4, "p": 3, "e": 1, "k": 1, "poset": "poset.txt"})
    )
    spec = load_spec(spec_file)
    assert spec.family == "UO" and spec.poset == MirrorPoset.from_pairs(4, [(1, 2), (3, 4)])
    bg = build_group(spec)
    assert bg.order_U == 3


def test_size_guard_on_u():
    with pytest.raises(SizeGuardError):
        build_group(GroupSpec(family="UU", n=8, p=5, k=2))


def test_flatten_roundtrip():
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    import itertools

    for combo in itertools.islice(
        itertools.product(range(bg.tower.size), repeat=3), 0, 200, 7
    ):
        mat = TriMatrix(
            3,
            bg.tower,
            False,
            {
                pos: bg.tower.from_enc(c)
                for pos, c in zip(bg.positions, combo)
                if c
            },
        )
        assert bg.unflatten(bg.flatten(mat)) == mat


# -- functionals ---------------------------------------------------------------


def test_extend_functional_zero():
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    lam = bg.functional_on_u((0,) * bg.u_basis.dim)
    eta = extend_functional(bg, lam)
    assert all(c == 0 for c in eta.coeffs)


def test_extend_functional_restriction_and_antisymmetry():
    bg = build_group(GroupSpec(family="USp", n=4, p=3))
    for coeffs in [(1, 0, 0, 0), (0, 1, 2, 0), (2, 2, 1, 1)]:
        lam = bg.functional_on_u(coeffs)
        eta = extend_functional(bg, lam)
        for b in bg.u_basis.matrices:
            assert eta.evaluate(b) == lam.evaluate(b)
        for c in bg.g_basis_mats:
            assert eta.evaluate(bg.dagger(c)) == bg.sc.neg(eta.evaluate(c))


def test_sub_l_r_g_trivial_functional():
    bg = build_group(GroupSpec(family="UO", n=4, p=3))
    eta = bg.functional_on_g((0,) * bg.flat_dim)
    l, r, g = sub_l_r_g(bg, eta)
    assert l.dim == r.dim == g.dim == bg.flat_dim


def test_sub_l_r_g_unitary_selfarc():
    # lambda for the arc 1~3 with a trace-zero label; l_eta = {x : x_23 = 0}
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    t_enc = bg.tower.gen.enc
    arc = TriMatrix.from_entries(3, bg.tower, {(1, 3): bg.tower.gen})
    lam_coeffs = []
    for b in bg.u_basis.matrices:
        lam_coeffs.append(bg.tower.mul_enc(t_enc, b.get(1, 3).enc))
    lam = bg.functional_on_u(lam_coeffs)
    assert lam.evaluate(arc) != 0
    eta = extend_functional(bg, lam)
    l, r, g_eta = sub_l_r_g(bg, eta)
    assert l.dim == bg.flat_dim - 2  # one F_9 entry killed
    e23 = TriMatrix.elementary(3, bg.tower, 2, 3)
    e12 = TriMatrix.elementary(3, bg.tower, 1, 2)
    e13 = TriMatrix.elementary(3, bg.tower, 1, 3)
    assert not l.contains(e23)
    assert l.contains(e12) and l.contains(e13)
    # kernel property on g_eta
    for x in g_eta.matrices:
        for y in g_eta.matrices:
            assert eta.evaluate(x * y) == 0


def test_stabilizer_subgroup_of_zero_is_U():
    bg = build_group(GroupSpec(family="UO", n=4, p=3))
    eta = extend_functional(bg, bg.functional_on_u((0, 0)))
    _, _, g_eta = sub_l_r_g(bg, eta)
    assert len(stabilizer_subgroup(bg, g_eta)) == bg.order_U


def test_functional_outside_domain_is_error():
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    lam = bg.functional_on_u((1,) * bg.u_basis.dim)
    e12 = TriMatrix.elementary(3, bg.tower, 1, 2)  # not antisymmetric
    with pytest.raises(ShapeError):
        lam.evaluate(e12)


def test_poset_restricted_group():
    pairs = [(i, j) for (i, j) in strict_positions(4) if (i, j) != (2, 3)]
    poset = MirrorPoset.from_pairs(4, pairs)
    bg = build_group(GroupSpec(family="UO", n=4, p=3, poset=poset))
    assert len(bg.positions) == 5
    assert bg.u_basis.dim == 2
    assert bg.order_U == 9
