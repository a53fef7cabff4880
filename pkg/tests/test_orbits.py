import json

import pytest

from superchar.involution_group import GroupSpec, build_group
from superchar.orbits import (
    full_sweep_orbit_u,
    h_orbit_of_functional,
    h_orbit_partition_dual,
    left_orbit_of_g_element,
    orbit_dump_lines,
    orbit_partition_dual,
    orbit_partition_u,
    two_sided_orbit_partition_g,
    two_sided_orbit_partition_g_dual,
)
from superchar.triangular import MirrorPoset, TriMatrix, strict_positions


def test_zero_is_a_fixed_point():
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    oi = orbit_partition_u(bg)
    zero = (0,) * bg.u_basis.dim
    assert oi.orbits[oi.orbit_id(zero)].size == 1
    od = orbit_partition_dual(bg)
    assert od.orbits[od.orbit_id(zero)].size == 1


@pytest.mark.parametrize(
    "kwargs,count",
    [
        (dict(family="UU", n=3, p=3, k=2), 11),
        (dict(family="UO", n=4, p=3), 5),
        (dict(family="UU", n=4, p=3, k=2), 41),
    ],
)
def test_orbit_counts(kwargs, count):
    bg = build_group(GroupSpec(**kwargs))
    oi = orbit_partition_u(bg)
    assert oi.count == count
    assert sum(oi.sizes()) == bg.sc.size**bg.u_basis.dim


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="UO", n=3, p=3),
        dict(family="UO", n=4, p=3),
        dict(family="USp", n=4, p=3),
        dict(family="UU", n=3, p=3, k=2),
    ],
)
def test_bfs_equals_full_group_sweep(kwargs):
    """Generator sufficiency: BFS orbits equal the naive |G|-sweeps."""
    bg = build_group(GroupSpec(**kwargs))
    assert bg.order_G <= 10**5
    oi = orbit_partition_u(bg)
    for orbit in oi.orbits:
        swept = full_sweep_orbit_u(bg, orbit.rep)
        assert swept == {oi.space[i] for i in orbit.members}


def test_orbit_sizes_divide_group_order():
    for kwargs in [
        dict(family="UU", n=4, p=3, k=2),
        dict(family="USp", n=4, p=3),
    ]:
        bg = build_group(GroupSpec(**kwargs))
        for engine in (orbit_partition_u, orbit_partition_dual):
            for size in engine(bg).sizes():
                assert bg.order_G % size == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="UU", n=3, p=3, k=2),
        dict(family="UO", n=4, p=3),
        dict(family="USp", n=4, p=3),
        dict(family="UU", n=4, p=3, k=2),
    ],
)
def test_primal_dual_orbit_count_duality(kwargs):
    bg = build_group(GroupSpec(**kwargs))
    assert orbit_partition_u(bg).count == orbit_partition_dual(bg).count


def test_two_sided_orbits_ut2():
    bg = build_group(GroupSpec(family="UT", n=2, p=3))
    o2 = two_sided_orbit_partition_g(bg)
    assert o2.count == 3  # the action is trivial on a 1-dim algebra
    assert sorted(o2.sizes()) == [1, 1, 1]


def test_two_sided_orbits_ut3_match_labeled_partitions():
    from superchar.unitary import enumerate_labeled

    bg = build_group(GroupSpec(family="UT", n=3, p=3))
    o2 = two_sided_orbit_partition_g(bg)
    assert o2.count == enumerate_labeled(3, 2) == 11
    od2 = two_sided_orbit_partition_g_dual(bg)
    assert od2.count == o2.count


def test_two_sided_dual_count_matches_primal_ut3_f9():
    bg = build_group(
        GroupSpec(family="UT", n=3, p=3, k=2, scalar_degree=2)
    )
    assert (
        two_sided_orbit_partition_g(bg).count
        == two_sided_orbit_partition_g_dual(bg).count
    )


def test_type_d_strictly_finer_orbits():
    """The two stated elements: one ambient orbit, two poset orbits."""
    full = build_group(GroupSpec(family="UO", n=4, p=3))
    pairs = [(i, j) for (i, j) in strict_positions(4) if (i, j) != (2, 3)]
    restricted = build_group(
        GroupSpec(family="UO", n=4, p=3, poset=MirrorPoset.from_pairs(4, pairs))
    )
    x1 = TriMatrix.from_entries(4, full.tower, {(1, 2): 1, (3, 4): 2})
    x2 = TriMatrix.from_entries(
        4, full.tower, {(1, 2): 1, (3, 4): 2, (1, 3): 1, (2, 4): 2}
    )
    o_full = orbit_partition_u(full)
    o_rest = orbit_partition_u(restricted)
    c = lambda bg, m: bg.u_space.coords(bg.flatten(m))
    assert o_full.orbit_id(c(full, x1)) == o_full.orbit_id(c(full, x2))
    assert o_rest.orbit_id(c(restricted, x1)) != o_rest.orbit_id(c(restricted, x2))
    assert o_rest.count > o_full.count
    # every restricted orbit sits inside one ambient orbit (finer partition)
    for orbit in o_rest.orbits:
        ambient_ids = {
            o_full.orbit_id(c(full, restricted.unflatten(restricted.u_space.combine(v))))
            for v in (o_rest.space[i] for i in orbit.members)
        }
        assert len(ambient_ids) == 1


def test_left_multiplication_collapse():
    """Gx ∩ u lies inside the dagger orbit of x (one direction of the
    superclass-intersection argument)."""
    bg = build_group(GroupSpec(family="USp", n=4, p=3))
    oi = orbit_partition_u(bg)
    for orbit in oi.orbits:
        flat = bg.u_space.combine(orbit.rep)
        for img in left_orbit_of_g_element(bg, flat):
            coords = bg.u_space.coords(img)
            if coords is not None:
                assert oi.orbit_id(coords) == oi.orbit_id(orbit.rep)


def test_h_suborbits_refine_dual_orbits():
    bg = build_group(GroupSpec(family="USp", n=4, p=3))
    od = orbit_partition_dual(bg)
    oh = h_orbit_partition_dual(bg)
    for orbit in od.orbits:
        h_ids = {oh.orbit_of[i] for i in orbit.members}
        # the H-orbits tile the G-orbit and all have the same size
        sizes = {oh.orbits[h].size for h in h_ids}
        assert len(sizes) == 1
        assert sizes.pop() * len(h_ids) == orbit.size


def test_h_orbit_closure_matches_partition():
    bg = build_group(GroupSpec(family="UU", n=3, p=3, k=2))
    oh = h_orbit_partition_dual(bg)
    for orbit in oh.orbits[:6]:
        closure = h_orbit_of_functional(bg, orbit.rep)
        assert closure == {oh.space[i] for i in orbit.members}


def test_orbit_dump_lines_format():
    bg = build_group(GroupSpec(family="UO", n=3, p=3))
    lines = orbit_dump_lines(orbit_partition_u(bg))
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert set(first) == {"rep", "size", "orbit_id"}
    assert first["orbit_id"] == 0


def test_threaded_partition_is_identical():
    bg1 = build_group(GroupSpec(family="UU", n=4, p=3, k=2))
    bg2 = build_group(GroupSpec(family="UU", n=4, p=3, k=2))
    a = orbit_partition_u(bg1, threads=1)
    b = orbit_partition_u(bg2, threads=4)
    assert [o.rep_key for o in a.orbits] == [o.rep_key for o in b.orbits]
    assert a.orbit_of == b.orbit_of
