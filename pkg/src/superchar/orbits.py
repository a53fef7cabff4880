"""Orbit enumeration for the group actions in play.

The engine works on coordinate tuples over the scalar field: each
generator's action is linear, so it is applied as a precomputed matrix.
Orbits are found by union-find over generator images, which makes the
image computation embarrassingly parallel while keeping the output
deterministic (the merge is associative and the final order is a
canonical sort).  A naive full-group sweep is kept as a test oracle for
generator sufficiency.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import SizeGuardError
from .involution_group import BuiltGroup, G_SPACE_GUARD, U_SPACE_GUARD
from .linalg import matvec, transpose
from .triangular import TriMatrix


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


@dataclass
class Orbit:
    orbit_id: int
    rep_key: tuple
    rep: tuple
    members: list
    size: int


class OrbitIndex:
    """A partition of an enumerated space into orbits, canonically ordered
    by each orbit's lexicographically least serialized member."""

    def __init__(self, space, orbits, orbit_of):
        self.space = space
        self.index = {v: i for i, v in enumerate(space)}
        self.orbits = orbits
        self.orbit_of = orbit_of

    @property
    def count(self) -> int:
        return len(self.orbits)

    def orbit_id(self, vec) -> int:
        return self.orbit_of[self.index[vec]]

    def sizes(self):
        return [o.size for o in self.orbits]

    def members(self, orbit_id: int):
        return [self.space[i] for i in self.orbits[orbit_id].members]


def partition_space(space, maps, canon_key=None, threads: int = 1) -> OrbitIndex:
    """Partition ``space`` into orbits of the group generated by ``maps``.

    Every map must send the space into itself; since the generators have
    finite order, closing under them alone closes under the group.
    """
    space = list(space)
    index = {v: i for i, v in enumerate(space)}
    uf = UnionFind(len(space))
    for mp in maps:
        images = _apply_map(space, mp, threads)
        for i, img in enumerate(images):
            j = index.get(img)
            if j is None:
                raise AssertionError("generator image left the space")
            uf.union(i, j)
    groups: dict = {}
    for i in range(len(space)):
        groups.setdefault(uf.find(i), []).append(i)
    key_fn = canon_key or (lambda v: v)
    raw = []
    for members in groups.values():
        keyed = [(key_fn(space[i]), i) for i in members]
        keyed.sort()
        raw.append((keyed[0][0], space[keyed[0][1]], [i for _, i in keyed]))
    raw.sort(key=lambda t: t[0])
    orbits = []
    orbit_of = [0] * len(space)
    for oid, (rep_key, rep, members) in enumerate(raw):
        orbits.append(Orbit(oid, rep_key, rep, members, len(members)))
        for i in members:
            orbit_of[i] = oid
    return OrbitIndex(space, orbits, orbit_of)


def _apply_map(space, mp, threads: int):
    if threads <= 1 or len(space) < 2048:
        return [mp(v) for v in space]
    chunk = (len(space) + threads - 1) // threads
    parts = [space[i : i + chunk] for i in range(0, len(space), chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda part: [mp(v) for v in part], parts))
    return [img for part in results for img in part]


# -- matrices of the linear actions ---------------------------------------


def u_action_matrix(bg: BuiltGroup, g: TriMatrix):
    """Matrix (over the scalar field) of x -> g x g^dagger on u."""
    cols = []
    for b in bg.u_basis.matrices:
        img = bg.act(g, b)
        coords = bg.u_space.coords(bg.flatten(img))
        if coords is None:
            raise AssertionError("the dagger action left u")
        cols.append(coords)
    return transpose(cols)


def g_left_matrix(bg: BuiltGroup, g: TriMatrix):
    """Matrix of x -> g x on the flat coordinates of g."""
    a = g.nilpotent_part()
    cols = [bg.flatten(b + a * b) for b in bg.g_basis_mats]
    return transpose(cols)


def g_right_matrix(bg: BuiltGroup, g: TriMatrix):
    a = g.nilpotent_part()
    cols = [bg.flatten(b + b * a) for b in bg.g_basis_mats]
    return transpose(cols)


def _map_from_matrix(M, sc):
    """Apply a linear map, exploiting that generator matrices are close
    to the identity (elementary generators touch few coordinates)."""
    dim = len(M)
    deltas = []
    for i, row in enumerate(M):
        if any(row[j] != (sc.one if j == i else sc.zero) for j in range(dim)):
            deltas.append((i, [(j, v) for j, v in enumerate(row) if v]))
    if len(deltas) > dim // 2:
        return lambda v: matvec(M, v, sc)

    add, mul = sc.add, sc.mul

    def apply(v):
        out = list(v)
        for i, cols in deltas:
            acc = 0
            for j, a in cols:
                b = v[j]
                if b:
                    acc = add(acc, mul(a, b)) if acc else mul(a, b)
            out[i] = acc
        return tuple(out)

    return apply


def _maps_from_matrices(matrices, sc):
    return [_map_from_matrix(M, sc) for M in matrices]


def _dual_maps(bg, gens, matrix_fn):
    """Dual action (g mu)(x) = mu(g^{-1} x): transposed inverse matrices."""
    mats = [transpose(matrix_fn(bg, g.inverse())) for g in gens]
    return _maps_from_matrices(mats, bg.sc)


# -- the four orbit partitions ----------------------------------------------


def _cached(bg: BuiltGroup, key, builder):
    cache = getattr(bg, "_orbit_cache", None)
    if cache is None:
        cache = {}
        bg._orbit_cache = cache
    if key not in cache:
        cache[key] = builder()
    return cache[key]


def _u_space_list(bg: BuiltGroup):
    return bg.u_basis.enumerate_coords(force=bg.force)


def _u_canon_key(bg: BuiltGroup):
    combine = bg.u_space.combine
    unflatten = bg.unflatten
    return lambda coords: unflatten(combine(coords)).serialize()


def orbit_partition_u(bg: BuiltGroup, threads: int = 1) -> OrbitIndex:
    """Orbits of G acting by g . x = g x g^dagger on the enumerated u."""

    def build():
        mats = [u_action_matrix(bg, g) for g in bg.G_gens]
        return partition_space(
            _u_space_list(bg),
            _maps_from_matrices(mats, bg.sc),
            canon_key=_u_canon_key(bg),
            threads=threads,
        )

    return _cached(bg, "u", build)


def _dual_space_list(bg: BuiltGroup):
    dim = bg.u_basis.dim
    size = bg.sc.size**dim
    if size > U_SPACE_GUARD and not bg.force:
        raise SizeGuardError(f"dual space of size {size} exceeds {U_SPACE_GUARD}")
    return list(itertools.product(bg.sc.elements, repeat=dim))


def orbit_partition_dual(bg: BuiltGroup, threads: int = 1) -> OrbitIndex:
    """Orbits of G on the full dual space of u; (g.lam)(x) = lam(g^{-1}.x)."""

    def build():
        maps = _dual_maps(bg, bg.G_gens, u_action_matrix)
        return partition_space(_dual_space_list(bg), maps, threads=threads)

    return _cached(bg, "dual", build)


def h_orbit_partition_dual(bg: BuiltGroup, threads: int = 1) -> OrbitIndex:
    """The same dual space partitioned by the normal subgroup H."""

    def build():
        maps = _dual_maps(bg, bg.H_gens, u_action_matrix)
        return partition_space(_dual_space_list(bg), maps, threads=threads)

    return _cached(bg, "dual_h", build)


def closure_of(start, maps) -> frozenset:
    """BFS closure of a single element under a family of self-maps."""
    seen = {tuple(start)}
    frontier = [tuple(start)]
    while frontier:
        nxt = []
        for v in frontier:
            for mp in maps:
                w = mp(v)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return frozenset(seen)


def h_orbit_of_functional(bg: BuiltGroup, coeffs) -> frozenset:
    """Closure of one u* vector under H (no full-space enumeration)."""
    return closure_of(coeffs, _dual_maps(bg, bg.H_gens, u_action_matrix))


def h_left_orbit_of_g_functional(bg: BuiltGroup, coeffs) -> frozenset:
    """Closure of one g* vector under the left action of H:
    (h mu)(x) = mu(h^{-1} x)."""
    return closure_of(coeffs, _dual_maps(bg, bg.H_gens, g_left_matrix))


def left_orbit_of_g_element(bg: BuiltGroup, flat) -> frozenset:
    """Closure of one element of g under left multiplication by G."""
    mats = [g_left_matrix(bg, g) for g in bg.G_gens]
    return closure_of(flat, _maps_from_matrices(mats, bg.sc))


# -- ambient algebra-group orbits ---------------------------------------------


def _g_space_list(bg: BuiltGroup):
    size = bg.sc.size**bg.flat_dim
    if size > G_SPACE_GUARD and not bg.force:
        raise SizeGuardError(f"|g| = {size} exceeds the guard {G_SPACE_GUARD}")
    return list(itertools.product(bg.sc.elements, repeat=bg.flat_dim))


def _g_canon_key(bg: BuiltGroup):
    unflatten = bg.unflatten
    return lambda flat: unflatten(flat).serialize()


def two_sided_orbit_partition_g(bg: BuiltGroup, threads: int = 1) -> OrbitIndex:
    """Orbits of G x G acting by (g, h) . x = g x h^{-1} on g."""

    def build():
        mats = [g_left_matrix(bg, g) for g in bg.G_gens]
        mats += [g_right_matrix(bg, g) for g in bg.G_gens]
        return partition_space(
            _g_space_list(bg),
            _maps_from_matrices(mats, bg.sc),
            canon_key=_g_canon_key(bg),
            threads=threads,
        )

    return _cached(bg, "g2", build)


def two_sided_orbit_partition_g_dual(bg: BuiltGroup, threads: int = 1) -> OrbitIndex:
    """Orbits on g* under ((g,h).lam)(x) = lam(g^{-1} x h)."""

    def build():
        maps = _dual_maps(bg, bg.G_gens, g_left_matrix)
        maps += _dual_maps(bg, bg.G_gens, g_right_matrix)
        return partition_space(_g_space_list(bg), maps, threads=threads)

    return _cached(bg, "g2_dual", build)


def left_orbit_partition_g_dual(bg: BuiltGroup, threads: int = 1) -> OrbitIndex:
    def build():
        maps = _dual_maps(bg, bg.G_gens, g_left_matrix)
        return partition_space(_g_space_list(bg), maps, threads=threads)

    return _cached(bg, "g_left_dual", build)


# -- oracles -------------------------------------------------------------------


def full_sweep_orbit_u(bg: BuiltGroup, coords) -> frozenset:
    """{g . x : g in G} by enumerating all of G; the generator-sufficiency
    oracle for the BFS engine."""
    x = bg.u_basis.element(coords)
    out = set()
    for g in bg.enumerate_G():
        y = bg.act(g, x)
        c = bg.u_space.coords(bg.flatten(y))
        out.add(c)
    return frozenset(out)


def orbit_dump_lines(oi: OrbitIndex, rep_render=None):
    """JSON-lines rendering {"rep": [...], "size": s, "orbit_id": i}."""
    import json

    lines = []
    for o in oi.orbits:
        rep = list(rep_render(o.rep) if rep_render else o.rep_key)
        lines.append(
            json.dumps({"rep": rep, "size": o.size, "orbit_id": o.orbit_id})
        )
    return lines
