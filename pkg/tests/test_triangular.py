import itertools
import random

import pytest

from superchar.errors import ShapeError, SpringerUndefinedError
from superchar.gf import frobenius_q, make_tower
from superchar.triangular import (
    Involution,
    MirrorPoset,
    TriMatrix,
    cayley,
    cayley_inv,
    dagger,
    pattern_space,
    strict_positions,
    trunc_exp,
    trunc_log,
)

T9 = make_tower(3, 1, 2)
T3 = make_tower(3, 1, 1)


def dense(mat):
    """Dense n x n integer-encoding matrix, the oracle representation."""
    n = mat.n
    out = [[0] * n for _ in range(n)]
    if mat.unipotent:
        for i in range(n):
            out[i][i] = 1
    for (i, j), v in mat.entries.items():
        out[i - 1][j - 1] = v.enc
    return out


def dense_mul(a, b, tower):
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = tower.add_enc(acc, tower.mul_enc(a[i][k], b[k][j]))
            out[i][j] = acc
    return out


def random_unipotent(n, tower, rng):
    entries = {
        pos: tower.from_enc(rng.randrange(tower.size)) for pos in strict_positions(n)
    }
    return TriMatrix(n, tower, True, {p: v for p, v in entries.items() if v.enc})


def test_mul_single_term():
    a = TriMatrix.from_entries(3, T9, {(1, 2): 1}, unipotent=True)
    b = TriMatrix.from_entries(3, T9, {(2, 3): 1}, unipotent=True)
    assert (a * b).serialize() == (1, 1, 1)


def test_nilpotent_square_vanishes():
    x = TriMatrix.from_entries(3, T9, {(1, 2): 1})
    assert not (x * x).entries


def test_mul_against_dense_oracle():
    rng = random.Random(1)
    for _ in range(25):
        a = random_unipotent(4, T3, rng)
        b = random_unipotent(4, T3, rng)
        assert dense(a * b) == dense_mul(dense(a), dense(b), T3)


def test_inverse():
    assert TriMatrix.identity(3, T9).inverse() == TriMatrix.identity(3, T9)
    g = TriMatrix.from_entries(3, T3, {(1, 2): 1}, unipotent=True)
    assert g.inverse().serialize() == (2, 0, 0)
    g = TriMatrix.from_entries(3, T3, {(1, 2): 1, (2, 3): 1}, unipotent=True)
    assert g.inverse().serialize() == (2, 1, 2)  # 1 - e12 - e23 + e13
    rng = random.Random(2)
    for _ in range(20):
        a = random_unipotent(4, T3, rng)
        assert a * a.inverse() == TriMatrix.identity(4, T3)


def test_flag_mismatch_is_error():
    a = TriMatrix.from_entries(3, T9, {(1, 2): 1}, unipotent=True)
    x = TriMatrix.from_entries(3, T9, {(1, 2): 1})
    with pytest.raises(ShapeError):
        a * x
    with pytest.raises(ShapeError):
        x.inverse()
    with pytest.raises(ShapeError):
        a + a


# -- involutions against the dense matrix oracle --------------------------------


def dense_transpose(m):
    n = len(m)
    return [[m[j][i] for j in range(n)] for i in range(n)]


def anti_J(n):
    return [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)]


def omega(n, tower):
    half = n // 2
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        out[i][n - 1 - i] = tower.neg_enc(1) if i < half else 1
    return out


def dense_neg(m, tower):
    return [[tower.neg_enc(x) for x in row] for row in m]


def dense_frob(m, tower):
    return [[tower.frobenius_q_enc(x) for x in row] for row in m]


def oracle_dagger(mat, kind):
    tower = mat.tower
    n = mat.n
    d = dense(mat)
    if kind == "orthogonal":
        J = anti_J(n)
        return dense_mul(dense_mul(J, dense_transpose(d), tower), J, tower)
    if kind == "symplectic":
        Om = omega(n, tower)
        return dense_neg(
            dense_mul(dense_mul(Om, dense_transpose(d), tower), Om, tower), tower
        )
    J = anti_J(n)
    return dense_mul(dense_mul(J, dense_transpose(dense_frob(d, tower)), tower), J, tower)


def test_dagger_orthogonal_position_reflection():
    inv = Involution("orthogonal", 3, T9)
    e12 = TriMatrix.elementary(3, T9, 1, 2)
    assert dagger(e12, inv).serialize() == (0, 0, 1)  # e23


def test_dagger_unitary_frobenius_on_selfmirror():
    inv = Involution("unitary", 3, T9)
    t = T9.gen
    x = TriMatrix.from_entries(3, T9, {(1, 3): t})
    assert dagger(x, inv) == TriMatrix.from_entries(3, T9, {(1, 3): frobenius_q(t)})
    assert frobenius_q(t) == -t


@pytest.mark.parametrize(
    "kind,n,tower",
    [
        ("orthogonal", 3, T3),
        ("orthogonal", 4, T3),
        ("symplectic", 2, T3),
        ("symplectic", 4, T3),
        ("unitary", 3, T9),
        ("unitary", 4, T9),
    ],
)
def test_dagger_matches_dense_oracle_on_basis(kind, n, tower):
    inv = Involution(kind, n, tower)
    scalars = [1, tower.size - 1] if tower.size > 3 else [1, 2]
    for (i, j) in strict_positions(n):
        for s in scalars:
            x = TriMatrix.from_entries(n, tower, {(i, j): tower.from_enc(s)})
            assert dense(dagger(x, inv)) == oracle_dagger(x, kind)


@pytest.mark.parametrize(
    "kind,n,tower",
    [("orthogonal", 4, T3), ("symplectic", 4, T3), ("unitary", 3, T9)],
)
def test_dagger_antiautomorphism_and_involutive(kind, n, tower):
    inv = Involution(kind, n, tower)
    basis = [
        TriMatrix.elementary(n, tower, i, j, tower.from_enc(s))
        for (i, j) in strict_positions(n)
        for s in (1, tower.size - 1)
    ]
    for x in basis:
        assert dagger(dagger(x, inv), inv) == x
        for y in basis:
            assert dagger(x * y, inv) == dagger(y, inv) * dagger(x, inv)
    # involutive on all of g for a small case
    if tower is T3 and n == 4:
        for combo in itertools.product(range(3), repeat=6):
            x = TriMatrix(
                n,
                tower,
                False,
                {
                    pos: tower.from_enc(c)
                    for pos, c in zip(strict_positions(n), combo)
                    if c
                },
            )
            assert dagger(dagger(x, inv), inv) == x


def test_dagger_single_entry_lands_on_mirror_position():
    for kind, n, tower in [
        ("orthogonal", 4, T3),
        ("symplectic", 4, T3),
        ("unitary", 4, T9),
    ]:
        inv = Involution(kind, n, tower)
        for (i, j) in strict_positions(n):
            img = dagger(TriMatrix.elementary(n, tower, i, j), inv)
            assert set(img.entries) == {(n + 1 - j, n + 1 - i)}
            assert next(iter(img.entries.values())).enc != 0


def test_symplectic_needs_even_n():
    with pytest.raises(ValueError):
        Involution("symplectic", 3, T3)


def test_unitary_needs_quadratic_extension():
    with pytest.raises(ValueError):
        Involution("unitary", 3, T3)


# -- Springer morphisms ---------------------------------------------------------


def test_cayley_small_cases():
    assert cayley(TriMatrix.identity(3, T9)) == TriMatrix.zero(3, T9)
    g = TriMatrix.from_entries(3, T9, {(1, 2): 1}, unipotent=True)
    assert cayley(g) == TriMatrix.from_entries(3, T9, {(1, 2): 1})


def test_cayley_roundtrip_random():
    rng = random.Random(3)
    for _ in range(30):
        g = random_unipotent(4, T3, rng)
        assert cayley_inv(cayley(g)) == g
    for _ in range(10):
        g = random_unipotent(4, T9, rng)
        assert cayley_inv(cayley(g)) == g


def test_trunc_log_series_value():
    g = TriMatrix.from_entries(3, T3, {(1, 2): 1, (2, 3): 1}, unipotent=True)
    # x - x^2/2 = x + x^2 in characteristic 3
    assert trunc_log(g) == TriMatrix.from_entries(
        3, T3, {(1, 2): 1, (2, 3): 1, (1, 3): 1}
    )
    assert trunc_log(TriMatrix.identity(3, T3)) == TriMatrix.zero(3, T3)


def test_trunc_log_oracle_direct_series():
    rng = random.Random(4)
    half = T3.element(2).inverse()
    for _ in range(20):
        g = random_unipotent(3, T3, rng)
        x = g.nilpotent_part()
        expect = x - (x * x).scale(half)
        assert trunc_log(g) == expect
        assert trunc_exp(trunc_log(g)) == g


def test_trunc_log_refuses_high_nilpotency():
    g = TriMatrix.from_entries(4, T3, {(1, 2): 1}, unipotent=True)
    with pytest.raises(SpringerUndefinedError):
        trunc_log(g)  # n = 4 > p = 3


def test_cayley_adjoint_equivariance():
    rng = random.Random(5)
    for _ in range(20):
        g = random_unipotent(4, T3, rng)
        h = random_unipotent(4, T3, rng)
        lhs = cayley(h * g * h.inverse())
        # h x h^{-1} computed in the algebra
        x = cayley(g)
        m = x + h.nilpotent_part() * x
        z = h.inverse().nilpotent_part()
        assert lhs == m + m * z


# -- posets ----------------------------------------------------------------------


def test_chain_pattern_space():
    assert pattern_space(MirrorPoset.chain(4)) == strict_positions(4)


def test_type_d_omitted_pair_poset():
    pairs = [(i, j) for (i, j) in strict_positions(4) if (i, j) != (2, 3)]
    poset = MirrorPoset.from_pairs(4, pairs)
    assert len(pattern_space(poset)) == 5
    assert (2, 3) not in poset.pairs


def test_block_poset():
    poset = MirrorPoset.from_pairs(4, [(1, 2), (3, 4)])
    assert pattern_space(poset) == [(1, 2), (3, 4)]


def test_poset_transitive_closure_and_product_closure():
    poset = MirrorPoset.from_pairs(4, [(1, 2), (2, 3), (3, 4)])
    assert poset == MirrorPoset.chain(4)
    for (i, j) in poset.pairs:
        for (k, l) in poset.pairs:
            if j == k:
                assert (i, l) in poset.pairs


def test_poset_mirror_violation_names_the_pair():
    with pytest.raises(ValueError, match=r"\(3, 4\)"):
        MirrorPoset.from_pairs(4, [(1, 2)])  # mirror (3,4) missing


def test_poset_file_roundtrip(tmp_path):
    path = tmp_path / "poset.txt"
    path.write_text("4\n1 2\n3 4\n")
    poset = MirrorPoset.from_file(path)
    assert pattern_space(poset) == [(1, 2), (3, 4)]
    bad = tmp_path / "bad.txt"
    bad.write_text("4\n1 2\n")
    with pytest.raises(ValueError, match=r"\(3, 4\)"):
        MirrorPoset.from_file(bad)


def test_longest_chain():
    assert MirrorPoset.chain(4).longest_chain() == 4
    assert MirrorPoset.from_pairs(4, [(1, 2), (3, 4)]).longest_chain() == 2
