"""Twisted set partitions and the closed-form supercharacter formula for
the unipotent unitary family.

A twisted F_q-set partition of [n] is an arc set {(i, j, a)} over
F_{q^2} with i < j, distinct left endpoints, distinct right endpoints,
closed under mirroring (i,j,a) -> (n+1-j, n+1-i, -a^q); an arc on a
self-mirror position (i, n+1-i) must carry a label with a^q + a = 0.
These index both the superclasses and the supercharacters.

The value formula is

    chi^eta(u_nu) = deg(eta) / (-q)^nst * theta(sum of label products)

when no arc of eta is "blocked" by nu, and 0 otherwise.  Degrees are
sourced from brute-force H-orbit sizes (the printed closed forms are
evaluated alongside and diffed in the audit, not trusted).
"""

from __future__ import annotations

from dataclasses import dataclass

from .cyclotomic import CycloValue, root_power
from .errors import NonIntegralityError, ShapeError
from .gf import FieldTower, Theta
from .involution_group import BuiltGroup, Functional
from .orbits import h_orbit_of_functional, orbit_partition_u, orbit_partition_dual
from .sct import Report, SuperclassTable, SupercharTable
from .triangular import TriMatrix


def _mirror_pos(n: int, i: int, j: int):
    return (n + 1 - j, n + 1 - i)


def _mirror_label(tower: FieldTower, a: int) -> int:
    return tower.neg_enc(tower.frobenius_q_enc(a))


@dataclass(frozen=True)
class TwistedSetPartition:
    """An arc-labeled set partition with mirror closure; labels are
    canonical field encodings in F_{q^2}^x."""

    n: int
    arcs: frozenset  # (i, j, label_enc), full mirror closure

    @classmethod
    def from_arcs(cls, n: int, tower: FieldTower, arcs) -> "TwistedSetPartition":
        closed = set()
        for (i, j, a) in arcs:
            a = a.enc if hasattr(a, "enc") else a
            closed.add((i, j, a))
            mi, mj = _mirror_pos(n, i, j)
            closed.add((mi, mj, _mirror_label(tower, a)))
        part = cls(n, frozenset(closed))
        part.validate(tower)
        return part

    def validate(self, tower: FieldTower):
        lefts = set()
        rights = set()
        for (i, j, a) in self.arcs:
            if not (1 <= i < j <= self.n):
                raise ShapeError(f"arc ({i},{j}) is not an increasing pair in [{self.n}]")
            if a == 0:
                raise ShapeError("arc labels must be nonzero")
            if i in lefts or j in rights:
                raise ShapeError("arc endpoints collide; not a set partition")
            lefts.add(i)
            rights.add(j)
            mi, mj = _mirror_pos(self.n, i, j)
            mirror = (mi, mj, _mirror_label(tower, a))
            if mirror not in self.arcs:
                raise ShapeError(f"mirror closure violated at arc ({i},{j})")
        # a self-mirror arc must satisfy a^q + a = 0; that is exactly the
        # statement that it equals its own mirror, checked above

    def positions(self):
        return sorted((i, j) for (i, j, _) in self.arcs)

    def sort_key(self):
        return tuple(sorted(self.arcs))

    def is_elementary(self) -> bool:
        return len(self.mirror_orbits()) == 1

    def mirror_orbits(self):
        """Arcs grouped into mirror orbits, ordered by left endpoint."""
        seen = set()
        out = []
        for arc in sorted(self.arcs):
            if arc in seen:
                continue
            (i, j, a) = arc
            mi, mj = _mirror_pos(self.n, i, j)
            group = {arc}
            seen.add(arc)
            if (mi, mj) != (i, j):
                mirror = next(
                    x for x in self.arcs if (x[0], x[1]) == (mi, mj)
                )
                group.add(mirror)
                seen.add(mirror)
            out.append(frozenset(group))
        return out

    def to_json(self) -> dict:
        reps = [min(orbit) for orbit in self.mirror_orbits()]
        return {"n": self.n, "arcs": [list(arc) for arc in sorted(reps)]}

    @classmethod
    def from_json(cls, tower: FieldTower, data: dict) -> "TwistedSetPartition":
        return cls.from_arcs(data["n"], tower, [tuple(a) for a in data["arcs"]])

    def __repr__(self):
        body = ", ".join(f"{i}~{j}:{a}" for (i, j, a) in sorted(self.arcs))
        return f"Twisted[{body or 'empty'}; n={self.n}]"


# -- enumeration ----------------------------------------------------------------


def _position_mirror_orbits(n: int):
    orbits = []
    seen = set()
    for pos in sorted((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)):
        if pos in seen:
            continue
        mpos = _mirror_pos(n, *pos)
        orbit = (pos,) if mpos == pos else (pos, mpos)
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def _self_labels(tower: FieldTower):
    """Nonzero labels with a^q + a = 0."""
    return [
        a
        for a in range(1, tower.size)
        if tower.add_enc(tower.frobenius_q_enc(a), a) == 0
    ]


def enumerate_twisted(n: int, tower: FieldTower):
    """All twisted F_q-set partitions of [n], canonically ordered."""
    if tower.k != 2:
        raise ValueError("twisted partitions need a quadratic extension")
    orbits = _position_mirror_orbits(n)
    nonzero = list(range(1, tower.size))
    selfz = _self_labels(tower)
    out = []

    def compatible(chosen, orbit):
        lefts = {i for (i, j) in chosen}
        rights = {j for (i, j) in chosen}
        for (i, j) in orbit:
            if i in lefts or j in rights:
                return False
            lefts.add(i)
            rights.add(j)
        return True

    def rec(idx, chosen, labeled):
        if idx == len(orbits):
            out.append(TwistedSetPartition.from_arcs(n, tower, labeled))
            return
        rec(idx + 1, chosen, labeled)
        orbit = orbits[idx]
        if not compatible(chosen, orbit):
            return
        (i, j) = orbit[0]
        labels = selfz if len(orbit) == 1 else nonzero
        for a in labels:
            rec(idx + 1, chosen + list(orbit), labeled + [(i, j, a)])

    rec(0, [], [])
    out.sort(key=lambda t: t.sort_key())
    return out


def enumerate_labeled(n: int, num_labels: int) -> int:
    """Count of ordinary labeled set partitions of [n] (arcs i<j with
    distinct left and right endpoints, labels from a set of the given
    size); the type-A counting oracle."""
    positions = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]

    def rec(idx, lefts, rights):
        if idx == len(positions):
            return 1
        total = rec(idx + 1, lefts, rights)
        (i, j) = positions[idx]
        if i not in lefts and j not in rights:
            total += num_labels * rec(idx + 1, lefts | {i}, rights | {j})
        return total

    return rec(0, frozenset(), frozenset())


# -- representatives -------------------------------------------------------------


def rep_matrix(bg: BuiltGroup, eta: TwistedSetPartition) -> TriMatrix:
    """x_eta: the element of u with (x_eta)_{ij} = a for each arc."""
    entries = {}
    for (i, j, a) in eta.arcs:
        entries[(i, j)] = bg.tower.from_enc(a)
    x = TriMatrix(bg.n, bg.tower, False, entries)
    if bg.dagger(x) != -x:
        raise ShapeError("x_eta is not antisymmetric; invalid twisted partition")
    rows = [i for (i, j, _) in eta.arcs]
    cols = [j for (i, j, _) in eta.arcs]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise ShapeError("x_eta has a repeated row or column")
    return x


def rep_group_element(
    bg: BuiltGroup, eta: TwistedSetPartition, springer_name: str = "cayley"
) -> TriMatrix:
    """u_eta, the group element with f(u_eta) = x_eta."""
    _, inv = bg.springer(springer_name)
    return inv(rep_matrix(bg, eta))


def lambda_functional(bg: BuiltGroup, eta: TwistedSetPartition) -> Functional:
    """lambda_eta(x) = sum of a * x_{ij} over arcs; lands in F_q on u."""
    coeffs = []
    for b in bg.u_basis.matrices:
        acc = 0
        for (i, j, a) in eta.arcs:
            acc = bg.tower.add_enc(acc, bg.tower.mul_enc(a, b.get(i, j).enc))
        if not bg.sc.contains(acc):
            raise AssertionError("lambda_eta left the scalar subfield")
        coeffs.append(acc)
    return bg.functional_on_u(coeffs)


# -- canonical form (row reduction with BFS fallback) ------------------------------


def _column_conflicts(x: TriMatrix):
    """Pairs (i, j) with a nonzero above them in the same column."""
    by_col: dict = {}
    for (i, j) in x.entries:
        by_col.setdefault(j, []).append(i)
    out = []
    for j, rows in by_col.items():
        rows.sort()
        for i in rows[1:]:
            out.append((i, j))
    return out


def _reduced_to_partition(bg: BuiltGroup, x: TriMatrix) -> TwistedSetPartition:
    return TwistedSetPartition.from_arcs(
        bg.n, bg.tower, [(i, j, v.enc) for (i, j), v in x.entries.items()]
    )


def _is_reduced(x: TriMatrix) -> bool:
    rows = [i for (i, j) in x.entries]
    cols = [j for (i, j) in x.entries]
    return len(set(rows)) == len(rows) and len(set(cols)) == len(cols)


def canonicalize(bg: BuiltGroup, x: TriMatrix) -> TwistedSetPartition:
    """The unique twisted partition with x_eta in the orbit G . x.

    Follows the constructive row reduction (clear the entry above the
    bottom-left-most conflicted pivot); when the required divisor
    vanishes, or the reduction stalls, falls back to scanning the BFS
    orbit for its unique reduced member.  The fallback is total.
    """
    if x.unipotent:
        raise ShapeError("canonicalize expects an algebra element of u")
    tower = bg.tower
    cur = x
    for _ in range(4 * bg.n**4 + 8):
        conflicts = _column_conflicts(cur)
        if not conflicts:
            if _is_reduced(cur):
                return _reduced_to_partition(bg, cur)
            break
        # bottom-left-most pivot: largest row, then smallest column
        conflicts.sort(key=lambda ij: (-ij[0], ij[1]))
        i, j = conflicts[0]
        ks = [k for k in range(1, i) if (k, j) in cur.entries]
        k = max(ks)
        pivot = cur.get(i, j)
        top = cur.get(k, j)
        if k == bg.n + 1 - j:
            divisor = pivot + tower.from_enc(tower.frobenius_q_enc(pivot.enc))
        else:
            divisor = pivot
        if not divisor:
            break  # untreated subcase; fall back to orbit search
        c = top / divisor
        g = TriMatrix.from_entries(bg.n, tower, {(k, i): -c}, unipotent=True)
        nxt = bg.act(g, cur)
        if nxt.get(k, j):
            break  # the step failed to clear the target
        cur = nxt
    return _canonicalize_by_orbit(bg, x)


def _canonicalize_by_orbit(bg: BuiltGroup, x: TriMatrix) -> TwistedSetPartition:
    oi = orbit_partition_u(bg)
    coords = bg.u_space.coords(bg.flatten(x))
    if coords is None:
        raise ShapeError("element is not in u")
    reduced = []
    for member in oi.members(oi.orbit_id(coords)):
        mat = bg.unflatten(bg.u_space.combine(member))
        if _is_reduced(mat):
            reduced.append(mat)
    if len(reduced) != 1:
        raise AssertionError(
            f"orbit contains {len(reduced)} reduced elements, expected exactly 1"
        )
    return _reduced_to_partition(bg, reduced[0])


# -- the value formula --------------------------------------------------------------


def nst(eta: TwistedSetPartition, nu: TwistedSetPartition) -> int:
    """Nesting count |{i<j<k<l : j~k in nu, i~l in eta}| over unlabeled arcs."""
    count = 0
    for (i, l, _) in eta.arcs:
        for (j, k, _) in nu.arcs:
            if i < j and k < l:
                count += 1
    return count


def blocked(eta: TwistedSetPartition, nu: TwistedSetPartition) -> bool:
    """True when some eta-arc (i,j) sees a nu-arc i~k or k~j with i<k<j."""
    nu_pos = {(i, j) for (i, j, _) in nu.arcs}
    for (i, j, _) in eta.arcs:
        for k in range(i + 1, j):
            if (i, k) in nu_pos or (k, j) in nu_pos:
                return True
    return False


def factor_elementary(eta: TwistedSetPartition):
    """Split into elementary partitions (one mirror orbit each), ordered
    by left endpoint."""
    return [
        TwistedSetPartition(eta.n, orbit) for orbit in eta.mirror_orbits()
    ]


def elementary_degree(bg: BuiltGroup, eta_r: TwistedSetPartition) -> int:
    """|H . lambda_{eta_r}| by direct orbit closure; the authoritative
    degree of an elementary supercharacter."""
    lam = lambda_functional(bg, eta_r)
    return len(h_orbit_of_functional(bg, lam.coeffs))


def bruteforce_degree(bg: BuiltGroup, eta: TwistedSetPartition) -> int:
    deg = 1
    for part in factor_elementary(eta):
        deg *= elementary_degree(bg, part)
    return deg


def formula_value(
    bg: BuiltGroup,
    eta: TwistedSetPartition,
    nu: TwistedSetPartition,
    theta: Theta,
    degree: int | None = None,
) -> CycloValue:
    """The closed-form value chi^eta(u_nu)."""
    p = bg.tower.p
    if blocked(eta, nu):
        return CycloValue.zero(p)
    degree = bruteforce_degree(bg, eta) if degree is None else degree
    q = bg.tower.q
    power = q ** nst(eta, nu)
    if degree % power:
        raise NonIntegralityError(
            f"degree {degree} is not divisible by (-q)^nst = {power}"
        )
    scalar = degree // power
    if nst(eta, nu) % 2:
        scalar = -scalar
    nu_by_pos = {(i, j): b for (i, j, b) in nu.arcs}
    acc = 0
    for (i, j, a) in eta.arcs:
        b = nu_by_pos.get((i, j))
        if b is not None:
            acc = bg.tower.add_enc(acc, bg.tower.mul_enc(a, b))
    if not bg.sc.contains(acc):
        raise AssertionError("label product sum left F_q")
    return root_power(p, theta.exponent(acc)) * scalar


# -- printed degree formulas and the audit ----------------------------------------


def printed_degree_formulas(n: int, q: int, eta_r: TwistedSetPartition) -> dict:
    """The closed-form degrees as printed, evaluated for every admissible
    reading of the elementary partition (both arcs of a mirror pair)."""
    positions = eta_r.positions()
    out = {}
    if len(positions) == 1:
        (i, j) = positions[0]
        if n % 2 == 0:
            out[f"self({i},{j}) n even: q^(2(n-2i))"] = q ** (2 * (n - 2 * i))
        else:
            out[f"self({i},{j}) n odd: q^(2(n+1-2i))"] = q ** (2 * (n + 1 - 2 * i))
    else:
        for (i, j) in positions:
            if n % 2 == 0:
                out[f"pair({i},{j}) n even: q^(2(j-i-1))"] = q ** (2 * (j - i - 1))
            elif 2 * j <= n + 1:
                out[f"pair({i},{j}) n odd, j<=(n+1)/2: q^(2(j-i-1))"] = q ** (
                    2 * (j - i - 1)
                )
            else:
                out[f"pair({i},{j}) n odd, j>(n+1)/2: q^(2(j-i))"] = q ** (2 * (j - i))
    return out


@dataclass
class DegreeAuditRow:
    positions: tuple
    labels_seen: int
    brute: int
    formulas: dict

    @property
    def any_match(self) -> bool:
        return self.brute in self.formulas.values()

    @property
    def all_match(self) -> bool:
        return all(v == self.brute for v in self.formulas.values())

    def line(self) -> str:
        parts = ", ".join(f"{k} = {v}" for k, v in self.formulas.items())
        flag = "OK" if self.all_match else ("PARTIAL" if self.any_match else "MISMATCH")
        return f"{flag:8s} arcs {list(self.positions)}: brute |H.lambda| = {self.brute}; printed: {parts}"


def degree_audit(bg: BuiltGroup) -> list:
    """Brute-force elementary degrees vs the printed formulas.

    The degree must not depend on the labels; that is asserted.  The
    formula disagreements are reported, never patched over.
    """
    q = bg.tower.q
    rows = {}
    for eta in enumerate_twisted(bg.n, bg.tower):
        if not eta.is_elementary():
            continue
        key = tuple(eta.positions())
        deg = elementary_degree(bg, eta)
        if key in rows:
            if rows[key].brute != deg:
                raise AssertionError("elementary degree depends on the label")
            rows[key] = DegreeAuditRow(
                key, rows[key].labels_seen + 1, deg, rows[key].formulas
            )
        else:
            rows[key] = DegreeAuditRow(
                key, 1, deg, printed_degree_formulas(bg.n, q, eta)
            )
    return [rows[k] for k in sorted(rows)]


def ennola_degree_check(scht: SupercharTable) -> Report:
    """Every degree must be a power of q^2; the degree multiset is
    reported for the external q -> -q comparison."""
    bg = scht.group
    q2 = bg.tower.q ** 2
    rep = Report(f"ennola degrees {bg.label()}")
    bad = []
    for row in scht.rows:
        d = row.degree
        while d % q2 == 0:
            d //= q2
        if d != 1:
            bad.append(row.degree)
    rep.add(
        "ennola-degree-powers",
        not bad,
        f"degrees {sorted(r.degree for r in scht.rows)}"
        + (f"; offenders {bad}" if bad else ""),
    )
    return rep


# -- the headline grid check ---------------------------------------------------------


def formula_grid_check(
    bg: BuiltGroup,
    sct: SuperclassTable,
    scht: SupercharTable,
) -> Report:
    """formula_value(eta, nu) against the brute-force table entry for
    every pair, with the twisted partitions pinned to rows and columns."""
    rep = Report(f"unitary formula {bg.label()}")
    partitions = enumerate_twisted(bg.n, bg.tower)
    rep.add(
        "twisted-count",
        len(partitions) == len(scht.rows) == len(sct.classes),
        f"{len(partitions)} partitions, {len(scht.rows)} rows, {len(sct.classes)} classes",
    )
    od = orbit_partition_dual(bg)
    row_by_rep = {row.lam: i for i, row in enumerate(scht.rows)}
    row_of = {}
    seen_orbits = set()
    for eta in partitions:
        lam = lambda_functional(bg, eta)
        oid = od.orbit_id(lam.coeffs)
        if oid in seen_orbits:
            rep.add("lambda-transversal", False, f"{eta!r} repeats a dual orbit")
            return rep
        seen_orbits.add(oid)
        row_of[eta.sort_key()] = row_by_rep[od.orbits[oid].rep]
    rep.add("lambda-transversal", True, "one dual orbit per twisted partition")
    class_of = {}
    seen_classes = set()
    for nu in partitions:
        u = rep_group_element(bg, nu, sct.springer_name)
        cid = sct.class_of[bg.U_index[u.serialize()]]
        if cid in seen_classes:
            rep.add("class-transversal", False, f"{nu!r} repeats a superclass")
            return rep
        seen_classes.add(cid)
        class_of[nu.sort_key()] = cid
    rep.add("class-transversal", True, "one superclass per twisted partition")

    degrees = {
        eta.sort_key(): bruteforce_degree(bg, eta) for eta in partitions
    }
    mismatches = 0
    zero_mismatches = 0
    for eta in partitions:
        row = scht.rows[row_of[eta.sort_key()]]
        if degrees[eta.sort_key()] != row.degree:
            rep.add(
                "degree-product",
                False,
                f"{eta!r}: product of elementary degrees != |H.lambda|",
            )
            return rep
        for nu in partitions:
            want = row.values[class_of[nu.sort_key()]]
            got = formula_value(bg, eta, nu, scht.theta, degree=row.degree)
            if got != want:
                mismatches += 1
            if got.is_zero() != want.is_zero():
                zero_mismatches += 1
    total = len(partitions) ** 2
    rep.add("degree-product", True, "elementary factorization consistent")
    rep.add(
        "formula-values",
        mismatches == 0,
        f"{total - mismatches}/{total} cells match exactly",
    )
    rep.add(
        "formula-zero-pattern",
        zero_mismatches == 0,
        "vanishing sets coincide" if not zero_mismatches else f"{zero_mismatches} cells",
    )
    return rep
