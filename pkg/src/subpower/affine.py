"""Finite abelian groups, elimination modulo the exponent, affine closure.

Subgroups of L^k for a finite abelian group L are handled by a Howell-style
row echelon over Z_m, where m is the exponent of L and every coordinate is
embedded into Z_m.  The Howell completion (annihilator rows) guarantees
that, for every prefix, the rows with later pivots generate exactly the
subgroup elements vanishing on that prefix; this is what makes kernels,
signatures and membership witnesses exact over non-prime moduli.

The affine closure of generator tuples under a verified affine algebra is
kept in base-plus-differences form.  Every inserted difference remembers a
pair of member circuits realizing it, so arbitrary members can be issued
with witness circuits by chaining the designated Mal'tsev circuit
(m(x, y, z) adds the difference x - y to z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .circuits import CircuitBank
from .core import AlgebraError, FiniteAlgebra


class NotAffineError(AlgebraError):
    def __init__(self, symbol, inputs, message="operation is not affine"):
        super().__init__(f"{message}: {symbol} at {inputs}")
        self.symbol = symbol
        self.inputs = inputs


@dataclass(frozen=True)
class AbelianGroupSpec:
    """Product of cyclic groups Z_{m_1} x ... x Z_{m_s} on dense indices."""

    orders: tuple
    zero: int = 0

    def __post_init__(self):
        if not self.orders or any(m < 1 for m in self.orders):
            raise AlgebraError("cyclic orders must be positive")
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        if not 0 <= self.zero < self.size:
            raise AlgebraError("zero element out of range")

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    def _radix(self, x: int) -> tuple:
        out = []
        for m in reversed(self.orders):
            out.append(x % m)
            x //= m
        return tuple(reversed(out))

    def vec(self, x: int) -> tuple:
        """Residue vector of element x, relative to the designated zero."""
        if not 0 <= x < self.size:
            raise AlgebraError(f"element {x} out of range")
        raw = self._radix(x)
        zero = self._radix(self.zero)
        return tuple((a - z) % m for a, z, m in zip(raw, zero, self.orders))

    def elem(self, residues) -> int:
        zero = self._radix(self.zero)
        x = 0
        for r, z, m in zip(residues, zero, self.orders):
            x = x * m + (int(r) + z) % m
        return x

    def add(self, x: int, y: int) -> int:
        return self.elem(tuple(a + b for a, b in zip(self.vec(x), self.vec(y))))

    def neg(self, x: int) -> int:
        return self.elem(tuple(-a for a in self.vec(x)))

    def scale(self, c: int, x: int) -> int:
        return self.elem(tuple(c * a for a in self.vec(x)))

    # -- embedding of L^k into Z_m^{k*s} ------------------------------------

    def embed_factors(self) -> np.ndarray:
        m = self.exponent
        return np.asarray([m // mi for mi in self.orders], dtype=np.int64)

    def embed_elements(self, elements) -> np.ndarray:
        """Flatten a tuple of element indices into an embedded Z_m vector."""
        vecs = np.asarray([self.vec(int(x)) for x in elements], dtype=np.int64)
        return (vecs * self.embed_factors()[None, :]).ravel() % self.exponent

    def unembed(self, flat: np.ndarray) -> tuple:
        f = self.embed_factors()
        s = self.rank
        out = []
        for j in range(0, len(flat), s):
            chunk = flat[j:j + s]
            if np.any(chunk % f):
                raise AlgebraError("vector is not in the embedded lattice")
            out.append(self.elem(tuple(int(c // fi) for c, fi in zip(chunk, f))))
        return tuple(out)


def _egcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _unit_scale(a: int, m: int) -> int:
    """A unit u mod m with u*a == gcd(a, m) mod m."""
    d = math.gcd(a, m)
    ap, mp = a // d, m // d
    s = pow(ap, -1, mp) if mp > 1 else 1
    for j in range(d + 1):
        cand = (s + j * mp) % m
        if cand and math.gcd(cand, m) == 1:
            return cand
    raise AssertionError("no unit scaling found")  # unreachable


class Echelon:
    """Howell-form row space over Z_m with optional generator bookkeeping."""

    def __init__(self, m: int, width: int, track: int | None = None):
        if m < 1:
            raise AlgebraError("modulus must be positive")
        self.m = m
        self.width = width
        self.track = track
        self.rows: list[np.ndarray] = []
        self.coeffs: list[np.ndarray] = []
        self.pivots: dict[int, int] = {}
        self._gen_count = 0

    def _lead(self, v: np.ndarray) -> int | None:
        nz = np.flatnonzero(v)
        return int(nz[0]) if len(nz) else None

    def unit_coeff(self) -> np.ndarray | None:
        if self.track is None:
            return None
        c = np.zeros(self.track, dtype=np.int64)
        if self._gen_count >= self.track:
            raise AlgebraError("more generators than the tracking width")
        c[self._gen_count] = 1
        return c

    def insert(self, v, coeff: np.ndarray | None = None) -> bool:
        """Add a generator; returns True when the span grew."""
        m = self.m
        v = np.asarray(v, dtype=np.int64) % m
        if len(v) != self.width:
            raise AlgebraError("vector width mismatch")
        if self.track is not None and coeff is None:
            coeff = self.unit_coeff()
        self._gen_count += 1
        grew = False
        queue = [(v, coeff)]
        while queue:
            w, wc = queue.pop()
            w = w % m
            col = self._lead(w)
            while col is not None:
                ridx = self.pivots.get(col)
                if ridx is None:
                    self.pivots[col] = len(self.rows)
                    self.rows.append(w)
                    self.coeffs.append(wc if wc is not None else None)
                    grew = True
                    ann = m // math.gcd(int(w[col]), m)
                    aw = (ann * w) % m
                    if aw.any():
                        queue.append((aw, None if wc is None else (ann * wc) % m))
                    break
                p = self.rows[ridx]
                pc = self.coeffs[ridx]
                a, b = int(p[col]), int(w[col])
                d = math.gcd(a, m)
                if b % d == 0:
                    mp = m // d
                    q = (b // d) * pow(a // d, -1, mp) % mp if mp > 1 else 0
                    w = (w - q * p) % m
                    if wc is not None:
                        wc = (wc - q * pc) % m
                else:
                    g, s, t = _egcd(a, b)
                    newp = (s * p + t * w) % m
                    neww = ((a // g) * w - (b // g) * p) % m
                    self.rows[ridx] = newp
                    if pc is not None and wc is not None:
                        self.coeffs[ridx] = (s * pc + t * wc) % m
                        wc = ((a // g) * wc - (b // g) * pc) % m
                    grew = True
                    ann = m // math.gcd(int(newp[col]), m)
                    anp = (ann * newp) % m
                    if anp.any():
                        npc = self.coeffs[ridx]
                        queue.append((anp, None if npc is None else (ann * npc) % m))
                    w = neww
                col = self._lead(w)
        return grew

    def reduce(self, v) -> tuple[np.ndarray, np.ndarray | None]:
        """Residue of v modulo the span, plus combination coefficients."""
        m = self.m
        w = np.asarray(v, dtype=np.int64) % m
        used = None
        if self.track is not None:
            used = np.zeros(self.track, dtype=np.int64)
        for col in sorted(self.pivots):
            b = int(w[col])
            if b == 0:
                continue
            ridx = self.pivots[col]
            a = int(self.rows[ridx][col])
            d = math.gcd(a, m)
            if b % d:
                continue
            mp = m // d
            q = (b // d) * pow(a // d, -1, mp) % mp if mp > 1 else 0
            w = (w - q * self.rows[ridx]) % m
            if used is not None and self.coeffs[ridx] is not None:
                used = (used + q * self.coeffs[ridx]) % m
        return w, used

    def contains(self, v) -> bool:
        residue, _ = self.reduce(v)
        return not residue.any()

    def canonicalize(self) -> None:
        """Unit-normalize pivots, clear entries above them, sort rows."""
        m = self.m
        for col in sorted(self.pivots):
            ridx = self.pivots[col]
            a = int(self.rows[ridx][col])
            u = _unit_scale(a, m)
            self.rows[ridx] = (u * self.rows[ridx]) % m
            if self.coeffs[ridx] is not None:
                self.coeffs[ridx] = (u * self.coeffs[ridx]) % m
        for col in sorted(self.pivots):
            ridx = self.pivots[col]
            d = int(self.rows[ridx][col])
            for other_col, oidx in self.pivots.items():
                if oidx == ridx or other_col >= col:
                    continue
                row = self.rows[oidx]
                q = int(row[col]) // d
                if q:
                    self.rows[oidx] = (row - q * self.rows[ridx]) % m
                    if self.coeffs[oidx] is not None and self.coeffs[ridx] is not None:
                        self.coeffs[oidx] = (self.coeffs[oidx]
                                             - q * self.coeffs[ridx]) % m
        order = sorted(self.pivots)
        rows = [self.rows[self.pivots[c]] for c in order]
        coeffs = [self.coeffs[self.pivots[c]] for c in order]
        self.rows, self.coeffs = rows, coeffs
        self.pivots = {c: i for i, c in enumerate(order)}

    def span_size(self) -> int:
        total = 1
        m = self.m
        for col, ridx in self.pivots.items():
            a = int(self.rows[ridx][col])
            total *= m // math.gcd(a, m)
        return total

    def tail_rows(self, start_col: int) -> list[int]:
        """Row indices with pivot at or after start_col.

        By the Howell property these generate every span element vanishing
        before start_col.
        """
        return [self.pivots[c] for c in sorted(self.pivots) if c >= start_col]


def subgroup_member(group: AbelianGroupSpec, gens, target):
    """Membership of `target` in the subgroup of L^k generated by `gens`.

    Returns (True, coeffs) with integer coefficients satisfying
    sum(coeffs[i] * gens[i]) == target exactly, or (False, None).
    """
    gens = [tuple(g) for g in gens]
    target_v = group.embed_elements(target)
    m = group.exponent
    ech = Echelon(m, len(target_v), track=max(len(gens), 1))
    for g in gens:
        if len(g) != len(target):
            raise AlgebraError("generator and target lengths differ")
        ech.insert(group.embed_elements(g))
    residue, coeffs = ech.reduce(target_v)
    if residue.any():
        return False, None
    coeffs = [int(c) for c in coeffs[:len(gens)]]
    check = np.zeros(len(target_v), dtype=np.int64)
    for c, g in zip(coeffs, gens):
        check = (check + c * group.embed_elements(g)) % m
    assert np.array_equal(check, target_v), "witness verification failed"
    return True, coeffs


def affine_member(group: AbelianGroupSpec, points, target):
    """Is `target` in the affine closure of `points` (coefficients sum 1)?

    Returns (True, coeffs) with sum(coeffs) == 1 and
    sum(coeffs[i] * points[i]) == target, or (False, None).
    """
    points = list(points)
    if not points:
        raise AlgebraError("affine closure of no points is empty")
    base = points[0]
    diffs = [tuple_sub(group, p, base) for p in points[1:]]
    ok, coeffs = subgroup_member(group, diffs, tuple_sub(group, target, base))
    if not ok:
        return False, None
    lam = [int(c) for c in coeffs]
    lam0 = 1 - sum(lam)
    return True, [lam0] + lam


def tuple_add(group: AbelianGroupSpec, x, y) -> tuple:
    return tuple(group.add(a, b) for a, b in zip(x, y))


def tuple_sub(group: AbelianGroupSpec, x, y) -> tuple:
    return tuple(group.add(a, group.neg(b)) for a, b in zip(x, y))


def tuple_scale(group: AbelianGroupSpec, c: int, x) -> tuple:
    return tuple(group.scale(c, a) for a in x)


# ---------------------------------------------------------------------------
# affine operation extraction

@dataclass(frozen=True)
class AffineOpSpec:
    """f(x_1..x_r) = sum_i M_i(x_i) + c on residue vectors."""

    symbol: str
    arity: int
    matrices: tuple          # one (s x s) integer matrix per argument
    constant: tuple          # residue vector

    def scalar(self, i: int) -> int | None:
        mat = self.matrices[i]
        return int(mat[0][0]) if len(mat) == 1 else None


def _extract_endo(group: AbelianGroupSpec, fn) -> tuple:
    """Matrix of x -> fn(x) on residue vectors; fn must fix 0."""
    s = group.rank
    cols = []
    for j in range(s):
        basis = group.elem(tuple(1 if i == j else 0 for i in range(s)))
        cols.append(group.vec(fn(basis)))
    # rows indexed by output coordinate, columns by input coordinate
    return tuple(tuple(cols[j][i] for j in range(s)) for i in range(s))


def apply_endo(group: AbelianGroupSpec, mat, x: int) -> int:
    xv = group.vec(x)
    s = group.rank
    out = [sum(mat[i][j] * xv[j] for j in range(s)) for i in range(s)]
    return group.elem(out)


def verify_affine(alg: FiniteAlgebra, group: AbelianGroupSpec):
    """Extract per-argument endomorphisms and constants for every operation.

    Raises NotAffineError at the first operation and input where the affine
    form fails to reproduce the table.
    """
    if group.size != alg.size:
        raise AlgebraError("group size differs from algebra domain")
    zero = group.zero
    specs = []
    for op in alg.ops:
        const_elem = alg.apply(op.symbol, (zero,) * op.arity)
        mats = []
        for i in range(op.arity):
            def partial(x, i=i):
                args = [zero] * op.arity
                args[i] = x
                return group.add(alg.apply(op.symbol, tuple(args)),
                                 group.neg(const_elem))
            # additivity check before trusting the matrix form
            for x in range(alg.size):
                for y in range(alg.size):
                    if partial(group.add(x, y)) != group.add(partial(x), partial(y)):
                        raise NotAffineError(op.symbol, (x, y),
                                             "argument map is not additive")
            mats.append(_extract_endo(group, partial))
        spec = AffineOpSpec(op.symbol, op.arity, tuple(mats), group.vec(const_elem))
        for args in product(range(alg.size), repeat=op.arity):
            acc = group.elem(spec.constant)
            for i, x in enumerate(args):
                acc = group.add(acc, apply_endo(group, spec.matrices[i], x))
            if acc != alg.apply(op.symbol, args):
                raise NotAffineError(op.symbol, args,
                                     "affine form does not reproduce the table")
        specs.append(spec)
    return specs


def endo_on_embedded(group: AbelianGroupSpec, mat, flat: np.ndarray) -> np.ndarray:
    """Apply an endomorphism coordinate-wise to an embedded L^k vector."""
    m = group.exponent
    s = group.rank
    f = group.embed_factors()
    k = len(flat) // s
    chunks = flat.reshape(k, s)
    resid = chunks // f[None, :]
    matrix = np.asarray(mat, dtype=np.int64)
    out_resid = resid @ matrix.T
    return ((out_resid % np.asarray(group.orders)[None, :])
            * f[None, :]).ravel() % m


# ---------------------------------------------------------------------------
# affine closure with witness circuits

@dataclass
class AffineSubpowerRep:
    """Coset form base + <differences> of an affine subpower, with circuits.

    Every retained difference carries a pair of member circuits (plus,
    minus) whose values differ by exactly that vector.
    """

    alg: FiniteAlgebra
    group: AbelianGroupSpec          # group on single coordinates
    k: int
    generators: tuple
    base_flat: np.ndarray
    base_node: int
    bank: CircuitBank
    raw: list = field(default_factory=list)   # (flat_vec, plus_node, minus_node)
    echelon: Echelon | None = None
    tuples_materialized: int = 0
    _tracked: Echelon | None = None

    def base_tuple(self) -> tuple:
        return self.group.unembed(self.base_flat)

    def tracked_echelon(self) -> Echelon:
        """Canonical echelon of the differences with raw-combination tracking."""
        if self._tracked is None:
            ech = Echelon(self.group.exponent, len(self.base_flat),
                          track=max(len(self.raw), 1))
            for vec, _, _ in self.raw:
                ech.insert(vec)
            ech.canonicalize()
            self._tracked = ech
        return self._tracked

    def resolve(self, member) -> np.ndarray | None:
        """Raw coefficients expressing member - base, or None if outside."""
        m = self.group.exponent
        target = (self.group.embed_elements(member) - self.base_flat) % m
        residue, coeffs = self.tracked_echelon().reduce(target)
        if residue.any():
            return None
        return coeffs[:len(self.raw)] if self.raw else np.zeros(0, np.int64)

    def member_node(self, raw_coeffs) -> int:
        """Circuit for base + sum coeff_j * raw_j via Mal'tsev chaining."""
        node = self.base_node
        m = self.group.exponent
        for j, c in enumerate(raw_coeffs):
            c = int(c) % m
            if c == 0:
                continue
            _, plus, minus = self.raw[j]
            for _ in range(c):
                node = self.bank.splice(self.alg.maltsev, [plus, minus, node])
        return node

    def member_flat(self, raw_coeffs) -> np.ndarray:
        m = self.group.exponent
        out = self.base_flat.copy()
        for j, c in enumerate(raw_coeffs):
            out = (out + int(c) * self.raw[j][0]) % m
        return out

    def element_at(self, flat: np.ndarray, i: int) -> int:
        """The i-th coordinate of an embedded vector, as a group element."""
        s = self.group.rank
        f = self.group.embed_factors()
        chunk = flat[i * s:(i + 1) * s]
        return self.group.elem(tuple(int(c // fi) for c, fi in zip(chunk, f)))


def affine_span(alg: FiniteAlgebra, group: AbelianGroupSpec, gens,
                op_specs=None) -> AffineSubpowerRep:
    """Fixpoint base-plus-differences form of Sg(gens) for affine `alg`.

    `group` is the abelian group on single coordinates; gens are tuples in
    A^k.  The difference set starts from gens[j] - gens[0] and closes under
    the per-argument endomorphisms of every operation together with the
    constant shifts f(base..base) - base.
    """
    gens = [tuple(g) for g in gens]
    if not gens:
        raise AlgebraError("affine closure needs at least one generator")
    k = len(gens[0])
    if op_specs is None:
        op_specs = verify_affine(alg, group)
    n = len(gens)
    bank = CircuitBank(n)
    m = group.exponent
    width = k * group.rank

    rep = AffineSubpowerRep(
        alg=alg, group=group, k=k, generators=tuple(gens),
        base_flat=group.embed_elements(gens[0]), base_node=bank.var(1),
        bank=bank)
    rep.echelon = Echelon(m, width, track=None)
    rep.tuples_materialized = n

    queue: list[tuple[np.ndarray, int, int]] = []
    for j in range(1, n):
        vec = (group.embed_elements(gens[j]) - rep.base_flat) % m
        queue.append((vec, bank.var(j + 1), bank.var(1)))
    for spec in op_specs:
        node = bank.app(spec.symbol, (rep.base_node,) * spec.arity)
        val = group.embed_elements(
            [alg.apply(spec.symbol, (gens[0][i],) * spec.arity) for i in range(k)])
        vec = (val - rep.base_flat) % m
        queue.append((vec, node, rep.base_node))

    while queue:
        vec, plus, minus = queue.pop()
        if not vec.any():
            continue
        if not rep.echelon.insert(vec):
            continue
        rep.raw.append((vec, plus, minus))
        rep.tuples_materialized += 1
        for spec in op_specs:
            for i in range(spec.arity):
                img = endo_on_embedded(group, spec.matrices[i], vec)
                if not img.any() or rep.echelon.contains(img):
                    continue
                up = [rep.base_node] * spec.arity
                down = [rep.base_node] * spec.arity
                up[i] = plus
                down[i] = minus
                queue.append((img,
                              bank.app(spec.symbol, tuple(up)),
                              bank.app(spec.symbol, tuple(down))))
    rep.echelon.canonicalize()
    return rep


def span_members(rep: AffineSubpowerRep):
    """Expand the represented coset exhaustively (test-scale helper)."""
    m = rep.group.exponent
    members = {tuple(rep.base_flat)}
    frontier = [rep.base_flat]
    vecs = [row for row, _, _ in rep.raw]
    while frontier:
        cur = frontier.pop()
        for v in vecs:
            nxt = (cur + v) % m
            key = tuple(nxt)
            if key not in members:
                members.add(key)
                frontier.append(np.asarray(nxt))
    return {rep.group.unembed(np.asarray(v)) for v in members}


def _value_combos(rep: AffineSubpowerRep, row_ids, coord: int) -> dict:
    """Element values reachable at `coord` from the given echelon rows.

    Returns {element: coefficient vector over row_ids} for the subgroup of
    L generated by the rows' coord-th elements.
    """
    group = rep.group
    ech = rep.tracked_echelon()
    elems = [rep.element_at(ech.rows[r], coord) for r in row_ids]
    zero = group.zero
    combos = {zero: np.zeros(len(row_ids), dtype=np.int64)}
    frontier = [zero]
    while frontier:
        v = frontier.pop()
        for j, e in enumerate(elems):
            w = group.add(v, e)
            if w not in combos:
                c = combos[v].copy()
                c[j] += 1
                combos[w] = c
                frontier.append(w)
    return combos


def coset_compact_rep(rep: AffineSubpowerRep):
    """Compact representation (with circuits) of the coset base + <raw>.

    For each coordinate, realizes every reachable value together with every
    fork reachable without disturbing earlier coordinates; the latter come
    from echelon rows whose pivot lies at or after the coordinate.
    """
    from .comprep import EnumeratedCompactRep

    group = rep.group
    s = group.rank
    ech = rep.tracked_echelon()
    nraw = len(rep.raw)
    out = EnumeratedCompactRep(rep.generators, [], rep.bank)
    all_rows = list(range(len(ech.rows)))
    emitted = set()

    def raw_coeffs_of(row_ids, combo) -> np.ndarray:
        total = np.zeros(nraw, dtype=np.int64)
        for r, c in zip(row_ids, combo):
            if int(c) and ech.coeffs[r] is not None:
                total = (total + int(c) * ech.coeffs[r][:nraw]) % group.exponent
        return total

    def emit(raw_c):
        flat = rep.member_flat(raw_c)
        key = flat.tobytes()
        if key in emitted:
            return
        emitted.add(key)
        node = rep.member_node(raw_c)
        out.add(group.unembed(flat), node)
        rep.tuples_materialized += 1

    for i in range(rep.k):
        value_combos = _value_combos(rep, all_rows, i)
        tail = ech.tail_rows(i * s)
        fork_combos = _value_combos(rep, tail, i)
        for v in sorted(value_combos):
            base_c = raw_coeffs_of(all_rows, value_combos[v])
            emit(base_c)
            for d in sorted(fork_combos):
                if d == group.zero:
                    continue
                emit((base_c + raw_coeffs_of(tail, fork_combos[d]))
                     % group.exponent)
    return out


def affine_closure_comprep(alg: FiniteAlgebra, group: AbelianGroupSpec, gens,
                           op_specs=None):
    """Enumerated compact representation of Sg(gens) for an affine algebra."""
    rep = affine_span(alg, group, gens, op_specs=op_specs)
    return coset_compact_rep(rep)


def subgroup_compact_tuples(group: AbelianGroupSpec, k: int, generators) -> list:
    """Compact-representation tuples of the subgroup of L^k the generators span.

    Same per-coordinate fork construction as coset_compact_rep, without
    circuits; the base point is the zero tuple.
    """
    m = group.exponent
    s = group.rank
    generators = [tuple(g) for g in generators]
    ech = Echelon(m, k * s, track=max(len(generators), 1))
    for g in generators:
        ech.insert(group.embed_elements(g))
    ech.canonicalize()
    rows = ech.rows

    def element_at(flat, i):
        f = group.embed_factors()
        chunk = flat[i * s:(i + 1) * s]
        return group.elem(tuple(int(c // fi) for c, fi in zip(chunk, f)))

    def value_vectors(row_ids, coord):
        elems = [element_at(rows[r], coord) for r in row_ids]
        reach = {group.zero: np.zeros(k * s, dtype=np.int64)}
        frontier = [group.zero]
        while frontier:
            v = frontier.pop()
            for j, e in enumerate(elems):
                w = group.add(v, e)
                if w not in reach:
                    reach[w] = (reach[v] + rows[row_ids[j]]) % m
                    frontier.append(w)
        return reach

    out = []
    seen = set()

    def emit(flat):
        key = flat.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(group.unembed(flat))

    all_rows = list(range(len(rows)))
    for i in range(k):
        values = value_vectors(all_rows, i)
        tail = ech.tail_rows(i * s)
        forks = value_vectors(tail, i)
        for v in sorted(values):
            base = values[v]
            emit(base)
            for d in sorted(forks):
                if d != group.zero:
                    emit((base + forks[d]) % m)
    return out
