"""Wreath products, difference clonoids, and clonoid image generators.

A wreath product acts on pairs (l, u), encoded as the dense index
l * |U| + u.  Every operation applies the left (affine) algebra to the
l-parts, shifted by a hat table evaluated on the u-parts, and the right
algebra to the u-parts.  The difference clonoid collects the functions
u-vector -> L by which two terms with the same direct-product behaviour may
differ; its unary part and diagonal-vanishing binary part generate
everything, and images of tuples under the generated function family reduce
to plain subgroup generators of L^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .circuits import Circuit
from .core import (AlgebraError, ClosureCapExceeded, FiniteAlgebra, Operation,
                   closure_with_circuits, verify_maltsev)
from .affine import AbelianGroupSpec, Echelon


class WreathSpecError(AlgebraError):
    pass


@dataclass
class WreathSpec:
    """Affine left part, prime-order right part, and hat shift tables."""

    left: FiniteAlgebra
    left_group: AbelianGroupSpec
    right: FiniteAlgebra
    hat: dict
    maltsev: Circuit

    @property
    def p(self) -> int:
        return self.right.size

    @property
    def size(self) -> int:
        return self.left.size * self.right.size

    def pair(self, l: int, u: int) -> int:
        return l * self.p + u

    def split(self, x: int) -> tuple[int, int]:
        return divmod(x, self.p)

    @property
    def zero(self) -> int:
        """The designated zero pair (0_L, 0_U)."""
        return self.pair(self.left_group.zero, 0)

    @cached_property
    def algebra(self) -> FiniteAlgebra:
        return build_wreath(self)

    @cached_property
    def companion(self) -> FiniteAlgebra:
        """The direct product: the same construction with hat = 0."""
        zero_hat = {op.symbol: (self.left_group.zero,) * (self.p ** op.arity)
                    for op in self.left.ops}
        flat = WreathSpec(self.left, self.left_group, self.right, zero_hat,
                          self.maltsev)
        return build_wreath(flat)

    @cached_property
    def companion_group(self) -> AbelianGroupSpec:
        return AbelianGroupSpec(self.left_group.orders + (self.p,),
                                zero=self.zero)

    def l_part(self, t) -> tuple:
        return tuple(self.split(x)[0] for x in t)

    def u_part(self, t) -> tuple:
        return tuple(self.split(x)[1] for x in t)


def _maltsev_symbol(circuit: Circuit) -> str | None:
    gate = circuit.gates[circuit.output]
    if gate[0] == "x" or len(gate) != 4:
        return None
    children = [circuit.gates[c] for c in gate[1:]]
    if [g for g in children] == [("x", 1), ("x", 2), ("x", 3)]:
        return gate[0]
    return None


def build_wreath(spec: WreathSpec) -> FiniteAlgebra:
    """Assemble the product algebra, validating every structural invariant."""
    left, right, group = spec.left, spec.right, spec.left_group
    if sorted((o.symbol, o.arity) for o in left.ops) != \
            sorted((o.symbol, o.arity) for o in right.ops):
        raise WreathSpecError("left and right parts disagree on the language")
    zero_l = group.zero
    p = right.size
    for op in left.ops:
        if left.apply(op.symbol, (zero_l,) * op.arity) != zero_l:
            raise WreathSpecError(
                f"left operation {op.symbol} does not preserve the zero element")
        table = spec.hat.get(op.symbol)
        if table is None:
            raise WreathSpecError(f"missing hat table for {op.symbol}")
        if len(table) != p ** op.arity:
            raise WreathSpecError(f"hat table for {op.symbol} has wrong length")
        if any(not 0 <= v < left.size for v in table):
            raise WreathSpecError(f"hat table for {op.symbol} out of range")
    msym = _maltsev_symbol(spec.maltsev)
    if msym is not None:
        mh = spec.hat[msym]
        for u in range(p):
            for v in range(p):
                if mh[(u * p + u) * p + v] != zero_l:
                    raise WreathSpecError(
                        f"hat of {msym} must vanish at (u,u,v): u={u}, v={v}")
                if mh[(v * p + u) * p + u] != zero_l:
                    raise WreathSpecError(
                        f"hat of {msym} must vanish at (v,u,u): u={u}, v={v}")

    size = left.size * p
    ops = []
    for op in left.ops:
        rop = right.op(op.symbol)
        hat_table = spec.hat[op.symbol]
        table = []
        for args in product(range(size), repeat=op.arity):
            ls = tuple(a // p for a in args)
            us = tuple(a % p for a in args)
            l_idx = 0
            u_idx = 0
            for l, u in zip(ls, us):
                l_idx = l_idx * left.size + l
                u_idx = u_idx * p + u
            lval = left.op(op.symbol).table[l_idx] if op.arity else left.op(op.symbol).table[0]
            hval = hat_table[u_idx] if op.arity else hat_table[0]
            uval = rop.table[u_idx] if op.arity else rop.table[0]
            out_l = group.add(lval, hval)
            table.append(out_l * p + uval)
        ops.append(Operation(op.symbol, op.arity, tuple(table)))
    alg = FiniteAlgebra(size, ops, spec.maltsev, check=False)
    if not verify_maltsev(alg):
        raise WreathSpecError("assembled product fails the Mal'tsev identities")
    return alg


def companion_eval(spec: WreathSpec, circuit: Circuit, args) -> tuple:
    """Evaluate a circuit in the direct product (hat suppressed)."""
    from .core import eval_circuit
    return eval_circuit(spec.companion, circuit, args)


# ---------------------------------------------------------------------------
# difference clonoid extraction

@dataclass
class ClonoidGenSet:
    """Generators of the difference clonoid: unary plus diagonal-zero binary."""

    p: int
    group: AbelianGroupSpec                  # the left group
    unary: list = field(default_factory=list)    # tables Z_p -> L
    binary: list = field(default_factory=list)   # tables Z_p^2 -> L
    exact: bool = True            # full enumeration vs certified bounded run
    unary_span: int = 1
    binary_span: int = 1

    def __post_init__(self):
        zero = self.group.zero
        for g in self.binary:
            for x in range(self.p):
                if g[x * self.p + x] != zero:
                    raise AlgebraError("binary clonoid generator hits the diagonal")


def _hat_of_table(spec: WreathSpec, table, arity: int) -> tuple:
    """The u-shift of a term table: its L-part at arguments with l-part zero."""
    out = []
    p = spec.p
    for us in product(range(p), repeat=arity):
        idx = 0
        for u in us:
            idx = idx * spec.size + spec.pair(spec.left_group.zero, u)
        out.append(spec.split(table[idx])[0])
    return tuple(out)


def _companion_key(spec: WreathSpec, table, arity: int) -> tuple:
    """The direct-product behaviour of a term table (bucketing key)."""
    hat = _hat_of_table(spec, table, arity)
    p = spec.p
    group = spec.left_group
    key = []
    for pos, args in enumerate(product(range(spec.size), repeat=arity)):
        u_idx = 0
        for a in args:
            u_idx = u_idx * p + a % p
        l, u = spec.split(table[pos])
        key.append((group.add(l, group.neg(hat[u_idx])), u))
    return tuple(key)


def _affine_substitutions(p: int, arity: int) -> list:
    """Index remaps of Z_p^arity induced by coefficient rows summing to 1."""
    rows = [a for a in product(range(p), repeat=arity) if sum(a) % p == 1]
    subs = []
    for choice in product(rows, repeat=arity):
        remap = []
        for args in product(range(p), repeat=arity):
            out_idx = 0
            for row in choice:
                v = sum(r * x for r, x in zip(row, args)) % p
                out_idx = out_idx * p + v
            remap.append(out_idx)
        subs.append(tuple(remap))
    return sorted(set(subs))


def _remap_embedded(row: np.ndarray, sub, rank: int) -> np.ndarray:
    """Apply a table-position remap to an embedded (rank-chunked) vector."""
    idx = np.repeat(np.asarray(sub, dtype=np.int64) * rank, rank) \
        + np.tile(np.arange(rank), len(sub))
    return row[idx]


def _table_diffs(spec: WreathSpec, tables, arity: int):
    """Hat differences of same-companion term tables."""
    buckets: dict = {}
    for t in tables:
        buckets.setdefault(_companion_key(spec, t, arity), []).append(t)
    group = spec.left_group
    diffs = []
    for key in sorted(buckets):
        members = sorted(buckets[key])
        rep_hat = _hat_of_table(spec, members[0], arity)
        for t in members[1:]:
            hat = _hat_of_table(spec, t, arity)
            diffs.append(tuple(group.add(a, group.neg(b))
                               for a, b in zip(hat, rep_hat)))
    return diffs


def diff_clonoid_gens(spec: WreathSpec, cap: int = 3000) -> ClonoidGenSet:
    """Generators of the difference clonoid from term enumeration.

    Unary terms are always enumerated in full.  Binary terms are enumerated
    in full when they fit under `cap`; otherwise a bounded enumeration seeds
    an elimination that is closed under substitutions and certified complete
    by comparing the span against the diagonal-restriction bound.  A bounded
    run that cannot be certified raises ClosureCapExceeded rather than
    returning a silently truncated generator set.
    """
    alg = spec.algebra
    group = spec.left_group
    m = group.exponent
    p = spec.p

    def enumerate_tables(arity, allow_truncate):
        width = alg.size ** arity
        projections = []
        for j in range(arity):
            block = alg.size ** (arity - 1 - j)
            projections.append(tuple((i // block) % alg.size for i in range(width)))
        tuples, _, _, truncated = closure_with_circuits(
            alg, projections, cap=cap, truncate=allow_truncate)
        return tuples, truncated

    # unary part: exact
    unary_tables, _ = enumerate_tables(1, allow_truncate=False)
    u_ech = Echelon(m, p * group.rank)
    for d in _table_diffs(spec, unary_tables, 1):
        u_ech.insert(group.embed_elements(d))
    for sub in _affine_substitutions(p, 1):
        stable = False
        while not stable:
            stable = True
            for row in list(u_ech.rows):
                if u_ech.insert(_remap_embedded(row, sub, group.rank)):
                    stable = False
    u_ech.canonicalize()
    unary_span = u_ech.span_size()

    # binary part: exact when possible, certified bounded otherwise
    binary_tables, truncated = enumerate_tables(2, allow_truncate=True)
    b_ech = Echelon(m, p * p * group.rank)
    for d in _table_diffs(spec, binary_tables, 2):
        b_ech.insert(group.embed_elements(d))
    for row in u_ech.rows:
        # unary members reappear at arity two through composition with the
        # first projection; seeding them helps a bounded run close
        g = group.unembed(np.asarray(row))
        b_ech.insert(group.embed_elements([g[x] for x in range(p)
                                           for _ in range(p)]))
    subs = _affine_substitutions(p, 2)
    stable = False
    while not stable:
        stable = True
        for sub in subs:
            for row in list(b_ech.rows):
                if b_ech.insert(_remap_embedded(row, sub, group.rank)):
                    stable = False
    b_ech.canonicalize()
    binary_span = b_ech.span_size()
    if truncated:
        # certificate: every binary clonoid function restricts on the
        # diagonal to a unary clonoid function, so the span can never
        # exceed unary_span * |L|^(p^2 - p); equality certifies the run.
        bound = unary_span * group.size ** (p * p - p)
        if binary_span != bound:
            raise ClosureCapExceeded(cap)

    # split off the diagonal-vanishing part by head-block elimination
    s = group.rank
    head = p * s
    aug = Echelon(m, head + p * p * s)
    for row in b_ech.rows:
        table = group.unembed(np.asarray(row))
        diag = tuple(table[x * p + x] for x in range(p))
        aug.insert(np.concatenate([group.embed_elements(diag),
                                   np.asarray(row)]))
    aug.canonicalize()
    binary = []
    for ridx in aug.tail_rows(head):
        tail = np.asarray(aug.rows[ridx][head:])
        if tail.any():
            binary.append(group.unembed(tail))
    unary = [group.unembed(np.asarray(row)) for row in u_ech.rows]
    unary = [t for t in unary if any(v != group.zero for v in t)]
    return ClonoidGenSet(p=p, group=group, unary=unary, binary=binary,
                         exact=not truncated, unary_span=unary_span,
                         binary_span=binary_span)


# ---------------------------------------------------------------------------
# plane geometry of Z_p^n

@dataclass(frozen=True)
class Diagonal:
    value: int


@dataclass(frozen=True)
class Plane:
    axis: tuple
    x: int
    y: int


def plane_count(p: int, n: int) -> int:
    return (p ** (n - 1) - 1) // (p - 1)


def plane_axes(p: int, n: int) -> list:
    """All normalized direction vectors: first entry 0, leading nonzero 1."""
    axes = []
    for vec in product(range(p), repeat=n - 1):
        full = (0,) + vec
        nz = [v for v in full if v]
        if nz and nz[0] == 1:
            axes.append(full)
    return axes


def plane_points(p: int, c) -> list:
    """The parameterized plane {x(1 - c) + y c}, minus nothing."""
    n = len(c)
    return [tuple((x * (1 - ci) + y * ci) % p for ci in c)
            for x in range(p) for y in range(p)]


def classify_row(w, p: int):
    """Assign a row of u-values to the diagonal or its unique plane.

    Off-diagonal rows normalize to Plane(c, x, y) with c the direction
    scaled so that its leading nonzero entry is 1, x the first row entry
    and y the entry at the leading disagreement.
    """
    w = tuple(v % p for v in w)
    n = len(w)
    if n < 2:
        raise AlgebraError("row classification needs at least two columns")
    if all(v == w[0] for v in w):
        return Diagonal(w[0])
    i = next(idx for idx, v in enumerate(w) if v != w[0])
    scale = pow((w[i] - w[0]) % p, -1, p)
    c = tuple((scale * (v - w[0])) % p for v in w)
    return Plane(axis=c, x=w[0], y=w[i])


# ---------------------------------------------------------------------------
# clonoid images

@dataclass
class ClonoidImage:
    """Subgroup of L^k generated by clonoid images of fixed u-columns."""

    group: AbelianGroupSpec
    k: int
    generators: list                      # canonical echelon generators
    emitted: list                         # (tag, tuple) raw emissions
    tuples_materialized: int = 0

    def compact_rep(self):
        from .affine import subgroup_compact_tuples
        from .comprep import EnumeratedCompactRep
        tuples = subgroup_compact_tuples(self.group, self.k, self.generators)
        rep = EnumeratedCompactRep((), [], None)
        for t in tuples:
            rep.add(t, None)
        return rep


def clonoid_image_comprep(gens: ClonoidGenSet, u_columns) -> ClonoidImage:
    """Generators of {f(u_1..u_n) : f generated by `gens`} inside L^k.

    Rows are classified into planes; each binary generator contributes one
    tuple per populated plane, evaluated through the plane parameterization,
    and each unary generator contributes its diagonal-collapse image.
    """
    u_columns = [tuple(u) for u in u_columns]
    n = len(u_columns)
    if n < 1:
        raise AlgebraError("at least one u-column is required")
    k = len(u_columns[0])
    group = gens.group
    p = gens.p
    m = group.exponent
    zero = group.zero
    rows = [tuple(col[i] for col in u_columns) for i in range(k)]
    if n == 1:
        kinds = [Diagonal(r[0]) for r in rows]
    else:
        kinds = [classify_row(r, p) for r in rows]

    emitted = []
    if n >= 2:
        planes: dict = {}
        for i, kind in enumerate(kinds):
            if isinstance(kind, Plane):
                planes.setdefault(kind.axis, []).append(i)
        for axis in sorted(planes):
            for bi, f in enumerate(gens.binary):
                vec = [zero] * k
                for i in planes[axis]:
                    kind = kinds[i]
                    vec[i] = f[kind.x * p + kind.y]
                emitted.append((("binary", bi, axis), tuple(vec)))
    diag_scale = pow(p, n - 1, m) if n >= 2 else 1
    plane_scale = pow(p, n - 2, m) if n >= 2 else 0
    for ai, f in enumerate(gens.unary):
        total = zero
        for v in range(p):
            total = group.add(total, f[v])
        vec = []
        for kind in kinds:
            if isinstance(kind, Diagonal):
                vec.append(group.scale(diag_scale, f[kind.value]))
            else:
                vec.append(group.scale(plane_scale, total))
        emitted.append((("unary", ai), tuple(vec)))

    ech = Echelon(m, k * group.rank)
    for _, vec in emitted:
        ech.insert(group.embed_elements(vec))
    ech.canonicalize()
    generators = [group.unembed(np.asarray(row)) for row in ech.rows]
    return ClonoidImage(group=group, k=k, generators=generators,
                        emitted=emitted,
                        tuples_materialized=len(emitted) + len(generators))
