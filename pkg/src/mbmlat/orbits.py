"""Isometry-group machinery: reflections, orbit canonicalization, the
degenerate-kernel orbit-representative algorithm, and face-orbit censuses.

The group acting is always user-supplied (a generator set); nothing here
claims to construct the full isometry group of an indefinite lattice.
Orbit canonical forms are explicit under-approximations: equal outputs
prove two vectors lie in one orbit (a word connects them), unequal
outputs are inconclusive unless the search is flagged complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .chambers import chamber_at, encode_flag, explore_tessellation, facet_walls
from .core import (
    Lattice,
    Matrix,
    Vector,
    as_int_vector,
    content,
    gram_apply,
    identity_matrix,
    integer_kernel,
    invert_rational,
    mat_mul,
    mat_transpose,
    mat_vec,
    pairing,
    sign_normalize,
    square,
    vec_add,
    vec_is_zero,
    vec_scale,
    _column_reduce,
    _det_bareiss,
)
from .enumeration import Wall, WallSpec
from .errors import (
    BaseRepsError,
    FlagChainError,
    KernelRankError,
    NonIntegralReflectionError,
    SquareBoundViolationError,
    ValidationError,
)


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    """An integer matrix preserving the Gram form, with determinant +-1."""

    lattice: Lattice
    matrix: Matrix

    def apply(self, v) -> Vector:
        return mat_vec(self.matrix, v)

    def compose(self, other: "Isometry") -> "Isometry":
        return isometry(self.lattice, mat_mul(self.matrix, other.matrix))

    def inverse(self) -> "Isometry":
        inv = invert_rational(self.matrix)
        return isometry(self.lattice, tuple(tuple(as_int_vector(row)) for row in inv))

    @classmethod
    def identity(cls, L: Lattice) -> "Isometry":
        return cls(lattice=L, matrix=identity_matrix(L.rank))


def isometry(L: Lattice, matrix) -> Isometry:
    """Validate M^T G M = G and det = +-1, then wrap."""
    m = tuple(tuple(int(x) for x in row) for row in matrix)
    if len(m) != L.rank or any(len(r) != L.rank for r in m):
        raise ValidationError(f"isometry matrix must be {L.rank}x{L.rank}")
    mt = mat_transpose(m)
    if mat_mul(mat_mul(mt, L.gram), m) != L.gram:
        raise ValidationError("matrix does not preserve the Gram form")
    if _det_bareiss(m) not in (1, -1):
        raise ValidationError("isometry matrix must have determinant +-1")
    return Isometry(lattice=L, matrix=m)


def reflection(L: Lattice, s) -> Isometry:
    """The reflection x -> x - 2 (q(x,s)/q(s,s)) s, if integral on L.

    Raises NonIntegralReflectionError carrying the first basis vector on
    which integrality fails.
    """
    sv = as_int_vector(s.vector if isinstance(s, Wall) else s)
    d = square(L, sv)
    if d == 0:
        raise ValidationError(f"cannot reflect in isotropic vector {sv}")
    gs = gram_apply(L, sv)
    cols = []
    for i in range(L.rank):
        num = 2 * gs[i]
        if num % d != 0:
            raise NonIntegralReflectionError(
                f"reflection in {sv} (square {d}) is not integral on basis vector e_{i}: "
                f"2 q(e_{i}, s) = {num} is not divisible by {d}",
                basis_index=i,
            )
        c = num // d
        cols.append(tuple((1 if j == i else 0) - c * sv[j] for j in range(L.rank)))
    return isometry(L, mat_transpose(cols))


def check_square_bound_reflective(L: Lattice, s) -> bool:
    """Reflectivity predicate with the 2*discriminant bound asserted.

    Returns whether the reflection in s is integral; when it is (and the
    lattice is non-degenerate) verifies |q(s,s)| <= 2*discriminant for
    the primitive part of s -- a theorem for primitive classes, whose
    failure would indicate a computation bug.  The reflection itself only
    depends on the ray, so s is primitivized up front.
    """
    from .core import primitive_part
    from .enumeration import is_reflective

    sv = primitive_part(as_int_vector(s.vector if isinstance(s, Wall) else s))
    refl = is_reflective(L, sv)
    if refl and not L.is_degenerate:
        d = square(L, sv)
        if abs(d) > 2 * L.discriminant:
            raise SquareBoundViolationError(
                f"integral reflection in {sv} has |square| {abs(d)} > 2*disc = {2 * L.discriminant}"
            )
    return refl


# ---------------------------------------------------------------------------
# degenerate splitting and the Kneser reduction


@dataclass(frozen=True)
class DegenerateSplit:
    """Lattice = complement (+) kernel, as abelian groups.

    ``kernel_gen`` spans ker(q); ``complement_basis`` holds B0 columns in
    lattice coordinates; the change of basis [B0 | l] is unimodular and
    ``coord_matrix`` is its inverse, so ``coord_matrix . v`` lists the
    complement coordinates followed by the kernel coordinate.
    """

    lattice: Lattice
    kernel_gen: Vector
    complement_basis: tuple[Vector, ...]
    induced: Lattice
    coord_matrix: Matrix

    def decompose(self, v) -> tuple[Vector, int]:
        coords = mat_vec(self.coord_matrix, as_int_vector(v))
        return coords[:-1], int(coords[-1])

    def complement_content(self, v) -> int:
        """Content of the image of v in lattice/kernel (the ideal generator)."""
        coords, _ = self.decompose(v)
        return content(coords)


def degenerate_split(L: Lattice) -> DegenerateSplit:
    """Split off the 1-dimensional kernel of the form."""
    kern = integer_kernel(L.gram, L.rank)
    if len(kern) != 1:
        raise KernelRankError(f"kernel has dimension {len(kern)}, need exactly 1")
    l = sign_normalize(kern[0])
    # dual vector y with y . l = 1 (standard dot product)
    g, cols = _column_reduce(l)
    if g != 1:
        raise KernelRankError(f"kernel generator {l} is not primitive")
    y = tuple(cols[0])
    _, ycols = _column_reduce(y)
    basis = tuple(tuple(c) for c in ycols[1:])
    induced_gram = [[int(pairing(L, a, b)) for b in basis] for a in basis]
    from .core import make_lattice

    induced = make_lattice(induced_gram, name=f"{L.name}/ker" if L.name else "")
    if induced.is_degenerate:
        raise KernelRankError("complement form is degenerate; kernel was not fully split")
    change = tuple(tuple(list(b[i] for b in basis) + [l[i]]) for i in range(L.rank))
    inv = invert_rational(change)
    coord = tuple(tuple(as_int_vector(row)) for row in inv)
    return DegenerateSplit(
        lattice=L, kernel_gen=l, complement_basis=basis, induced=induced, coord_matrix=coord
    )


def kneser_degenerate_reps(L: Lattice, r: int, base_reps) -> list[Vector]:
    """Orbit representatives of square r from complement representatives.

    For each supplied class a0 the ideal Hom(complement, kernel) . a0 is
    d Z with d the content of a0's complement coordinates; the emitted
    system is {a0 + k*l : 0 <= k < d}, matching the degenerate-kernel
    reduction.  (The system is complete; k and d-k give one orbit via the
    kernel sign flip, so it need not be minimal for d >= 3.)
    """
    split = degenerate_split(L)
    l = split.kernel_gen
    out: list[Vector] = []
    seen = set()
    for raw in base_reps:
        a0 = as_int_vector(raw)
        if len(a0) != L.rank:
            raise BaseRepsError(f"representative {a0} has wrong length")
        if vec_is_zero(a0):
            raise BaseRepsError("the zero vector cannot anchor a representative family")
        if square(L, a0) != r:
            raise BaseRepsError(f"representative {a0} has square {square(L, a0)}, expected {r}")
        d = split.complement_content(a0)
        if d == 0:
            raise BaseRepsError(f"representative {a0} lies in the kernel; its orbit family is degenerate")
        for k in range(d):
            vec = vec_add(a0, vec_scale(k, l))
            if vec not in seen:
                seen.add(vec)
                out.append(vec)
    return out


def transvection_isometries(split: DegenerateSplit) -> tuple[Isometry, ...]:
    """Kernel transvections e -> e + phi(e) l from the dual basis of the
    complement, together with their inverses.  These realize the ideal
    Hom(complement, kernel) . a0 concretely."""
    L = split.lattice
    n = L.rank
    l = split.kernel_gen
    gens = []
    for i in range(n - 1):
        phi = split.coord_matrix[i]
        for sgn in (1, -1):
            m = tuple(
                tuple((1 if rr == cc else 0) + sgn * l[rr] * phi[cc] for cc in range(n))
                for rr in range(n)
            )
            gens.append(isometry(L, m))
    return tuple(gens)


def kernel_sign_flip(split: DegenerateSplit) -> Isometry:
    """The isometry fixing the complement and negating the kernel generator."""
    L = split.lattice
    n = L.rank
    l = split.kernel_gen
    # the kernel-coordinate functional is the last row of the coordinate matrix
    phi = split.coord_matrix[n - 1]
    m = tuple(tuple((1 if rr == cc else 0) - 2 * l[rr] * phi[cc] for cc in range(n)) for rr in range(n))
    return isometry(L, m)


def lift_complement_isometry(split: DegenerateSplit, mat0) -> Isometry:
    """Lift an isometry of the complement to the full lattice (kernel fixed)."""
    L = split.lattice
    n = L.rank
    m0 = tuple(tuple(int(x) for x in row) for row in mat0)
    if len(m0) != n - 1 or any(len(r) != n - 1 for r in m0):
        raise ValidationError(f"complement isometry must be {n-1}x{n-1}")
    # columns: images of the complement basis, then l
    new_cols = []
    for j in range(n - 1):
        img = tuple(
            sum(split.complement_basis[t][i] * m0[t][j] for t in range(n - 1)) for i in range(n)
        )
        new_cols.append(img)
    new_cols.append(split.kernel_gen)
    change = tuple(tuple(new_cols[j][i] for j in range(n)) for i in range(n))
    return isometry(L, mat_mul(change, split.coord_matrix))


def isometries_in_box(L: Lattice, bound: int) -> tuple[Isometry, ...]:
    """All isometries with matrix entries in [-bound, bound], by column search.

    Desk-scale helper (rank <= 3): columns are drawn from the coordinate
    box and pruned by Gram pairings as they are chosen.
    """
    if L.rank > 3:
        raise ValidationError("isometries_in_box is a desk-scale helper for rank <= 3")
    from itertools import product

    box = [v for v in product(range(-bound, bound + 1), repeat=L.rank)]
    out = []

    def rec(cols):
        j = len(cols)
        if j == L.rank:
            m = tuple(tuple(cols[c][r] for c in range(L.rank)) for r in range(L.rank))
            if _det_bareiss(m) in (1, -1):
                out.append(Isometry(lattice=L, matrix=m))
            return
        for v in box:
            if square(L, v) != L.gram[j][j]:
                continue
            if any(pairing(L, cols[i], v) != L.gram[i][j] for i in range(j)):
                continue
            rec(cols + [v])

    rec([])
    return tuple(out)


# ---------------------------------------------------------------------------
# orbit canonicalization


def _norm_key(v: Vector):
    """Canonical order: sup-norm first, then lexicographic.

    Orbits of hyperbolic reflection groups are infinite and have no
    lexicographic minimum, but only finitely many elements of bounded
    sup-norm, so this order has a genuine minimum on every orbit.
    """
    return (max(abs(c) for c in v), v)


@dataclass(frozen=True)
class OrbitRepResult:
    """Minimal orbit element found within the budget, under the
    (sup-norm, lexicographic) canonical order.

    ``complete`` is True only when the whole orbit was enumerated inside
    the coordinate box with no pruning: then the representative is the
    true canonical form.  Equal representatives always certify one
    orbit; distinct ones are inconclusive unless complete.
    """

    vector: Vector
    complete: bool
    visited: int


def _generator_matrices(generators) -> list[Matrix]:
    """Flatten generators to matrices, closed under inverses."""
    mats: list[Matrix] = []
    seen = set()
    for g in generators:
        m = g.matrix if isinstance(g, Isometry) else tuple(tuple(int(x) for x in r) for r in g)
        if m not in seen:
            seen.add(m)
            mats.append(m)
        inv = tuple(tuple(as_int_vector(row)) for row in invert_rational(m))
        if inv not in seen:
            seen.add(inv)
            mats.append(inv)
    return mats


def _orbit_bfs(L: Lattice, v: Vector, mats, word_budget: int, box: int):
    seen = {v}
    frontier = [v]
    best = v
    best_key = _norm_key(v)
    pruned = False
    for _ in range(word_budget):
        nxt = []
        for x in frontier:
            for m in mats:
                y = mat_vec(m, x)
                if max(abs(c) for c in y) > box:
                    pruned = True
                    continue
                if y in seen:
                    continue
                seen.add(y)
                nxt.append(y)
                k = _norm_key(y)
                if k < best_key:
                    best, best_key = y, k
        frontier = nxt
        if not frontier:
            break
    return best, (not frontier) and (not pruned), len(seen)


def canonical_orbit_rep(L: Lattice, v, generators, word_budget: int = 8) -> OrbitRepResult:
    """BFS the orbit of v under generator words, return the minimal element
    found under the (sup-norm, lexicographic) canonical order.

    The search is confined to a coordinate box auto-sized to the current
    representative (4 * max|coord| + 8) and restarts from any smaller
    element it finds, descending until stable.
    """
    rep = as_int_vector(v)
    mats = _generator_matrices(generators)
    complete = False
    visited = 0
    for _ in range(8):
        box = 4 * max(1, max(abs(c) for c in rep)) + 8
        best, complete, visited = _orbit_bfs(L, rep, mats, word_budget, box)
        if best == rep:
            break
        rep = best
    return OrbitRepResult(vector=rep, complete=complete, visited=visited)


def _sign_min(v: Vector) -> Vector:
    return min(v, tuple(-c for c in v))


def orbit_key_mod_sign(L: Lattice, v, mats, word_budget: int = 8) -> Vector:
    """Canonical key of the orbit of {+-v}: norm-lex min over sign-quotiented BFS."""
    rep = _sign_min(as_int_vector(v))
    for _ in range(8):
        box = 4 * max(1, max(abs(c) for c in rep)) + 8
        seen = {rep}
        frontier = [rep]
        best = rep
        best_key = _norm_key(rep)
        for _ in range(word_budget):
            nxt = []
            for x in frontier:
                for m in mats:
                    y = _sign_min(mat_vec(m, x))
                    if max(abs(c) for c in y) > box:
                        continue
                    if y in seen:
                        continue
                    seen.add(y)
                    nxt.append(y)
                    k = _norm_key(y)
                    if k < best_key:
                        best, best_key = y, k
            frontier = nxt
            if not frontier:
                break
        if best == rep:
            break
        rep = best
    return rep


def _pair_norm_key(p) -> tuple:
    return (max(max(abs(c) for c in p[0]), max(abs(c) for c in p[1])), p)


def _pair_key(L: Lattice, pair, mats, word_budget: int, cache: dict) -> tuple:
    """Canonical key of an ordered wall pair under the diagonal action,
    orientation forgotten entrywise; (sup-norm, lex) canonical order."""
    norm = (_sign_min(pair[0]), _sign_min(pair[1]))
    if norm in cache:
        return cache[norm]
    rep = norm
    for _ in range(6):
        box = 4 * max(1, max(max(abs(c) for c in rep[0]), max(abs(c) for c in rep[1]))) + 8
        seen = {rep}
        frontier = [rep]
        best = rep
        best_key = _pair_norm_key(rep)
        for _ in range(word_budget):
            nxt = []
            for x in frontier:
                for m in mats:
                    y = (_sign_min(mat_vec(m, x[0])), _sign_min(mat_vec(m, x[1])))
                    if max(abs(c) for c in y[0] + y[1]) > box:
                        continue
                    if y in seen:
                        continue
                    seen.add(y)
                    nxt.append(y)
                    k = _pair_norm_key(y)
                    if k < best_key:
                        best, best_key = y, k
            frontier = nxt
            if not frontier:
                break
        if best == rep:
            break
        rep = best
    cache[norm] = rep
    return rep


# ---------------------------------------------------------------------------
# census


@dataclass(frozen=True)
class CensusRow:
    depth: int
    codim: int
    faces: int
    new_orbits: int
    total_orbits: int


@dataclass(frozen=True)
class CensusTable:
    """Face-orbit census across a tessellation exploration.

    ``saturation`` maps codimension to the per-depth new-orbit counts;
    finiteness at desk scale shows up as those flattening to zero.
    """

    lattice_name: str
    base: Vector
    depth: int
    rows: tuple[CensusRow, ...]

    def saturation(self, codim: int) -> tuple[int, ...]:
        return tuple(r.new_orbits for r in self.rows if r.codim == codim)

    def to_json_dict(self) -> dict:
        return {
            "lattice": self.lattice_name,
            "base": list(self.base),
            "depth": self.depth,
            "rows": [
                {
                    "depth": r.depth,
                    "codim": r.codim,
                    "faces": r.faces,
                    "new_orbits": r.new_orbits,
                    "total_orbits": r.total_orbits,
                }
                for r in self.rows
            ],
            "saturation": {
                str(c): list(self.saturation(c)) for c in sorted({r.codim for r in self.rows})
            },
        }

    def to_text(self) -> str:
        header = ("depth", "codim", "faces", "new_orbits", "total_orbits")
        table = [header] + [
            tuple(str(x) for x in (r.depth, r.codim, r.faces, r.new_orbits, r.total_orbits))
            for r in self.rows
        ]
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = ["  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)) for row in table]
        return "\n".join(lines) + "\n"


def face_orbit_census(
    L: Lattice,
    base,
    spec: WallSpec,
    generators,
    depth: int,
    word_budget: int = 8,
    search_bound: int = 24,
    max_codim: int = 2,
) -> CensusTable:
    """Tabulate face orbits per codimension and BFS depth.

    Facets (codim 1) are keyed by the orbit of their wall vector;
    codim-2 face chains are keyed by the orbit of the flag pair under
    the diagonal generator action, orientation forgotten.  New-orbit
    counts per depth give the saturation profile.
    """
    graph = explore_tessellation(L, base, spec, depth, search_bound)
    mats = _generator_matrices(generators)
    seen1: set = set()
    seen2: set = set()
    key1_cache: dict = {}
    pair_cache: dict = {}
    rows: list[CensusRow] = []
    for d in range(depth + 1):
        nodes = [n for n in graph.nodes if n.depth == d]
        faces1 = 0
        new1 = 0
        faces2 = 0
        new2 = 0
        for n in nodes:
            for s in n.facets:
                faces1 += 1
                norm = _sign_min(s.vector)
                if norm not in key1_cache:
                    key1_cache[norm] = orbit_key_mod_sign(L, norm, mats, word_budget)
                k = key1_cache[norm]
                if k not in seen1:
                    seen1.add(k)
                    new1 += 1
            if max_codim >= 2:
                for s1, s2 in permutations(n.facets, 2):
                    try:
                        flag = encode_flag(L, [s1, s2], spec)
                    except FlagChainError:
                        continue
                    faces2 += 1
                    pair = (flag.entries[0].vector, flag.entries[1].vector)
                    k = _pair_key(L, pair, mats, word_budget, pair_cache)
                    if k not in seen2:
                        seen2.add(k)
                        new2 += 1
        rows.append(CensusRow(depth=d, codim=1, faces=faces1, new_orbits=new1, total_orbits=len(seen1)))
        if max_codim >= 2:
            rows.append(CensusRow(depth=d, codim=2, faces=faces2, new_orbits=new2, total_orbits=len(seen2)))
    return CensusTable(lattice_name=L.name, base=graph.base, depth=depth, rows=tuple(rows))


def facet_reflection_generators(L: Lattice, base, spec: WallSpec, search_bound: int = 24) -> tuple[Isometry, ...]:
    """Reflections in the facet walls of the base chamber.

    For a reflective wall system these generate the full chamber-transitive
    reflection group, making them the natural census generator set.
    """
    ch = chamber_at(L, base, spec=spec)
    res = facet_walls(L, ch, search_bound)
    return tuple(reflection(L, f.supporting_wall) for f in res.faces)
