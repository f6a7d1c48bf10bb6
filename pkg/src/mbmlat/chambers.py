"""Chamber geometry in the positive cone of a signature-(1, m) lattice.

A chamber is a connected component of the positive cone minus the union
of the walls of a :class:`~mbmlat.enumeration.WallSpec`.  Chambers are
identified by the set of walls crossed from a fixed base witness -- the
true chamber set is infinite, so every identity claim is scoped to the
finite explored wall universe.

Facet decisions are exact for reflective walls: s supports a facet of
the chamber of w if and only if no other wall separates w from its
mirror image r_s(w); the midpoint of that segment is the orthogonal
projection of w onto the wall and serves as the facet witness.  For
non-reflective walls a projection/certificate/repair procedure is used
and walls it cannot decide are reported explicitly, never dropped.

Everything is pure and exact; witnesses stay rational.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    Lattice,
    Vector,
    as_int_vector,
    pairing,
    primitive_integral,
    primitive_part,
    reflect_vector,
    sign_normalize,
    square,
    vec_is_integral,
)
from .enumeration import (
    Wall,
    WallSpec,
    ensure_wall_free,
    has_other_separating_wall,
    is_reflective,
    separating_walls,
    walls_near,
)
from .errors import (
    FlagChainError,
    NonPositiveVectorError,
    ReductionInvariantError,
    ValidationError,
)

DEFAULT_SEARCH_BOUND = 24
_REPAIR_BUDGET = 64


# ---------------------------------------------------------------------------
# chambers and membership


@dataclass(frozen=True)
class Chamber:
    """An explored chamber: interior witness plus crossing data.

    ``crossing_set`` is exactly ``separating_walls(base_witness, witness)``
    and doubles as the canonical chamber key relative to the base.
    """

    lattice: Lattice
    spec: WallSpec
    witness: Vector
    base_witness: Vector
    crossing_set: tuple[Wall, ...]

    @property
    def key(self) -> tuple:
        return tuple(w.sort_key for w in self.crossing_set)


def chamber_at(L: Lattice, witness, base=None, spec: WallSpec = None, validate: bool = True) -> Chamber:
    """Build the chamber containing ``witness`` relative to ``base``.

    Both points must be positive and wall-free; violations raise
    WallIncidenceError so callers can perturb.
    """
    if spec is None:
        raise ValidationError("chamber_at needs a WallSpec")
    if base is None:
        base = witness
    wi = primitive_integral(witness)
    bi = primitive_integral(base)
    if validate:
        ensure_wall_free(L, wi, spec)
        ensure_wall_free(L, bi, spec)
    crossing = tuple(sorted(separating_walls(L, bi, wi, spec), key=lambda w: w.sort_key))
    return Chamber(lattice=L, spec=spec, witness=wi, base_witness=bi, crossing_set=crossing)


def same_chamber(L: Lattice, v, w, spec: WallSpec) -> bool:
    """True iff no spec wall strictly separates v from w."""
    return not separating_walls(L, primitive_integral(v), w, spec)


@dataclass(frozen=True)
class ReductionResult:
    """Reflection word moving a point into the base chamber.

    Applying the word's reflections in reverse order to the base chamber
    recovers the input's chamber; ``image`` is the canonical chamber
    representative of the input.
    """

    word: tuple[Wall, ...]
    image: Vector

    @property
    def canonical_point(self) -> Vector:
        return self.image


def reduce_to_base(L: Lattice, v, base, spec: WallSpec) -> ReductionResult:
    """Greedy wall-crossing reduction of v into the chamber of base.

    Each step reflects across the minimal (square, lex) separating wall
    and must strictly decrease the separating count -- a failure to do so
    would falsify the algorithm and raises ReductionInvariantError.
    """
    base_p = primitive_integral(base)
    cur = tuple(v)
    word: list[Wall] = []
    sep = separating_walls(L, base_p, cur, spec)
    while sep:
        s = min(sep, key=lambda w: w.sort_key)
        cur = reflect_vector(L, cur, s.vector)
        word.append(s)
        nxt = separating_walls(L, base_p, cur, spec)
        if len(nxt) >= len(sep):
            raise ReductionInvariantError(
                f"reflection in {s.vector} did not decrease the separating count "
                f"({len(sep)} -> {len(nxt)}); the wall system is not reflection-stable here"
            )
        sep = nxt
    return ReductionResult(word=tuple(word), image=cur)


# ---------------------------------------------------------------------------
# facets


@dataclass(frozen=True)
class Face:
    """A facet of a chamber: supporting wall plus an on-wall witness.

    The supporting wall is oriented toward the chamber interior
    (q(wall, chamber witness) > 0); the witness pairs to zero with the
    wall, strictly positively with every other wall that is strict at
    the chamber witness within the search universe.
    """

    supporting_wall: Wall
    witness_on_wall: Vector
    chamber_witness: Vector


@dataclass(frozen=True)
class FacetResult:
    """Facets found within the candidate universe q(s, witness) <= search_bound.

    ``undecided`` lists candidate walls the bounded procedure could not
    classify (possible only for non-reflective walls); completeness of
    the candidate list itself is relative to ``search_bound``.
    """

    faces: tuple[Face, ...]
    undecided: tuple[Wall, ...]
    search_bound: int

    @property
    def complete(self) -> bool:
        return not self.undecided

    def __iter__(self) -> Iterator[Face]:
        return iter(self.faces)

    def __len__(self) -> int:
        return len(self.faces)


def _project_off(L: Lattice, v, s) -> Vector:
    """v minus its s-component (exact); lands in s^perp."""
    c = Fraction(pairing(L, v, s), pairing(L, s, s))
    return tuple(Fraction(v[i]) - c * s[i] for i in range(L.rank))


def _facet_witness(L: Lattice, witness, s) -> Vector:
    m = _project_off(L, witness, s)
    return primitive_integral(m)


def facet_walls(L: Lattice, chamber: Chamber, search_bound: int = DEFAULT_SEARCH_BOUND) -> FacetResult:
    """Facets of a chamber among walls with q(s, witness) <= search_bound.

    Reflective walls are decided exactly via the mirror criterion;
    non-reflective ones fall back to projection witness, separation
    certificate, then a bounded reflection-repair search.
    """
    spec = chamber.spec
    w = chamber.witness
    candidates = walls_near(L, w, spec, search_bound)
    faces: list[Face] = []
    undecided: list[Wall] = []
    for s in candidates:
        if is_reflective(L, s.vector):
            # cheap kill: a facet's midpoint witness must be strictly
            # feasible for every other wall, candidates included
            m = _project_off(L, w, s.vector)
            if any(
                pairing(L, u.vector, m) <= 0
                for u in candidates
                if u.unsigned() != s.unsigned()
            ):
                continue
            # exact mirror criterion: s is a facet iff nothing else
            # separates the witness from its reflection
            mirror = reflect_vector(L, w, s.vector)
            if not has_other_separating_wall(L, w, mirror, spec, {s.vector}):
                faces.append(Face(supporting_wall=s, witness_on_wall=primitive_integral(m),
                                  chamber_witness=w))
            continue
        status, on_wall = _decide_nonreflective(L, w, s, candidates, spec)
        if status == "facet":
            faces.append(Face(supporting_wall=s, witness_on_wall=on_wall, chamber_witness=w))
        elif status == "unknown":
            undecided.append(s)
    faces.sort(key=lambda f: f.supporting_wall.sort_key)
    return FacetResult(faces=tuple(faces), undecided=tuple(undecided), search_bound=search_bound)


def _decide_nonreflective(L: Lattice, w, s: Wall, candidates, spec) -> tuple[str, Vector | None]:
    others = [u for u in candidates if u.unsigned() != s.unsigned()]
    y = _project_off(L, w, s.vector)  # positive, on the wall

    def violated(pt):
        return [u for u in others if pairing(L, u.vector, pt) <= 0]

    vio = violated(y)
    if not vio:
        return "facet", primitive_integral(y)
    # certificate: a wall whose projection into s^perp has non-negative

    # square keeps one sign on the whole positive component of the wall
    for u in vio:
        ut = _project_off(L, u.vector, s.vector)
        if all(x == 0 for x in ut):
            continue
        su = pairing(L, ut, ut)
        if su >= 0 and pairing(L, ut, y) < 0:
            return "non-facet", None
    # bounded repair: reflect the witness inside the wall across violated
    # projections of strictly negative square
    for _ in range(_REPAIR_BUDGET):
        vio = violated(y)
        if not vio:
            return "facet", primitive_integral(y)
        u = min(vio, key=lambda x: (pairing(L, x.vector, y), x.sort_key))
        ut = _project_off(L, u.vector, s.vector)
        su = pairing(L, ut, ut)
        if su >= 0:
            if all(x == 0 for x in ut):
                return "non-facet", None
            if pairing(L, ut, y) < 0:
                return "non-facet", None
            return "unknown", None
        c = 2 * Fraction(pairing(L, y, ut), su)
        y = tuple(y[i] - c * ut[i] for i in range(L.rank))
    return "unknown", None


# ---------------------------------------------------------------------------
# flags


@dataclass(frozen=True)
class FlagEntry:
    """One step of a face chain after iterated orthogonal projection.

    ``vector`` is the sign-normalized primitive projection; ``unscaled``
    is the integral vector before content reduction (the product of the
    previous entries' squares times the rational projection), whose
    square carries the C^3 / C^9 growth bounds.  ``orientation`` is the
    sign relating ``vector`` to the actual projection direction.
    """

    vector: Vector
    square: int
    orientation: int
    unscaled: Vector
    unscaled_square: int


@dataclass(frozen=True)
class Flag:
    """Oriented flag encoding of a nested face chain."""

    entries: tuple[FlagEntry, ...]

    @property
    def depth(self) -> int:
        return len(self.entries)


def encode_flag(L: Lattice, face_chain: Sequence, spec: WallSpec) -> Flag:
    """Encode a nested face chain as successive integral projections.

    Entry k+1 is the projection of the (k+1)-st wall into the orthogonal
    complement of the previous ones, scaled integral by the product of
    the previous primitive squares, then primitivized.  A projection of
    non-negative square rejects the chain: such hyperplanes cannot cut a
    common chamber inside the positive cone.
    """
    if not face_chain:
        raise ValidationError("face chain must be non-empty")
    chain: list[Vector] = []
    for x in face_chain:
        v = x.vector if isinstance(x, Wall) else tuple(x)
        vi = primitive_part(as_int_vector(v))
        d = square(L, vi)
        if d not in spec.squares:
            raise ValidationError(f"chain vector {vi} has square {d}, not in spec {spec.squares}")
        chain.append(vi)
    entries: list[FlagEntry] = []
    basis: list[Vector] = []
    scale = 1
    for idx, x in enumerate(chain):
        if idx == 0:
            unscaled = x
        else:
            tilde = tuple(Fraction(c) for c in x)
            for u in basis:
                cu = Fraction(pairing(L, tilde, u), pairing(L, u, u))
                tilde = tuple(tilde[i] - cu * u[i] for i in range(L.rank))
            qt = pairing(L, tilde, tilde)
            if qt >= 0:
                raise FlagChainError(
                    f"projection of {x} has square {qt} >= 0: "
                    "chain does not bound a common chamber within Pos"
                )
            unscaled = tuple(scale * t for t in tilde)
            if not vec_is_integral(unscaled):
                raise FlagChainError(f"internal: scaled projection {unscaled} not integral")
            unscaled = as_int_vector(unscaled)
        stored = sign_normalize(unscaled)
        first = next(c for c in unscaled if c != 0)
        orientation = 1 if first > 0 else -1
        entries.append(
            FlagEntry(
                vector=stored,
                square=int(square(L, stored)),
                orientation=orientation,
                unscaled=unscaled,
                unscaled_square=int(square(L, unscaled)),
            )
        )
        basis.append(stored)
        scale *= int(square(L, stored))
    return Flag(entries=tuple(entries))


# ---------------------------------------------------------------------------
# tessellation exploration


@dataclass(frozen=True)
class ChamberNode:
    key: tuple
    witness: Vector
    depth: int
    facets: tuple[Wall, ...]       # oriented toward the chamber interior
    undecided: tuple[Wall, ...]

    @property
    def node_id(self) -> str:
        digest = hashlib.sha1(repr(self.key).encode()).hexdigest()
        return digest[:10]


@dataclass(frozen=True)
class TessellationEdge:
    a: tuple
    b: tuple
    wall: Wall                     # sign-normalized label


@dataclass(frozen=True)
class TessellationGraph:
    lattice_name: str
    base: Vector
    depth: int
    search_bound: int
    nodes: tuple[ChamberNode, ...]
    edges: tuple[TessellationEdge, ...]

    @property
    def complete(self) -> bool:
        return all(not n.undecided for n in self.nodes)

    def node_by_key(self, key) -> ChamberNode:
        for n in self.nodes:
            if n.key == key:
                return n
        raise KeyError(key)

    def to_json_dict(self) -> dict:
        ids = {n.key: n.node_id for n in self.nodes}
        return {
            "lattice": self.lattice_name,
            "base": list(self.base),
            "depth": self.depth,
            "search_bound": self.search_bound,
            "complete": self.complete,
            "nodes": [
                {
                    "id": n.node_id,
                    "depth": n.depth,
                    "witness": list(n.witness),
                    "crossing_walls": [list(k[1]) for k in n.key],
                    "facets": [list(w.vector) for w in n.facets],
                }
                for n in self.nodes
            ],
            "edges": [
                {"a": ids[e.a], "b": ids[e.b], "wall": list(e.wall.vector)}
                for e in self.edges
            ],
        }

    def to_dot(self) -> str:
        lines = ["graph tessellation {"]
        for n in self.nodes:
            witness = ",".join(str(c) for c in n.witness)
            lines.append(f'  "{n.node_id}" [label="{n.node_id} w=({witness})"];')
        ids = {n.key: n.node_id for n in self.nodes}
        for e in self.edges:
            wall = ",".join(str(c) for c in e.wall.vector)
            lines.append(f'  "{ids[e.a]}" -- "{ids[e.b]}" [label="({wall})"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def explore_tessellation(L: Lattice, base, spec: WallSpec, depth: int,
                         search_bound: int = DEFAULT_SEARCH_BOUND) -> TessellationGraph:
    """BFS over chambers by crossing facets up to the given depth.

    Crossing reflects the witness across the facet wall (exact; for a
    reflective wall system the image witness is wall-free whenever the
    source is).  Chamber identity is the sorted crossing set relative to
    the base witness.  Node and edge orderings are deterministic.
    """
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    base_p = primitive_integral(base)
    if square(L, base_p) <= 0:
        raise NonPositiveVectorError(f"base {tuple(base)} is not positive")
    ensure_wall_free(L, base_p, spec)

    def chamber_key(walls) -> tuple:
        return tuple(sorted(w.sort_key for w in walls))

    visited: dict[tuple, dict] = {}
    frontier: list[tuple[tuple, Vector]] = [((), base_p)]
    visited[()] = {"witness": base_p, "depth": 0}
    edges: set[tuple] = set()
    for layer in range(depth + 1):
        nxt: list[tuple[tuple, Vector]] = []
        for key, w in sorted(frontier):
            res = facet_walls(L, chamber_at(L, w, base_p, spec, validate=False), search_bound)
            visited[key]["facets"] = tuple(f.supporting_wall for f in res.faces)
            visited[key]["undecided"] = res.undecided
            if layer == depth:
                continue
            for face in res.faces:
                s = face.supporting_wall
                w2 = reflect_vector(L, w, s.vector)
                sep = separating_walls(L, base_p, w2, spec)
                key2 = chamber_key(sep)
                edges.add(tuple(sorted((key, key2))) + (s.unsigned(),))
                if key2 not in visited:
                    visited[key2] = {"witness": primitive_integral(w2), "depth": layer + 1}
                    nxt.append((key2, primitive_integral(w2)))
        frontier = nxt
        if not frontier:
            break
    nodes = tuple(
        ChamberNode(
            key=k,
            witness=rec["witness"],
            depth=rec["depth"],
            facets=rec.get("facets", ()),
            undecided=rec.get("undecided", ()),
        )
        for k, rec in sorted(visited.items(), key=lambda kv: (kv[1]["depth"], kv[0]))
    )
    edge_tuple = tuple(
        TessellationEdge(a=a, b=b, wall=wall)
        for a, b, wall in sorted(edges, key=lambda e: (e[0], e[1], e[2].sort_key))
    )
    return TessellationGraph(
        lattice_name=L.name,
        base=base_p,
        depth=depth,
        search_bound=search_bound,
        nodes=nodes,
        edges=edge_tuple,
    )
