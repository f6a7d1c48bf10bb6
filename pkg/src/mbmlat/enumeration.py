"""Finite enumeration kernels for wall-and-chamber geometry.

Three engines live here:

* :func:`definite_short_vectors` -- all short vectors of a negative
  definite lattice, by exact Fincke-Pohst bound propagation;
* :func:`vectors_of_square` -- the deliberately simple box-scan oracle;
* :func:`separating_walls` -- the complete search for walls of
  prescribed square crossed between two positive classes.

Completeness of the separating search rests on the decomposition
``s = (t/N) v0 + s_perp`` with ``t = q(s, v0)``, ``N = q(v0, v0)``:
the orthogonal part lives in the negative definite lattice ``v0^perp``
with ``q(s_perp, s_perp) = d - t^2/N`` forced exactly, and the strict
condition ``q(s, v1) < 0`` together with Cauchy-Schwarz in ``v0^perp``
bounds ``t^2 < |d| (mu^2 - N q1) / q1`` where ``mu = q(v0, v1)`` and
``q1 = q(v1, v1)``.  Every admissible ``t`` is a multiple of the
divisibility ``g0 = gcd(gram . v0)``; for each one the candidates are
enumerated exactly in ``v0^perp`` around a rational center and
reconstructed in the ambient lattice, discarding non-integral or
imprimitive reconstructions.

All functions are pure; per-basepoint data is memoized on immutable keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor

from .core import (
    Lattice,
    Vector,
    as_int_vector,
    content,
    floor_sqrt,
    gram_apply,
    pairing,
    primitive_integral,
    primitive_part,
    rational_sqrt,
    restrict_to_hyperplane,
    sign_normalize,
    solve_rational,
    square,
    vec_is_integral,
)
from .errors import (
    NonPositiveVectorError,
    SignatureError,
    ValidationError,
)


# ---------------------------------------------------------------------------
# wall specifications and walls


@dataclass(frozen=True)
class WallSpec:
    """The finite set of allowed wall squares (all negative).

    ``require_reflective`` keeps only classes whose reflection is
    integral on the lattice, i.e. 2 q(e, s) divisible by q(s, s) for
    every basis vector e.
    """

    squares: tuple[int, ...]
    require_reflective: bool = False

    def __post_init__(self):
        if not self.squares:
            raise ValidationError("WallSpec needs a non-empty set of squares")
        if any((not isinstance(d, int)) or d >= 0 for d in self.squares):
            raise ValidationError(f"WallSpec squares must be negative integers, got {self.squares}")

    @property
    def max_abs_square(self) -> int:
        return max(abs(d) for d in self.squares)


def wall_spec(squares, require_reflective: bool = False) -> WallSpec:
    """Normalize any iterable of negative integers into a WallSpec."""
    return WallSpec(squares=tuple(sorted(set(int(d) for d in squares))), require_reflective=require_reflective)


@dataclass(frozen=True)
class Wall:
    """A primitive negative class; its orthogonal hyperplane is the wall.

    The stored sign depends on context: sign-normalized when the wall
    stands alone, oriented (q(vector, base) > 0) when produced by the
    separating search.
    """

    vector: Vector
    square: int

    @property
    def sort_key(self):
        return (self.square, self.vector)

    def unsigned(self) -> "Wall":
        return Wall(vector=sign_normalize(self.vector), square=self.square)

    def negated(self) -> "Wall":
        return Wall(vector=tuple(-x for x in self.vector), square=self.square)


def make_wall(L: Lattice, v, orient_against=None) -> Wall:
    vi = primitive_part(as_int_vector(v))
    d = square(L, vi)
    if d >= 0:
        raise ValidationError(f"wall vector {tuple(v)} has non-negative square {d}")
    if orient_against is not None:
        t = pairing(L, vi, orient_against)
        if t < 0:
            vi = tuple(-x for x in vi)
        elif t == 0:
            vi = sign_normalize(vi)
    else:
        vi = sign_normalize(vi)
    return Wall(vector=vi, square=int(d))


def is_reflective(L: Lattice, s) -> bool:
    """True iff x -> x - 2 (q(x,s)/q(s,s)) s is integral on all of L."""
    d = square(L, s)
    if d == 0:
        return False
    return all((2 * x) % d == 0 for x in gram_apply(L, s))


def _passes(L: Lattice, s, spec: WallSpec) -> bool:
    return (not spec.require_reflective) or is_reflective(L, s)


# ---------------------------------------------------------------------------
# exact Fincke-Pohst enumeration


class _PosDefForm:
    """Cholesky data of a positive definite rational quadratic form.

    Decomposes Q(x) = sum_i D_i (x_i + sum_{j>i} mu_ij x_j)^2 with exact
    rational D_i > 0, enabling recursive coordinate bounding.
    """

    def __init__(self, gram):
        n = len(gram)
        q = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            if q[i][i] <= 0:
                raise SignatureError("form is not positive definite")
            for j in range(i + 1, n):
                q[j][i] = q[i][j]
                q[i][j] = q[i][j] / q[i][i]
            for k in range(i + 1, n):
                for l in range(k, n):
                    q[k][l] = q[k][l] - q[k][i] * q[i][l]
        self.n = n
        self.diag = tuple(q[i][i] for i in range(n))
        self.mu = tuple(tuple(q[i][j] for j in range(n)) for i in range(n))

    def _candidates(self, off: Fraction, budget: Fraction, d: Fraction):
        """Integers t with d*(t + off)^2 <= budget (budget >= 0)."""
        bound = floor_sqrt(budget / d)
        lo = ceil(-off) - bound - 1
        hi = floor(-off) + bound + 1
        for t in range(lo, hi + 1):
            if d * (t + off) * (t + off) <= budget:
                yield t
            # the window has at most two slack candidates at each end

    def enumerate_exact(self, center, target: Fraction):
        """Yield every integer x with Q(x + center) == target, exactly."""
        if target < 0:
            return
        n, diag, mu = self.n, self.diag, self.mu
        if n == 0:
            if target == 0:
                yield ()
            return
        x = [0] * n
        z = [Fraction(0)] * n
        c = [Fraction(ci) for ci in center]

        def rec(level: int, used: Fraction):
            # w_level = (x_level + c_level) + sum_{j>level} mu[level][j] (x_j + c_j)
            off = c[level]
            for j in range(level + 1, n):
                off += mu[level][j] * z[j]
            rem = target - used
            if rem < 0:
                return
            if level == 0:
                u = rem / diag[0]
                root = rational_sqrt(u)
                if root is None:
                    return
                for r in (root, -root) if root != 0 else (root,):
                    t = r - off
                    if t.denominator == 1:
                        x[0] = int(t)
                        yield tuple(x)
                return
            for t in self._candidates(off, rem, diag[level]):
                x[level] = t
                z[level] = t + c[level]
                w = t + off
                yield from rec(level - 1, used + diag[level] * w * w)

        yield from rec(n - 1, Fraction(0))

    def enumerate_range(self, lo: int, hi: int) -> list[Vector]:
        """All integer x with lo <= Q(x) <= hi (center 0)."""
        n, diag, mu = self.n, self.diag, self.mu
        out: list[Vector] = []
        x = [0] * n
        z = [Fraction(0)] * n
        hif = Fraction(hi)

        def rec(level: int, used: Fraction):
            off = Fraction(0)
            for j in range(level + 1, n):
                off += mu[level][j] * z[j]
            rem = hif - used
            if rem < 0:
                return
            if level == 0:
                for t in self._candidates(off, rem, diag[0]):
                    total = used + diag[0] * (t + off) * (t + off)
                    if lo <= total <= hif:
                        x[0] = t
                        out.append(tuple(x))
                return
            for t in self._candidates(off, rem, diag[level]):
                x[level] = t
                z[level] = Fraction(t)
                w = t + off
                rec(level - 1, used + diag[level] * w * w)

        if n == 0:
            return [()] if lo <= 0 <= hi else []
        rec(n - 1, Fraction(0))
        return out


@lru_cache(maxsize=256)
def _posdef_of_negdef(gram: tuple) -> _PosDefForm:
    return _PosDefForm(tuple(tuple(-x for x in row) for row in gram))


# ---------------------------------------------------------------------------
# short vectors and the box oracle


def definite_short_vectors(L: Lattice, min_square: int) -> list[Vector]:
    """All v with min_square <= q(v, v) < 0, one per +-pair, lex order.

    The lattice must be negative definite; the canonical representative
    has its first nonzero coordinate positive.
    """
    if L.signature != (0, L.rank) or L.rank == 0:
        raise SignatureError(f"lattice is not negative-definite: signature {L.signature}")
    if not isinstance(min_square, int) or min_square >= 0:
        raise ValidationError(f"min_square must be a negative integer, got {min_square}")
    form = _posdef_of_negdef(L.gram)
    found = set()
    for v in form.enumerate_range(1, -min_square):
        found.add(sign_normalize(v))
    return sorted(found)


@lru_cache(maxsize=32)
def _box_scan(gram: tuple, target: int, box: int) -> tuple[Vector, ...]:
    n = len(gram)
    out = []
    coords = [0] * n
    # incremental evaluation: val = q(prefix), lin[j] = q(prefix, e_j)
    def rec(k: int, val: int, lin: tuple):
        if k == n:
            if val == target:
                out.append(tuple(coords))
            return
        gkk = gram[k][k]
        for t in range(-box, box + 1):
            coords[k] = t
            rec(k + 1, val + 2 * t * lin[k] + t * t * gkk,
                tuple(lin[j] + t * gram[j][k] for j in range(n)) if k + 1 < n else lin)

    rec(0, 0, tuple(0 for _ in range(n)))
    return tuple(sorted(out))


def vectors_of_square(L: Lattice, target: int, box: int) -> list[Vector]:
    """Brute-force reference oracle: all v with q(v,v) == target, |v_i| <= box.

    Both signs and (for target 0) the zero vector are included.  Results
    are cached per (lattice, target, box) since the scan does not depend
    on any base point.
    """
    if box < 1:
        raise ValidationError(f"box must be >= 1, got {box}")
    return list(_box_scan(L.gram, int(target), int(box)))


# ---------------------------------------------------------------------------
# separating walls


@dataclass(frozen=True)
class _BaseData:
    """Cached per-basepoint machinery for wall searches around v0."""

    norm: int                      # N = q(v0, v0)
    g0: int                        # gcd of gram . v0
    x0: Vector                     # integral solution of q(x, v0) = g0
    basis: tuple                   # integral basis of v0^perp (columns)
    form: _PosDefForm              # positive definite form on v0^perp
    c1: tuple                      # Gw^{-1} (B^T G x0): center per unit t/g0
    sub_gram: tuple


@lru_cache(maxsize=256)
def _base_data(L: Lattice, v0: Vector) -> _BaseData:
    n = L.rank
    row = gram_apply(L, v0)
    from .core import _column_reduce  # shared exact elimination kernel

    g0, cols = _column_reduce(row)
    x0 = tuple(cols[0])
    basis = tuple(tuple(c) for c in cols[1:])
    sub_gram = tuple(tuple(int(pairing(L, a, b)) for b in basis) for a in basis)
    # negative definiteness of v0^perp is equivalent to v0 being positive
    form = _PosDefForm(tuple(tuple(-x for x in r) for r in sub_gram)) if basis else _PosDefForm(())
    gx0 = gram_apply(L, x0)
    h1 = tuple(sum(b[i] * gx0[i] for i in range(n)) for b in basis)
    c1 = solve_rational(sub_gram, h1) if basis else ()
    return _BaseData(
        norm=int(square(L, v0)), g0=int(g0), x0=x0, basis=basis, form=form, c1=tuple(c1), sub_gram=sub_gram
    )


def _embed(basis, x0, k, y) -> Vector:
    n = len(x0)
    return tuple(k * x0[i] + sum(y[j] * basis[j][i] for j in range(len(basis))) for i in range(n))


def _check_positive_pair(L: Lattice, v0, v1):
    if L.signature[0] != 1:
        raise SignatureError(f"wall search needs signature (1, m), lattice has {L.signature}")
    if square(L, v0) <= 0:
        raise NonPositiveVectorError(f"v0 = {tuple(v0)} is not positive")
    if square(L, v1) <= 0:
        raise NonPositiveVectorError(f"v1 = {tuple(v1)} is not positive")
    if pairing(L, v0, v1) <= 0:
        raise NonPositiveVectorError("v0 and v1 do not lie in the same positive component")


def _iter_walls_for_t(L: Lattice, v0p: Vector, spec: WallSpec, d: int, t_values, keep):
    """Shared kernel: yield walls s with q(s,s) = d, q(s, v0p) = t > 0."""
    data = _base_data(L, v0p)
    N, g0 = data.norm, data.g0
    for t in t_values:
        k, rmod = divmod(t, g0)
        if rmod != 0:
            continue
        target = Fraction(t * t, N) - d
        center = tuple(k * ci for ci in data.c1)
        for y in data.form.enumerate_exact(center, target):
            s = _embed(data.basis, data.x0, k, y)
            if content(s) != 1:
                continue
            if not _passes(L, s, spec):
                continue
            if keep is not None and not keep(s):
                continue
            yield Wall(vector=s, square=d)


def separating_walls(L: Lattice, v0, v1, spec: WallSpec) -> list[Wall]:
    """Exactly the walls s with q(s,s) in spec, q(s, v0) > 0 > q(s, v1).

    Output is sign-normalized so q(s, v0) > 0 and sorted by
    (square, coordinates).  The search is complete: the bound
    t^2 < |d| (mu^2 - N q1)/q1 derived from Cauchy-Schwarz in the
    negative definite v0^perp caps the admissible pairings.

    The output is the exact strict-inequality set whether or not v0
    touches some wall; chamber-level callers validate wall-freeness
    separately (walls through v0 or v1 are never returned).
    """
    return sorted(iter_separating_walls(L, v0, v1, spec), key=lambda w: w.sort_key)


def iter_separating_walls(L: Lattice, v0, v1, spec: WallSpec, exclude_unsigned=frozenset()):
    """Generator behind :func:`separating_walls`; order not guaranteed.

    ``exclude_unsigned`` skips given sign-normalized wall vectors, which
    lets adjacency tests stop at the first unexpected wall.
    """
    v0i = as_int_vector(v0)
    _check_positive_pair(L, v0i, v1)
    v0p = primitive_part(v0i)
    V1 = primitive_integral(v1)
    N = square(L, v0p)
    mu = pairing(L, v0p, V1)
    q1 = square(L, V1)
    gap = mu * mu - N * q1  # zero iff v0, v1 are proportional
    if gap <= 0:
        return
    gv1 = gram_apply(L, V1)
    rank = L.rank

    def keep(s):
        return sum(s[i] * gv1[i] for i in range(rank)) < 0

    for d in sorted(spec.squares):
        bound = Fraction(-d * gap, q1)
        tmax = floor_sqrt(bound)
        if Fraction(tmax * tmax) >= bound:
            tmax -= 1
        for w in _iter_walls_for_t(L, v0p, spec, d, range(1, tmax + 1), keep):
            if exclude_unsigned and sign_normalize(w.vector) in exclude_unsigned:
                continue
            yield w


def walls_near(L: Lattice, v, spec: WallSpec, max_pairing: int) -> list[Wall]:
    """Walls s with q(s,s) in spec and 1 <= q(s, v~) <= max_pairing, where
    v~ is the primitive integral rescaling of v.  Candidate universe for
    facet detection; completeness is relative to the pairing bound."""
    vi = primitive_integral(v)
    if square(L, vi) <= 0:
        raise NonPositiveVectorError(f"witness {tuple(v)} is not positive")
    if L.signature[0] != 1:
        raise SignatureError(f"wall search needs signature (1, m), lattice has {L.signature}")
    walls: list[Wall] = []
    for d in sorted(spec.squares):
        walls.extend(_iter_walls_for_t(L, vi, spec, d, range(1, max_pairing + 1), None))
    walls.sort(key=lambda w: w.sort_key)
    return walls


def has_other_separating_wall(L: Lattice, v0, v1, spec: WallSpec, excluded) -> bool:
    """True iff some wall outside ``excluded`` separates v0 from v1.

    Early-exits on the first hit; used by the exact facet criterion.
    """
    ex = frozenset(sign_normalize(x) for x in excluded)
    for _ in iter_separating_walls(L, v0, v1, spec, exclude_unsigned=ex):
        return True
    return False


def walls_containing(L: Lattice, v, spec: WallSpec, search_bound: int | None = None) -> list[Wall]:
    """All walls through v (q(s, v) = 0), sign-normalized and sorted.

    For positive v the orthogonal complement is negative definite, so
    the enumeration is complete and ``search_bound`` is ignored.  For v
    on the boundary of the positive cone (q(v,v) = 0) completeness fails
    structurally; a box scan bounded by ``search_bound`` is performed
    and the limitation is the caller's to interpret.
    """
    vi = primitive_integral(v)
    qv = square(L, vi)
    if qv < 0:
        raise NonPositiveVectorError(f"{tuple(v)} is negative: not in the closed positive cone")
    found = set()
    if qv > 0:
        data = _base_data(L, vi)
        for d in sorted(spec.squares):
            for y in data.form.enumerate_exact(tuple(Fraction(0) for _ in data.c1), Fraction(-d)):
                s = _embed(data.basis, data.x0, 0, y)
                if content(s) != 1 or not _passes(L, s, spec):
                    continue
                found.add((d, sign_normalize(s)))
    else:
        if search_bound is None:
            raise ValidationError("boundary point: walls_containing needs an explicit search_bound")
        for d in sorted(spec.squares):
            for s in vectors_of_square(L, d, search_bound):
                if content(s) == 1 and pairing(L, s, vi) == 0 and _passes(L, s, spec):
                    found.add((d, sign_normalize(s)))
    return [Wall(vector=vec, square=d) for d, vec in sorted(found)]


def ensure_wall_free(L: Lattice, v, spec: WallSpec) -> None:
    """Raise WallIncidenceError when some spec wall passes through v."""
    from .errors import WallIncidenceError

    hits = walls_containing(L, v, spec)
    if hits:
        raise WallIncidenceError(
            f"base point {tuple(v)} lies on wall {hits[0].vector} (square {hits[0].square}); perturb and retry"
        )
