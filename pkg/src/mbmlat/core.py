"""Exact linear algebra over a fixed integral quadratic lattice.

A lattice is a free Z-module with a symmetric integer Gram matrix.  All
arithmetic is exact: integers stay integers, everything else is a
``fractions.Fraction``.  No floating point is used anywhere -- chamber
membership and wall incidence are sign decisions and rounding would
corrupt them.

Conventions:

* vectors are tuples of ``int`` (lattice vectors) or ``Fraction``
  (rational witness points); a matrix is a tuple of row tuples,
  acting on column vectors;
* the signature ``(p, m)`` counts positive/negative diagonal entries of
  an exact congruence diagonalization; ``rank - p - m`` is the kernel
  dimension;
* the discriminant is ``abs(det(gram))``, 0 for degenerate lattices;
* "primitive" means the gcd of the coordinates is 1; sign-normalized
  means additionally that the first nonzero coordinate is positive.

All types are immutable values and all operations are pure functions, so
everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

from .errors import (
    DegenerateLatticeError,
    IsotropicVectorError,
    NonPositiveVectorError,
    RankMismatchError,
    SignatureError,
    ValidationError,
)

Vector = tuple  # tuple[int, ...] or tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# vector helpers


def content(v: Sequence[int]) -> int:
    """gcd of the coordinates (0 for the zero vector)."""
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g


def primitive_part(v: Sequence[int]) -> Vector:
    """Divide by the content, keeping the direction.  Zero stays zero."""
    g = content(v)
    if g <= 1:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def sign_normalize(v: Sequence[int]) -> Vector:
    """Primitive part with the first nonzero coordinate made positive.

    This is the canonical form for classes defined up to a scalar.
    """
    w = primitive_part(v)
    for x in w:
        if x != 0:
            return w if x > 0 else tuple(-y for y in w)
    return w


def vec_add(v: Sequence, w: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(v, w))


def vec_sub(v: Sequence, w: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(v, w))


def vec_scale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def vec_is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def vec_is_integral(v: Sequence) -> bool:
    return all(isinstance(a, int) or (isinstance(a, Fraction) and a.denominator == 1) for a in v)


def as_int_vector(v: Sequence) -> Vector:
    """Cast an integral vector (possibly of Fractions) to a tuple of ints."""
    out = []
    for a in v:
        if isinstance(a, Fraction):
            if a.denominator != 1:
                raise ValidationError(f"vector {tuple(v)} is not integral")
            out.append(int(a))
        else:
            out.append(int(a))
    return tuple(out)


def integralize(v: Sequence) -> Vector:
    """Scale a rational vector by the lcm of denominators; keep direction."""
    mult = 1
    for a in v:
        if isinstance(a, Fraction):
            d = a.denominator
            mult = mult * d // gcd(mult, d)
    return tuple(int(a * mult) for a in v)


def primitive_integral(v: Sequence) -> Vector:
    """Primitive integer vector on the same ray (positive rescaling)."""
    return primitive_part(integralize(v))


def vector_to_json(v: Sequence) -> list:
    """Interchange form: ints stay ints, proper fractions become "p/q"."""
    out = []
    for a in v:
        if isinstance(a, Fraction) and a.denominator != 1:
            out.append(f"{a.numerator}/{a.denominator}")
        else:
            out.append(int(a))
    return out


def vector_from_json(data: Iterable) -> Vector:
    """Parse the interchange form; "p/q" strings become Fractions."""
    out = []
    for a in data:
        if isinstance(a, str):
            out.append(Fraction(a))
        elif isinstance(a, int):
            out.append(a)
        else:
            raise ValidationError(f"bad vector entry {a!r}: expected int or 'p/q' string")
    return tuple(out)


# ---------------------------------------------------------------------------
# exact matrix kernels


def _det_bareiss(gram: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(gram)
    if n == 0:
        return 1
    a = [[int(x) for x in row] for row in gram]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for j in range(k + 1, n):
                if a[j][k] != 0:
                    a[k], a[j] = a[j], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _signature_by_diagonalization(gram: Sequence[Sequence[int]]) -> tuple[int, int]:
    """Signature (p, m) via exact symmetric Gaussian elimination.

    Congruence transformations preserve the signature; eigenvalues are
    never needed.
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    p = m = 0
    for k in range(n):
        if a[k][k] == 0:
            pivot = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if pivot is not None:
                a[k], a[pivot] = a[pivot], a[k]
                for row in a:
                    row[k], row[pivot] = row[pivot], row[k]
            else:
                off = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if off is None:
                    continue  # zero row in the remaining block: kernel direction
                # make a nonzero diagonal entry: (e_k + e_off) has square 2*a[k][off]
                for j in range(n):
                    a[k][j] += a[off][j]
                for i in range(n):
                    a[i][k] += a[i][off]
        d = a[k][k]
        if d > 0:
            p += 1
        else:
            m += 1
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] / d
            for j in range(n):
                a[i][j] -= f * a[k][j]
            for j in range(n):
                a[j][i] -= f * a[j][k]
    return p, m


def solve_rational(matrix: Sequence[Sequence], rhs: Sequence) -> Vector:
    """Solve M x = b exactly over the rationals (M square, invertible)."""
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot is None:
            raise DegenerateLatticeError("singular matrix in exact solve")
        a[k], a[pivot] = a[pivot], a[k]
        d = a[k][k]
        for i in range(n):
            if i == k or a[i][k] == 0:
                continue
            f = a[i][k] / d
            for j in range(k, n + 1):
                a[i][j] -= f * a[k][j]
    return tuple(a[i][n] / a[i][i] for i in range(n))


def invert_rational(matrix: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse of a square rational matrix."""
    n = len(matrix)
    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(solve_rational(matrix, e))
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def mat_vec(matrix: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in matrix)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)) for i in range(n)
    )


def mat_transpose(a: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _column_reduce(row: Sequence[int]) -> tuple[int, list[list[int]]]:
    """Unimodular column reduction of a single integer row.

    Returns ``(g, cols)`` where ``cols`` is a list of n column vectors
    forming a unimodular matrix with ``row . cols = (g, 0, ..., 0)`` and
    ``g = gcd(row) >= 0``.  Hermite-normal-form style elimination; the
    columns beyond the first are an integral basis of the kernel of the
    row.
    """
    n = len(row)
    r = [int(x) for x in row]
    cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    while True:
        nz = [j for j in range(n) if r[j] != 0]
        if len(nz) <= 1:
            break
        piv = min(nz, key=lambda j: (abs(r[j]), j))
        for j in nz:
            if j == piv:
                continue
            qf = r[j] // r[piv]
            r[j] -= qf * r[piv]
            cols[j] = [cols[j][i] - qf * cols[piv][i] for i in range(n)]
    nz = [j for j in range(n) if r[j] != 0]
    if nz:
        j = nz[0]
        if j != 0:
            r[0], r[j] = r[j], r[0]
            cols[0], cols[j] = cols[j], cols[0]
        if r[0] < 0:
            r[0] = -r[0]
            cols[0] = [-x for x in cols[0]]
    return (r[0] if r[0] else 0), cols


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Integral basis of the joint kernel of the given integer rows."""
    basis = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    for row in rows:
        reduced = [sum(row[i] * b[i] for i in range(n)) for b in basis]
        g, cols = _column_reduce(reduced)
        new_basis = []
        for col in cols:
            new_basis.append(tuple(sum(col[j] * basis[j][i] for j in range(len(basis))) for i in range(n)))
        basis = new_basis[1:] if g != 0 else new_basis
        if not basis:
            break
    return basis


# ---------------------------------------------------------------------------
# the lattice type


@dataclass(frozen=True)
class Lattice:
    """An integral quadratic lattice: Gram matrix plus exact metadata.

    ``signature`` and ``discriminant`` are recomputed by :func:`make_lattice`;
    constructing instances through it is the supported path.
    """

    name: str
    gram: Matrix
    rank: int
    signature: tuple[int, int]
    discriminant: int

    @property
    def is_degenerate(self) -> bool:
        return self.discriminant == 0

    @property
    def kernel_dimension(self) -> int:
        return self.rank - self.signature[0] - self.signature[1]

    def gram_row(self, i: int) -> Vector:
        return self.gram[i]

    def to_dict(self) -> dict:
        return {"name": self.name, "gram": [list(row) for row in self.gram]}


def make_lattice(gram: Sequence[Sequence[int]], name: str = "") -> Lattice:
    """Validate a symmetric integer matrix and compute exact metadata.

    Degenerate Gram matrices are accepted (the degenerate Kneser
    algorithm needs them); operations that require non-degeneracy raise
    their own errors.
    """
    n = len(gram)
    for i, row in enumerate(gram):
        if len(row) != n:
            raise ValidationError(f"gram matrix is not square: row {i} has length {len(row)}, expected {n}")
        for j, x in enumerate(row):
            if not isinstance(x, int) or isinstance(x, bool):
                raise ValidationError(f"gram entry ({i},{j}) = {x!r} is not an integer")
    for i in range(n):
        for j in range(i + 1, n):
            if gram[i][j] != gram[j][i]:
                raise ValidationError(
                    f"gram matrix is not symmetric at entry ({i},{j}): {gram[i][j]} != {gram[j][i]}"
                )
    frozen = tuple(tuple(int(x) for x in row) for row in gram)
    p, m = _signature_by_diagonalization(frozen)
    disc = abs(_det_bareiss(frozen))
    return Lattice(name=name, gram=frozen, rank=n, signature=(p, m), discriminant=disc)


def lattice_from_dict(data: dict) -> Lattice:
    if not isinstance(data, dict) or "gram" not in data:
        raise ValidationError("lattice JSON must be an object with a 'gram' key")
    return make_lattice(data["gram"], name=str(data.get("name", "")))


def direct_sum(*grams: Sequence[Sequence[int]]) -> list[list[int]]:
    """Block-diagonal sum of Gram matrices."""
    total = sum(len(g) for g in grams)
    out = [[0] * total for _ in range(total)]
    off = 0
    for g in grams:
        k = len(g)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = int(g[i][j])
        off += k
    return out


U_GRAM = ((0, 1), (1, 0))

# E8 Cartan matrix (chain 1..7 with node 8 attached to node 5), negated below.
_E8_CARTAN = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, 0),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, -1),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, 0, 0, -1, 0, 0, 2),
)

E8_MINUS_GRAM = tuple(tuple(-x for x in row) for row in _E8_CARTAN)


def _require_rank(L: Lattice, v: Sequence) -> None:
    if len(v) != L.rank:
        raise RankMismatchError(f"vector of length {len(v)} does not match lattice rank {L.rank}")


# ---------------------------------------------------------------------------
# the form and its derived maps


def gram_apply(L: Lattice, v: Sequence) -> Vector:
    """The covector gram . v (functional coordinates of v)."""
    _require_rank(L, v)
    return tuple(sum(L.gram[i][j] * v[j] for j in range(L.rank)) for i in range(L.rank))


def pairing(L: Lattice, v: Sequence, w: Sequence):
    """q(v, w) = v^T . gram . w, exact; an int when both inputs are integral."""
    _require_rank(L, v)
    _require_rank(L, w)
    gw = gram_apply(L, w)
    return sum(v[i] * gw[i] for i in range(L.rank))


def square(L: Lattice, v: Sequence):
    return pairing(L, v, v)


def homology_image(L: Lattice, v: Sequence) -> Vector:
    """Rational cohomology coordinates of a dual (homology) class.

    ``v`` is read in the dual basis (functional coordinates); the image is
    ``gram^{-1} . v``.  The contract guaranteed by the construction is that
    ``discriminant * homology_image(v)`` is integral for every integral
    ``v``, since ``disc * gram^{-1}`` is the (sign-adjusted) adjugate.
    """
    _require_rank(L, v)
    if L.is_degenerate:
        raise DegenerateLatticeError("homology image requires a non-degenerate lattice")
    sol = solve_rational(L.gram, v)
    return tuple(Fraction(x) for x in sol)


@dataclass(frozen=True)
class ProjectionResult:
    """Orthogonal projection of y away from x.

    ``y = coefficient * x + tilde_y`` with ``q(x, tilde_y) = 0``;
    ``unscaled = q(x,x) * tilde_y`` is integral for integral inputs and
    ``primitive`` is its content-reduced part (direction preserved).
    """

    coefficient: Fraction
    tilde_y: Vector
    unscaled: Vector
    primitive: Vector


def orthogonal_project(L: Lattice, x: Sequence, y: Sequence) -> ProjectionResult:
    """Project y to the orthogonal complement of x (q(x,x) != 0 required)."""
    qxx = pairing(L, x, x)
    if qxx == 0:
        raise IsotropicVectorError(f"cannot project along isotropic vector {tuple(x)}")
    qxy = pairing(L, x, y)
    coeff = Fraction(qxy, qxx)
    tilde = tuple(Fraction(y[i]) - coeff * x[i] for i in range(L.rank))
    unscaled = tuple(qxx * t for t in tilde)
    unscaled_int = as_int_vector(unscaled) if vec_is_integral(unscaled) else unscaled
    prim = primitive_part(unscaled_int) if vec_is_integral(unscaled) else unscaled
    return ProjectionResult(coefficient=coeff, tilde_y=tilde, unscaled=unscaled_int, primitive=prim)


@dataclass(frozen=True)
class HyperplaneRestriction:
    """Integral orthogonal complement of x, with its embedding into L.

    ``basis`` holds the basis vectors in L-coordinates (the columns of the
    embedding matrix); ``sublattice.gram`` is the pulled-back form.
    """

    sublattice: Lattice
    basis: tuple[Vector, ...]

    @property
    def embedding_matrix(self) -> Matrix:
        n = len(self.basis[0]) if self.basis else 0
        return tuple(tuple(b[i] for b in self.basis) for i in range(n))

    def embed(self, y: Sequence) -> Vector:
        """Map sublattice coordinates to L-coordinates."""
        n = len(self.basis[0]) if self.basis else 0
        return tuple(sum(y[j] * self.basis[j][i] for j in range(len(self.basis))) for i in range(n))


def restrict_to_hyperplane(L: Lattice, x: Sequence) -> HyperplaneRestriction:
    """Integral basis of {v : q(v, x) = 0} and the induced Gram matrix.

    Uses exact column elimination over Z on the row gram.x, so the basis
    spans the full saturated sublattice.  If x lies in the kernel of the
    form the restriction is all of L.
    """
    _require_rank(L, x)
    xi = as_int_vector(x)
    if vec_is_zero(xi):
        raise ValidationError("cannot restrict to the hyperplane of the zero vector")
    row = gram_apply(L, xi)
    if vec_is_zero(row):
        basis = [tuple(1 if i == j else 0 for i in range(L.rank)) for j in range(L.rank)]
    else:
        _, cols = _column_reduce(row)
        basis = [tuple(c) for c in cols[1:]]
    induced = [[int(pairing(L, a, b)) for b in basis] for a in basis]
    sub = make_lattice(induced, name=f"{L.name}|{','.join(map(str, xi))}^perp" if L.name else "")
    return HyperplaneRestriction(sublattice=sub, basis=tuple(basis))


def is_positive(L: Lattice, v: Sequence, reference: Sequence) -> bool:
    """Membership in the positive-cone component of the reference point.

    Requires signature (1, m): the positive set then has exactly two
    convex components, distinguished by the sign of q(v, reference).
    """
    if L.signature[0] != 1:
        raise SignatureError(f"positive cone needs signature (1, m), lattice has {L.signature}")
    if pairing(L, reference, reference) <= 0:
        raise NonPositiveVectorError(f"reference point {tuple(reference)} is not positive")
    return pairing(L, v, v) > 0 and pairing(L, v, reference) > 0


def reflect_vector(L: Lattice, v: Sequence, s: Sequence) -> Vector:
    """r_s(v) = v - 2 (q(v,s)/q(s,s)) s, exact; integral when it happens to be."""
    qss = pairing(L, s, s)
    if qss == 0:
        raise IsotropicVectorError(f"cannot reflect in isotropic vector {tuple(s)}")
    c = 2 * Fraction(pairing(L, v, s), qss)
    out = tuple(v[i] - c * s[i] for i in range(L.rank))
    return as_int_vector(out) if vec_is_integral(out) else out


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for a non-negative rational, exact."""
    if x < 0:
        raise ValueError("floor_sqrt of a negative number")
    return isqrt(x.numerator // x.denominator) if isinstance(x, Fraction) else isqrt(int(x))
