import random
from fractions import Fraction

import pytest

from mbmlat import core
from mbmlat.core import (
    HyperplaneRestriction,
    direct_sum,
    homology_image,
    is_positive,
    make_lattice,
    orthogonal_project,
    pairing,
    reflect_vector,
    restrict_to_hyperplane,
    sign_normalize,
    square,
)
from mbmlat.errors import (
    DegenerateLatticeError,
    IsotropicVectorError,
    NonPositiveVectorError,
    RankMismatchError,
    SignatureError,
    ValidationError,
)


class TestMakeLattice:
    def test_hyperbolic_plane(self, U):
        assert U.signature == (1, 1)
        assert U.discriminant == 1

    def test_rank_one_negative(self):
        L = make_lattice([[-2]])
        assert L.signature == (0, 1)
        assert L.discriminant == 2

    def test_k3_lattice(self, K3):
        # U^3 + E8(-1)^2: block determinants (-1)^3 * 1^2
        assert K3.rank == 22
        assert K3.signature == (3, 19)
        assert K3.discriminant == 1

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError, match="not square"):
            make_lattice([[0, 1], [1]])

    def test_rejects_asymmetric_naming_entry(self):
        with pytest.raises(ValidationError, match=r"\(0,1\)"):
            make_lattice([[0, 2], [1, 0]])

    def test_rejects_non_integer_entry(self):
        with pytest.raises(ValidationError, match=r"\(0,0\)"):
            make_lattice([[0.5]])

    def test_degenerate_accepted(self):
        L = make_lattice([[0, 0], [0, -2]])
        assert L.discriminant == 0
        assert L.kernel_dimension == 1

    def test_signature_additivity_random_blocks(self):
        rng = random.Random(2)
        blocks = [[[2]], [[-2]], core.U_GRAM, [[-4]], core.E8_MINUS_GRAM]
        for _ in range(10):
            picks = rng.sample(blocks, k=rng.randint(2, 4))
            total = make_lattice(direct_sum(*picks))
            p = sum(make_lattice(b).signature[0] for b in picks)
            m = sum(make_lattice(b).signature[1] for b in picks)
            assert total.signature == (p, m)


class TestPairing:
    def test_gram_entry(self, U):
        assert pairing(U, (1, 0), (0, 1)) == 1

    def test_diagonal_example(self, UA):
        assert pairing(UA, (1, 1, 0), (1, 1, 0)) == 2

    def test_mixed_example(self, UA):
        assert pairing(UA, (0, 1, 1), (3, 2, 2)) == -1

    def test_symmetry_random(self, UA, K3):
        rng = random.Random(5)
        for L in (UA, K3):
            for _ in range(25):
                v = tuple(rng.randint(-9, 9) for _ in range(L.rank))
                w = tuple(rng.randint(-9, 9) for _ in range(L.rank))
                assert pairing(L, v, w) == pairing(L, w, v)

    def test_rational_inputs(self, UA):
        v = (Fraction(1, 2), Fraction(1, 3), 0)
        assert pairing(UA, v, v) == Fraction(1, 3)

    def test_rank_mismatch(self, U):
        with pytest.raises(RankMismatchError):
            pairing(U, (1, 0, 0), (0, 1))


class TestHomologyImage:
    def test_unimodular_image_integral(self, U):
        # Gram-inverse dual convention: on a unimodular lattice the image
        # of any integral class is integral (here (1,0) -> (0,1))
        assert homology_image(U, (1, 0)) == (0, 1)

    def test_rank_one(self):
        L = make_lattice([[-2]])
        assert homology_image(L, (1,)) == (Fraction(-1, 2),)

    def test_disc_integrality_contract(self, K3):
        # delta * image is integral for every integral class
        L = make_lattice(direct_sum([list(r) for r in K3.gram], [[-2]]), "K3n2")
        rng = random.Random(9)
        for _ in range(100):
            v = tuple(rng.randint(-5, 5) for _ in range(L.rank))
            img = homology_image(L, v)
            assert all((L.discriminant * x).denominator == 1 for x in img)

    def test_disc_squared_square_integral(self):
        # the extended form on the dual side has delta^2 q(s,s) integral
        L = make_lattice(direct_sum(core.U_GRAM, [[-4]]))
        rng = random.Random(10)
        for _ in range(50):
            v = tuple(rng.randint(-6, 6) for _ in range(L.rank))
            img = homology_image(L, v)
            val = pairing(L, img, img)
            assert (L.discriminant**2 * val).denominator == 1

    def test_degenerate_rejected(self):
        L = make_lattice([[0]])
        with pytest.raises(DegenerateLatticeError):
            homology_image(L, (1,))


class TestOrthogonalProject:
    def test_bound_attaining_instance(self, UAA):
        res = orthogonal_project(UAA, (0, 0, 1, 0), (0, 0, 0, 1))
        assert res.coefficient == 0
        assert res.tilde_y == (0, 0, 0, 1)
        assert res.unscaled == (0, 0, 0, -2)
        assert square(UAA, res.unscaled) == -8

    def test_self_projection(self, UA):
        res = orthogonal_project(UA, (0, 0, 1), (0, 0, 1))
        assert all(x == 0 for x in res.tilde_y)

    def test_positive_projected_square(self, UA):
        res = orthogonal_project(UA, (0, 0, 1), (3, 1, 2))
        assert res.coefficient == 2
        assert res.tilde_y == (3, 1, 0)
        assert pairing(UA, res.tilde_y, res.tilde_y) == 6

    def test_reconstruction_and_orthogonality(self, UAA):
        rng = random.Random(3)
        for _ in range(40):
            x = tuple(rng.randint(-4, 4) for _ in range(4))
            y = tuple(rng.randint(-4, 4) for _ in range(4))
            if square(UAA, x) == 0:
                continue
            res = orthogonal_project(UAA, x, y)
            assert pairing(UAA, x, res.tilde_y) == 0
            rebuilt = tuple(res.coefficient * x[i] + res.tilde_y[i] for i in range(4))
            assert rebuilt == tuple(Fraction(c) for c in y)

    def test_isotropic_rejected(self, U):
        with pytest.raises(IsotropicVectorError):
            orthogonal_project(U, (1, 0), (0, 1))


class TestRestrictToHyperplane:
    def test_isotropic_orthogonal_in_u(self, U):
        res = restrict_to_hyperplane(U, (1, 0))
        assert res.sublattice.rank == 1
        assert res.sublattice.gram == ((0,),)

    def test_wall_orthogonal_is_u(self, UA):
        res = restrict_to_hyperplane(UA, (0, 0, 1))
        assert res.sublattice.signature == (1, 1)
        assert res.sublattice.discriminant == 1

    def test_negative_class_orthogonal_is_hyperbolic(self, UA):
        # q((0,1,1)) = -2, so the orthogonal has signature (1,1)
        res = restrict_to_hyperplane(UA, (0, 1, 1))
        assert res.sublattice.signature == (1, 1)

    def test_isotropic_class_gives_degenerate_restriction(self, UA):
        # feeds the degenerate-kernel algorithm
        res = restrict_to_hyperplane(UA, (1, 0, 0))
        assert res.sublattice.signature == (0, 1)
        assert res.sublattice.kernel_dimension == 1

    def test_embedding_pairs_to_zero_and_pulls_back_gram(self, UAA):
        rng = random.Random(4)
        for _ in range(20):
            x = tuple(rng.randint(-3, 3) for _ in range(4))
            if all(c == 0 for c in x):
                continue
            res = restrict_to_hyperplane(UAA, x)
            for b in res.basis:
                assert pairing(UAA, b, x) == 0
            k = len(res.basis)
            for i in range(k):
                for j in range(k):
                    assert res.sublattice.gram[i][j] == pairing(UAA, res.basis[i], res.basis[j])

    def test_embed_roundtrip(self, UA):
        res = restrict_to_hyperplane(UA, (0, 0, 1))
        assert isinstance(res, HyperplaneRestriction)
        y = (2, -3)
        v = res.embed(y)
        assert pairing(UA, v, (0, 0, 1)) == 0


class TestIsPositive:
    def test_reference_itself(self, UA):
        assert is_positive(UA, (1, 1, 0), (1, 1, 0))

    def test_antipode(self, UA):
        assert not is_positive(UA, (-1, -1, 0), (1, 1, 0))

    def test_negative_vector(self, UA):
        assert not is_positive(UA, (1, -1, 0), (1, 1, 0))

    def test_convexity(self, UA):
        rng = random.Random(6)
        ref = (1, 1, 0)
        found = 0
        while found < 30:
            v = tuple(rng.randint(-5, 5) for _ in range(3))
            w = tuple(rng.randint(-5, 5) for _ in range(3))
            try:
                if is_positive(UA, v, ref) and is_positive(UA, w, ref):
                    found += 1
                    assert is_positive(UA, tuple(a + b for a, b in zip(v, w)), ref)
            except NonPositiveVectorError:
                continue

    def test_wrong_signature(self, K3):
        with pytest.raises(SignatureError):
            is_positive(K3, (1,) * 22, (1,) * 22)

    def test_bad_reference(self, UA):
        with pytest.raises(NonPositiveVectorError):
            is_positive(UA, (1, 1, 0), (1, -1, 0))


class TestVectorHelpers:
    def test_sign_normalize(self):
        assert sign_normalize((0, -2, -4)) == (0, 1, 2)
        assert sign_normalize((0, 0, 0)) == (0, 0, 0)

    def test_reflect_vector(self, UA):
        assert reflect_vector(UA, (3, 2, 2), (0, 1, 1)) == (3, 1, 1)

    def test_vector_json_roundtrip(self):
        v = (1, Fraction(-3, 2), 0)
        data = core.vector_to_json(v)
        assert data == [1, "-3/2", 0]
        assert core.vector_from_json(data) == (1, Fraction(-3, 2), 0)
