import random
from fractions import Fraction

import pytest

from mbmlat import core
from mbmlat.chambers import (
    chamber_at,
    encode_flag,
    explore_tessellation,
    facet_walls,
    reduce_to_base,
    same_chamber,
)
from mbmlat.core import make_lattice, pairing, square
from mbmlat.enumeration import separating_walls, wall_spec, walls_containing
from mbmlat.errors import (
    FlagChainError,
    ReductionInvariantError,
    ValidationError,
    WallIncidenceError,
)
from mbmlat.orbits import reflection
from oracles import random_positive_pair

SPEC2 = wall_spec([-2])

# wall-free bases, verified by test_bases_are_wall_free below
BASE = {"U": (2, 1), "U+A1m2": (5, 3, 2), "U+A1m2+A1m2": (3, 4, 1, 1), "A1p2+A1m2": (2, 1)}


@pytest.fixture
def lattices(U, UA, UAA, P22):
    return {"U": U, "U+A1m2": UA, "U+A1m2+A1m2": UAA, "A1p2+A1m2": P22}


def test_bases_are_wall_free(lattices):
    for name, L in lattices.items():
        assert walls_containing(L, BASE[name], SPEC2) == [], name


class TestSameChamber:
    def test_identical(self, UA):
        assert same_chamber(UA, (1, 1, 0), (1, 1, 0), SPEC2)

    def test_same(self, UA):
        assert same_chamber(UA, (1, 1, 0), (2, 1, 0), SPEC2)

    def test_different(self, UA):
        assert not same_chamber(UA, (1, 1, 0), (3, 2, 2), SPEC2)


class TestReduceToBase:
    def test_already_in_chamber(self, UA):
        res = reduce_to_base(UA, (2, 1, 0), (1, 1, 0), SPEC2)
        assert res.word == ()
        assert res.image == (2, 1, 0)

    def test_single_reflection_involution(self, UA):
        base = BASE["U+A1m2"]
        v = core.reflect_vector(UA, base, (0, 1, 1))
        res = reduce_to_base(UA, v, base, SPEC2)
        assert [w.unsigned().vector for w in res.word] == [(0, 1, 1)]
        assert res.image == base

    def test_worked_example_two_steps(self, UA):
        # the separating set of ((1,1,0),(3,2,2)) is {(0,1,1),(1,0,1)},
        # so the greedy reduction takes two strictly decreasing steps
        res = reduce_to_base(UA, (3, 2, 2), (1, 1, 0), SPEC2)
        assert [w.vector for w in res.word] == [(0, 1, 1), (1, 0, 1)]
        assert res.image == (2, 1, 0)
        assert res.canonical_point == res.image
        assert same_chamber(UA, res.image, (1, 1, 0), SPEC2)

    def test_word_recovers_chamber(self, UA):
        base = BASE["U+A1m2"]
        rng = random.Random(41)
        for _ in range(15):
            v, _ = random_positive_pair(UA, rng)
            if walls_containing(UA, v, SPEC2):
                continue
            res = reduce_to_base(UA, v, base, SPEC2)
            # applying the word in reverse to the image recovers v
            back = res.image
            for w in reversed(res.word):
                back = core.reflect_vector(UA, back, w.vector)
            assert back == v

    def test_strict_decrease_sequence(self, UAA):
        base = BASE["U+A1m2+A1m2"]
        rng = random.Random(43)
        for _ in range(15):
            v, _ = random_positive_pair(UAA, rng)
            if walls_containing(UAA, v, SPEC2):
                continue
            counts = [len(separating_walls(UAA, base, v, SPEC2))]
            res = reduce_to_base(UAA, v, base, SPEC2)
            cur = v
            for w in res.word:
                cur = core.reflect_vector(UAA, cur, w.vector)
                counts.append(len(separating_walls(UAA, base, cur, SPEC2)))
            assert counts == sorted(counts, reverse=True)
            assert len(set(counts)) == len(counts)
            assert counts[-1] == 0


class TestReflectionProperties:
    def test_reflection_is_isometry_and_fixes_wall(self, UA):
        r = reflection(UA, (0, 1, 1))
        rng = random.Random(47)
        for _ in range(20):
            v = tuple(rng.randint(-5, 5) for _ in range(3))
            w = tuple(rng.randint(-5, 5) for _ in range(3))
            assert pairing(UA, r.apply(v), r.apply(w)) == pairing(UA, v, w)
        # fixes a basis of the orthogonal complement pointwise
        rest = core.restrict_to_hyperplane(UA, (0, 1, 1))
        for b in rest.basis:
            assert r.apply(b) == b
        assert r.apply((0, 1, 1)) == (0, -1, -1)


class TestFacetWalls:
    def test_base_chamber_facets(self, UA):
        ch = chamber_at(UA, BASE["U+A1m2"], spec=SPEC2)
        res = facet_walls(UA, ch, search_bound=24)
        assert res.complete
        got = [f.supporting_wall.vector for f in res.faces]
        assert got == [(-1, 0, -1), (0, 1, 1), (2, 0, 1)]
        for f in res.faces:
            m = f.witness_on_wall
            assert pairing(UA, f.supporting_wall.vector, m) == 0
            assert square(UA, m) > 0
            for g in res.faces:
                if g is not f:
                    assert pairing(UA, g.supporting_wall.vector, m) > 0

    def test_no_minus_two_classes_means_no_facets(self):
        # 2a^2 - 8b^2 = -2 has no integer solutions (a^2 = 4b^2 - 1 fails
        # mod 4), so the chamber is the whole positive cone
        L = make_lattice(core.direct_sum([[2]], [[-8]]))
        ch = chamber_at(L, (1, 0), spec=SPEC2)
        res = facet_walls(L, ch, search_bound=16)
        assert res.complete
        assert res.faces == ()

    def test_rank4_orthogonal_pair_facets(self, UAA):
        ch = chamber_at(UAA, BASE["U+A1m2+A1m2"], spec=SPEC2)
        res = facet_walls(UAA, ch, search_bound=20)
        walls = {f.supporting_wall.unsigned().vector for f in res.faces}
        assert (0, 0, 1, 0) in walls
        assert (0, 0, 0, 1) in walls

    def test_facet_criterion_matches_adjacency(self, UA):
        # crossing a facet lands in a chamber separated by that wall alone
        ch = chamber_at(UA, BASE["U+A1m2"], spec=SPEC2)
        for f in facet_walls(UA, ch, search_bound=24):
            mirror = core.reflect_vector(UA, ch.witness, f.supporting_wall.vector)
            sep = separating_walls(UA, ch.witness, mirror, SPEC2)
            assert [w.unsigned() for w in sep] == [f.supporting_wall.unsigned()]

    def test_wall_incidence_rejected(self, UA):
        with pytest.raises(WallIncidenceError):
            chamber_at(UA, (1, 1, 0), spec=SPEC2)


class TestChamber:
    def test_crossing_set_matches_separating(self, UA):
        base = BASE["U+A1m2"]
        witness = (9, 3, 4)
        ch = chamber_at(UA, witness, base, SPEC2)
        exp = separating_walls(UA, base, witness, SPEC2)
        assert list(ch.crossing_set) == sorted(exp, key=lambda w: w.sort_key)

    def test_key_equal_iff_same_chamber(self, UA):
        base = BASE["U+A1m2"]
        rng = random.Random(53)
        points = []
        while len(points) < 12:
            v, _ = random_positive_pair(UA, rng)
            if pairing(UA, v, base) < 0:
                v = tuple(-c for c in v)
            if pairing(UA, v, base) <= 0:
                continue
            if not walls_containing(UA, v, SPEC2):
                points.append(v)
        for v in points:
            for w in points:
                kv = chamber_at(UA, v, base, SPEC2).key
                kw = chamber_at(UA, w, base, SPEC2).key
                assert (kv == kw) == same_chamber(UA, v, w, SPEC2)


class TestEncodeFlag:
    def test_single_entry(self, UA):
        f = encode_flag(UA, [(0, 0, 1)], SPEC2)
        assert f.depth == 1
        e = f.entries[0]
        assert e.vector == (0, 0, 1)
        assert e.square == -2
        assert e.unscaled_square == -2

    def test_orthogonal_pair_attains_minus_eight(self, UAA):
        f = encode_flag(UAA, [(0, 0, 1, 0), (0, 0, 0, 1)], SPEC2)
        assert f.depth == 2
        second = f.entries[1]
        assert second.unscaled == (0, 0, 0, -2)
        assert second.unscaled_square == -8
        assert second.vector == (0, 0, 0, 1)
        assert second.square == -2
        assert second.orientation == -1

    def test_isotropic_projection_rejected(self, UA):
        with pytest.raises(FlagChainError):
            encode_flag(UA, [(0, 0, 1), (0, 1, 1)], SPEC2)

    def test_entries_mutually_orthogonal(self, UAA):
        f = encode_flag(UAA, [(0, 0, 1, 0), (1, -1, 0, 0), (0, 0, 0, 1)], SPEC2)
        vs = [e.vector for e in f.entries]
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                assert pairing(UAA, vs[i], vs[j]) == 0

    def test_non_spec_square_rejected(self, UA):
        with pytest.raises(ValidationError):
            encode_flag(UA, [(1, -2, 0)], SPEC2)  # square -4


class TestExploreTessellation:
    def test_depth_zero(self, UA):
        g = explore_tessellation(UA, BASE["U+A1m2"], SPEC2, 0)
        assert len(g.nodes) == 1
        assert g.edges == ()
        assert g.nodes[0].key == ()

    def test_depth_one_edge_count_equals_facets(self, UA):
        g = explore_tessellation(UA, BASE["U+A1m2"], SPEC2, 1)
        base_node = g.nodes[0]
        assert len(g.edges) == len(base_node.facets) == 3
        assert len(g.nodes) == 4

    def test_edges_cross_exactly_one_wall(self, UAA):
        g = explore_tessellation(UAA, BASE["U+A1m2+A1m2"], SPEC2, 2, search_bound=20)
        for e in g.edges:
            na, nb = g.node_by_key(e.a), g.node_by_key(e.b)
            sep = separating_walls(UAA, na.witness, nb.witness, SPEC2)
            assert [w.unsigned() for w in sep] == [e.wall]
            # keys of adjacent chambers differ by exactly that wall
            diff = set(na.key) ^ set(nb.key)
            assert len(diff) == 1
            ((d, vec),) = diff
            assert d == e.wall.square
            assert core.sign_normalize(vec) == e.wall.vector

    def test_base_on_wall_rejected(self, UA):
        with pytest.raises(WallIncidenceError):
            explore_tessellation(UA, (1, 1, 0), SPEC2, 1)

    def test_deterministic(self, UA):
        g1 = explore_tessellation(UA, BASE["U+A1m2"], SPEC2, 2)
        g2 = explore_tessellation(UA, BASE["U+A1m2"], SPEC2, 2)
        assert g1.to_dot() == g2.to_dot()
        assert g1.to_json_dict() == g2.to_json_dict()

    def test_dot_shape(self, UA):
        g = explore_tessellation(UA, BASE["U+A1m2"], SPEC2, 1)
        dot = g.to_dot()
        assert dot.startswith("graph tessellation {")
        assert dot.rstrip().endswith("}")
        assert dot.count("--") == len(g.edges)
