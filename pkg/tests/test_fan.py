import pytest
from hypothesis import given, settings, strategies as st

import catalog
from conftest import catalog_fans
from errors import FanMismatchError, FanValidationError
from fan import Fan, PrimitiveRelation


class TestValidation:
    def test_projective_plane_passes(self, p2):
        report = p2.validate()
        assert report.passed
        assert [c.name for c in report.checks] == [
            'structure', 'primitive', 'smooth', 'face-intersection', 'complete'
        ]

    def test_missing_cone_fails_completeness(self, two_cone_p2):
        report = two_cone_p2.validate()
        assert not report.passed
        assert report.smooth
        assert not report.check('complete').passed
        with pytest.raises(FanValidationError, match='complete'):
            two_cone_p2.require_valid()

    def test_non_primitive_ray_reported(self):
        fan = Fan(2, ((2, 0), (0, 1), (-2, -1)), ((0, 1), (0, 2), (1, 2)))
        check = fan.validate().check('primitive')
        assert not check.passed
        assert any('ray 0' in problem for problem in check.problems)
        assert not any('ray 2' in problem for problem in check.problems)

    def test_overlapping_cones_fail_face_intersection(self):
        # (1,1) lies inside the cone spanned by (1,0) and (0,1)
        fan = Fan(2, ((1, 0), (0, 1), (1, 1), (-1, -1)), ((0, 1), (0, 2), (1, 3), (0, 3)))
        report = fan.validate()
        assert report.check('smooth').passed
        check = report.check('face-intersection')
        assert not check.passed
        assert any('0 and 1' in problem for problem in check.problems)

    def test_structure_problems(self):
        fan = Fan(2, ((1, 0), (0, 1, 0)), ((0, 1),))
        check = fan.validate().check('structure')
        assert not check.passed
        assert fan.validate().check('smooth') is None

    @pytest.mark.parametrize('fan', catalog_fans(), ids=str)
    def test_catalog_fans_valid(self, fan):
        assert fan.validate().passed
        assert fan.picard_number == fan.n_rays - fan.rank


class TestDivisors:
    def test_canonical_divisor(self, p1, p2, hirzebruch):
        assert p2.canonical_divisor().coeffs == (1, 1, 1)
        assert p1.canonical_divisor().coeffs == (1, 1)
        assert hirzebruch.total.canonical_divisor().coeffs == (1, 1, 1, 1)

    def test_arithmetic(self, p2):
        a, b = p2.divisor((1, 2, 3)), p2.divisor((0, -1, 1))
        assert (a + b).coeffs == (1, 1, 4)
        assert (a - b).coeffs == (1, 3, 2)
        assert (-a).coeffs == (-1, -2, -3)
        assert (2 * a).coeffs == (2, 4, 6)
        assert (a - a).is_zero

    def test_wrong_length_rejected(self, p2):
        with pytest.raises(ValueError):
            p2.divisor((1, 2))

    def test_mixing_fans_rejected(self, p1, p2):
        with pytest.raises(FanMismatchError):
            p1.divisor((1, 0)) + p2.divisor((1, 0, 0))


class TestPicBasis:
    def test_projective_plane(self, p2):
        pic = p2.pic_basis(0)
        assert pic.basis_rays == (0, 1)
        assert pic.free_rays == (2,)
        assert pic.relation_matrix == ((1,), (1,))

    def test_p1xp1(self, p1xp1):
        pic = p1xp1.total.pic_basis(0)
        assert [p1xp1.total.rays[j] for j in pic.free_rays] == [(-1, 0), (0, -1)]
        assert pic.relation_matrix == ((1, 0), (0, 1))

    def test_hirzebruch(self):
        for a in range(4):
            total = catalog.hirzebruch(a).total
            pic = total.pic_basis(0)
            assert pic.basis_rays == (0, 2)
            assert pic.free_rays == (1, 3)
            assert pic.relation_matrix == ((1, -a), (0, 1))

    def test_substitution_preserves_class(self, hirzebruch):
        total = hirzebruch.total
        pic = total.pic_basis()
        d = total.divisor((3, -1, 2, 5))
        substituted = pic.substitute(d)
        assert all(substituted.coeffs[i] == 0 for i in pic.basis_rays)
        assert total.same_class(d, substituted)


class TestCanonicalRepresentation:
    def test_examples(self, p1, p2):
        assert p2.canonical_representation(p2.divisor((1, 1, 1))).coeffs == (0, 0, 3)
        assert p2.canonical_representation(p2.divisor((0, 0, -4))).coeffs == (0, 0, -4)
        for k in range(-3, 4):
            assert p1.canonical_representation(p1.divisor((k, 0))).coeffs == (0, k)

    def test_idempotent(self, hirzebruch):
        total = hirzebruch.total
        d = total.canonical_representation(total.divisor((2, -3, 1, 4)))
        assert total.canonical_representation(d) == d

    def test_free_coordinates_round_trip(self, p1xp2):
        total = p1xp2.total
        d = total.divisor((1, 2, -1, 0, 3))
        coords = total.free_coordinates(d)
        assert total.same_class(total.from_free_coordinates(coords), d)

    def test_same_class_independent_of_base_cone(self, hirzebruch):
        total = hirzebruch.total
        d = total.divisor((1, 0, -2, 3))
        moved = d + total.principal_divisor((4, -1))
        for cone in range(len(total.max_cones)):
            pic = total.pic_basis(cone)
            assert total.canonical_representation(d, pic) == total.canonical_representation(moved, pic)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(catalog_fans()),
    st.lists(st.integers(-5, 5), min_size=5, max_size=5),
    st.lists(st.integers(-5, 5), min_size=3, max_size=3),
)
def test_canonical_representation_constant_on_classes(fan, coeffs, m):
    d = fan.divisor(coeffs[:fan.n_rays] + [0] * (fan.n_rays - len(coeffs)))
    moved = d + fan.principal_divisor(m[:fan.rank])
    assert fan.canonical_representation(moved) == fan.canonical_representation(d)
    assert fan.same_class(d, moved)


class TestPrimitiveCollections:
    @pytest.mark.parametrize('n', [1, 2, 3, 4])
    def test_projective_space(self, n):
        relations = catalog.projective_space(n).primitive_collections()
        assert relations == [PrimitiveRelation(tuple(range(n + 1)), (), ())]
        assert str(relations[0]).endswith('= 0')

    def test_p1xp1(self, p1xp1):
        relations = p1xp1.total.primitive_collections()
        assert [r.collection for r in relations] == [(0, 1), (2, 3)]
        assert all(r.support_cone_rays == () for r in relations)

    def test_hirzebruch(self):
        relations = catalog.hirzebruch(2).total.primitive_collections()
        assert relations == [
            PrimitiveRelation((0, 1), (), ()),
            PrimitiveRelation((2, 3), (0,), (2,)),
        ]

    @pytest.mark.parametrize('fan', catalog_fans(), ids=str)
    def test_minimal_non_faces(self, fan):
        for relation in fan.primitive_collections():
            members = frozenset(relation.collection)
            assert not fan.is_cone(members)
            assert all(fan.is_cone(members - {x}) for x in members)
            assert all(a > 0 for a in relation.coefficients)
            total = [sum(fan.rays[i][k] for i in relation.collection) for k in range(fan.rank)]
            expressed = [
                sum(a * fan.rays[i][k] for i, a in zip(relation.support_cone_rays, relation.coefficients))
                for k in range(fan.rank)
            ]
            assert total == expressed


class TestCounts:
    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_projective_euler(self, n):
        assert catalog.projective_space(n).euler_characteristic() == n + 1

    def test_poincare_examples(self, p1, p2):
        assert p2.cone_counts() == (1, 3, 3)
        assert p2.poincare_polynomial() == (1, 0, 1, 0, 1)
        assert p1.poincare_polynomial() == (1, 0, 1)

    def test_hirzebruch_counts(self, hirzebruch):
        assert hirzebruch.total.euler_characteristic() == 4
        assert hirzebruch.total.poincare_polynomial() == (1, 0, 2, 0, 1)

    @pytest.mark.parametrize('fan', catalog_fans(), ids=str)
    def test_poincare_at_minus_one(self, fan):
        coefficients = fan.poincare_polynomial()
        assert sum(c * (-1) ** i for i, c in enumerate(coefficients)) == fan.euler_characteristic()
        assert all(c == 0 for c in coefficients[1::2])


def test_fingerprint_ignores_name(p2):
    renamed = Fan(p2.rank, p2.rays, p2.max_cones, 'another name')
    assert renamed == p2
    assert renamed.fingerprint() == p2.fingerprint()
    assert catalog.projective_space(3).fingerprint() != p2.fingerprint()
