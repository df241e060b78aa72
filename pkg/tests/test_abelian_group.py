from math import prod

import pytest

from algebra.abelian_group import (
    GroupTable,
    abelian_groups_up_to,
    add,
    automorphism_count_formula,
    brute_force_group_automorphisms,
    classify_invariant_factors,
    compose_group_maps,
    cyclic_subgroup,
    element_order,
    enumerate_group_automorphisms,
    enumerate_subgroups,
    group_table,
    groups_of_order,
    identity_group_map,
    index_of,
    invariant_chains_of_order,
    invert_group_map,
    is_subgroup_mask,
    make_group,
    negate,
    parse_group,
    quotient,
    subgroup_generated,
    validate_group_automorphism,
)
from algebra.models import GroupSpec, Subgroup
from tests.conftest import SMALL_GROUPS
from utils.errors import ContractViolation, GroupParseError, InvariantViolation, ResourceBoundExceeded

AUT_ORDERS = {
    (2,): 1, (3,): 2, (4,): 2, (2, 2): 6, (5,): 4, (6,): 2, (7,): 6, (8,): 4,
    (2, 4): 8, (2, 2, 2): 168, (9,): 6, (3, 3): 48, (12,): 4, (2, 6): 12,
}

SUBGROUP_COUNTS = {
    (4,): 3, (2, 2): 5, (6,): 4, (2, 2, 2): 16, (8,): 4, (2, 4): 8, (9,): 3, (3, 3): 6, (2, 6): 10,
}

ARITHMETIC_GROUPS = SMALL_GROUPS + [(2, 6), (12,)]


def factor_lists(limit, smallest=2):
    """Every non-decreasing factor list with product <= limit, the empty one included."""
    lists = [[]]
    for n in range(smallest, limit + 1):
        lists.extend([n] + rest for rest in factor_lists(limit // n, n))
    return lists


def brute_force_subgroup_masks(g):
    tab = group_table(g)
    masks = []
    for mask in range(1, 1 << g.order, 2):
        elems = [i for i in range(g.order) if mask >> i & 1]
        if all(mask >> tab.add(a, b) & 1 for a in elems for b in elems):
            masks.append(mask)
    return masks


class TestNormalization:
    def test_factors_are_regrouped_into_the_invariant_chain(self):
        assert make_group([6, 4]).invariant_factors == (2, 12)
        assert make_group([3, 2]).invariant_factors == (6,)
        assert make_group([2, 2, 4]).invariant_factors == (2, 2, 4)

    def test_trivial_group(self):
        g = make_group([])
        assert g.invariant_factors == ()
        assert g.order == 1
        assert g.label() == "trivial"

    @pytest.mark.parametrize("factors", [[1], [0, 2], [-3]])
    def test_factors_below_two_are_rejected(self, factors):
        with pytest.raises(ContractViolation):
            make_group(factors)

    def test_spec_rejects_broken_chain(self):
        with pytest.raises(ValueError):
            GroupSpec(invariant_factors=(4, 2))

    @pytest.mark.parametrize(
        "text, expected",
        [("2,4", (2, 4)), (" 6, 4 ", (2, 12)), ("", ()), ("1", ()), ("12", (12,))],
    )
    def test_parse_group(self, text, expected):
        assert parse_group(text).invariant_factors == expected

    @pytest.mark.parametrize("text", ["a,b", "2,,4", "1,2", "2;4", "0"])
    def test_parse_group_rejects_malformed_literals(self, text):
        with pytest.raises(GroupParseError):
            parse_group(text)

    def test_label_and_literal(self):
        g = make_group([2, 4])
        assert g.label() == "C2 + C4"
        assert g.literal() == "2,4"
        assert g.rank == 2


class TestElements:
    def test_mixed_radix_index_is_least_significant_first(self):
        g = make_group([2, 4])
        assert index_of(g, (1, 2)) == 5
        assert index_of(g, (1, 3)) == 7
        assert add(g, 5, 7).index == 2
        assert add(g, (1, 2), (1, 3)).coords == (0, 1)

    def test_negation_and_order(self):
        g = make_group([2, 4])
        assert negate(g, (1, 1)).coords == (1, 3)
        assert element_order(g, (1, 2)) == 2
        assert element_order(g, (0, 1)) == 4
        assert element_order(g, 0) == 1

    def test_index_out_of_range(self):
        with pytest.raises(ContractViolation):
            add(make_group([4]), 4, 1)


class TestGroupTable:
    def test_direct_product_table(self):
        tab = GroupTable.from_factors([2, 4])
        assert tab.size == 8
        assert tab.add(5, 7) == 2
        assert tab.element_orders[2] == 4
        assert tab.neg[2] == 6

    @pytest.mark.parametrize(
        "table",
        [
            [[0, 1], [1, 1]],
            [[1, 0], [0, 1]],
            [[0, 1, 2], [1, 2, 0], [2, 1, 0]],
        ],
    )
    def test_invalid_tables_are_rejected(self, table):
        with pytest.raises(InvariantViolation):
            GroupTable(table)

    def test_classify_a_bare_table(self):
        assert classify_invariant_factors(GroupTable.from_factors([2, 3])) == [6]
        assert classify_invariant_factors(GroupTable.from_factors([4, 2, 2])) == [2, 2, 4]


class TestSubgroups:
    @pytest.mark.parametrize("factors, count", sorted(SUBGROUP_COUNTS.items()))
    def test_subgroup_counts(self, factors, count):
        assert len(enumerate_subgroups(make_group(factors))) == count

    def test_subgroups_are_sorted_and_closed(self):
        g = make_group([2, 4])
        subgroups = enumerate_subgroups(g)
        assert subgroups[0].member_mask == 1
        assert subgroups[-1].member_mask == 0xFF
        assert [s.order for s in subgroups] == sorted(s.order for s in subgroups)
        assert all(is_subgroup_mask(g, s.member_mask) for s in subgroups)

    def test_generated_subgroups(self):
        g = make_group([2, 4])
        assert cyclic_subgroup(g, (0, 1)).members() == (0, 2, 4, 6)
        assert subgroup_generated(g, [(1, 0), (0, 2)]).order == 4
        assert cyclic_subgroup(g, 0).member_mask == 1

    def test_non_subgroup_masks(self):
        g = make_group([4])
        assert not is_subgroup_mask(g, 0b0011)
        assert not is_subgroup_mask(g, 0b0100)
        assert is_subgroup_mask(g, 0b0101)

    def test_enumeration_bound(self):
        with pytest.raises(ResourceBoundExceeded) as info:
            enumerate_subgroups(make_group([16]), limit=12)
        assert info.value.stats["observed"] == 16

    @pytest.mark.parametrize(
        "factors, generator, expected",
        [((2, 4), (0, 2), [2, 2]), ((8,), 4, [4]), ((2, 4), (1, 0), [4]), ((3, 3), (1, 0), [3]), ((12,), 6, [6])],
    )
    def test_quotients_are_classified(self, factors, generator, expected):
        g = make_group(factors)
        q = quotient(g, cyclic_subgroup(g, generator))
        assert q.coset_of[0] == 0
        assert q.order * q.modulus.order == g.order
        assert classify_invariant_factors(q) == expected

    def test_quotient_by_everything_is_trivial(self):
        g = make_group([6])
        q = quotient(g, Subgroup(member_mask=0b111111))
        assert q.order == 1
        assert classify_invariant_factors(q) == []


class TestGroupAutomorphisms:
    @pytest.mark.parametrize("factors, count", sorted(AUT_ORDERS.items()))
    def test_automorphism_counts(self, factors, count):
        g = make_group(factors)
        assert len(enumerate_group_automorphisms(g)) == count
        assert automorphism_count_formula(g) == count

    @pytest.mark.parametrize("factors", [(2,), (4,), (2, 2), (6,), (2, 4), (2, 2, 2), (3, 3)])
    def test_brute_force_oracle_agrees(self, factors):
        g = make_group(factors)
        fast = {h.image for h in enumerate_group_automorphisms(g)}
        assert fast == {h.image for h in brute_force_group_automorphisms(g)}

    def test_every_enumerated_map_validates(self):
        g = make_group([2, 4])
        tab = group_table(g)
        assert all(validate_group_automorphism(tab, h.image) for h in enumerate_group_automorphisms(g))

    def test_validator_rejects_non_homomorphisms(self):
        tab = group_table(make_group([4]))
        assert validate_group_automorphism(tab, (0, 3, 2, 1))
        assert not validate_group_automorphism(tab, (0, 2, 1, 3))
        assert not validate_group_automorphism(tab, (1, 0, 2, 3))
        assert not validate_group_automorphism(tab, (0, 1, 1, 3))

    def test_compose_and_invert(self):
        autos = enumerate_group_automorphisms(make_group([2, 4]))
        identity = identity_group_map(8)
        for h in autos:
            assert compose_group_maps(h, invert_group_map(h)) == identity
            assert compose_group_maps(identity, h) == h

    def test_trivial_group_has_one_automorphism(self):
        assert [h.image for h in enumerate_group_automorphisms(make_group([]))] == [(0,)]
        assert automorphism_count_formula(make_group([])) == 1


class TestClassification:
    def test_groups_of_order(self):
        assert [g.invariant_factors for g in groups_of_order(8)] == [(2, 2, 2), (2, 4), (8,)]
        assert [g.invariant_factors for g in groups_of_order(12)] == [(2, 6), (12,)]
        assert [g.invariant_factors for g in groups_of_order(1)] == [()]

    def test_up_to_nine(self):
        factors = [g.invariant_factors for g in abelian_groups_up_to(9)]
        assert factors == [
            (), (2,), (3,), (2, 2), (4,), (5,), (6,), (7,), (2, 2, 2), (2, 4), (8,), (3, 3), (9,),
        ]

    @pytest.mark.parametrize("n", range(1, 17))
    def test_agrees_with_direct_chain_enumeration(self, n):
        assert [g.invariant_factors for g in groups_of_order(n)] == invariant_chains_of_order(n)

    def test_order_must_be_positive(self):
        with pytest.raises(ContractViolation):
            groups_of_order(0)


class TestExhaustiveInvariants:
    @pytest.mark.parametrize("factors", [tuple(f) for f in factor_lists(16) if f])
    def test_every_factor_list_is_classified_canonically(self, factors):
        g = make_group(factors)
        assert g.order == prod(factors)
        assert classify_invariant_factors(g) == list(g.invariant_factors)
        assert classify_invariant_factors(GroupTable.from_factors(list(factors))) == list(g.invariant_factors)

    @pytest.mark.parametrize("factors", ARITHMETIC_GROUPS)
    def test_group_laws(self, factors):
        g = make_group(factors)
        for a in range(g.order):
            assert add(g, a, 0).index == a
            assert add(g, a, negate(g, a)).index == 0
            assert g.order % element_order(g, a) == 0
            for b in range(g.order):
                ab = add(g, a, b)
                assert ab == add(g, b, a)
                for c in range(g.order):
                    assert add(g, ab, c) == add(g, a, add(g, b, c))

    @pytest.mark.parametrize("factors", [f for f in SMALL_GROUPS if prod(f) <= 8])
    def test_subgroups_agree_with_brute_force(self, factors):
        g = make_group(factors)
        found = [s.member_mask for s in enumerate_subgroups(g)]
        expected = brute_force_subgroup_masks(g)
        assert len(found) == len(expected)
        assert sorted(found) == expected

    @pytest.mark.parametrize("factors", [(4,), (2, 4), (2, 2, 2), (3, 3), (2, 6)])
    def test_automorphisms_are_closed_under_composition(self, factors):
        autos = enumerate_group_automorphisms(make_group(factors))
        images = {h.image for h in autos}
        for h1 in autos:
            for h2 in autos:
                assert compose_group_maps(h1, h2).image in images
