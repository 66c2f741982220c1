"""Tests for variable width, lanes and fluted orderings."""

import pytest

from sepfrag.lanes import (
    WidthExceeded,
    fluted_violation,
    herzig_violation,
    rename_to_k_variables,
    sfo_lanes,
    variable_width,
)
from sepfrag.parser import parse_formula
from sepfrag.semantics import equivalent_upto
from sepfrag.syntax import And, Atom, Exists, Forall, Var

CHAIN = "forall x. exists y. R(x, y) & (exists z. R(y, z))"


def rel(a, b):
    return Atom('R', (Var(a), Var(b)))


class TestVariableWidth:
    """Test variable_width and rename_to_k_variables."""

    def test_triangle(self):
        """Three variables sharing atoms pairwise need three names."""
        phi = parse_formula("exists x y z. R(x, y) & R(y, z) & R(x, z)")
        assert variable_width(phi) == 3

    def test_chain_reuses_names(self):
        """x is dead once z is bound."""
        assert variable_width(parse_formula(CHAIN)) == 2

    def test_rename_with_given_names(self):
        """Binders of one color share a name."""
        result = rename_to_k_variables(parse_formula(CHAIN), 2, ['a', 'b'])
        inner = And((rel('a', 'b'), Exists(('a',), rel('b', 'a'))))
        assert result == Forall(('a',), Exists(('b',), inner))

    def test_rename_default_names(self):
        """Default names are x1 .. xk and the meaning is kept."""
        phi = parse_formula(CHAIN)
        result = rename_to_k_variables(phi, 2)
        assert isinstance(result, Forall) and result.vars == ('x1',)
        assert variable_width(result) == 2
        assert equivalent_upto(phi, result, max_size=3).equivalent

    def test_too_narrow(self):
        """Asking for fewer names than the width fails."""
        with pytest.raises(WidthExceeded):
            rename_to_k_variables(parse_formula(CHAIN), 1)


class TestLanes:
    """Test lane assignments."""

    def test_unrelated_variables_get_own_lanes(self):
        """Variables that never share an atom fall into separate lanes."""
        lanes = sfo_lanes(parse_formula("exists x y. P(x) & Q(y)"))
        assert lanes.lane_count == 2
        assert lanes.widths() == [1, 1]

    def test_shared_atom_shares_lane(self):
        """Co-occurring variables form one lane."""
        lanes = sfo_lanes(parse_formula("exists x y. R(x, y)"))
        assert lanes.widths() == [2]


class TestOrderings:
    """Test the fluted and ordered disciplines."""

    def test_fluted(self):
        """Atoms must read a suffix of the binders in order."""
        assert fluted_violation(parse_formula("forall x. exists y. R(x, y)")) is None
        rule, _ = fluted_violation(parse_formula("forall x. exists y. R(y, x)"))
        assert rule == 'fluted-suffix'

    def test_fluted_rejects_equality(self):
        """Equality atoms are not fluted."""
        rule, _ = fluted_violation(parse_formula("forall x. exists y. x = y"))
        assert rule == 'equality'

    def test_herzig(self):
        """Each argument's binder sits exactly under the earlier arguments' binders."""
        assert herzig_violation(parse_formula("forall x. exists y. R(x, y)")) is None
        rule, _ = herzig_violation(parse_formula("forall x. exists y. R(y, x)"))
        assert rule == 'ordered-scope'
