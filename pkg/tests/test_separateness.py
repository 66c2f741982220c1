"""Tests for separateness checks and prefix bookkeeping."""

from math import inf

import pytest

from sepfrag.parser import parse_formula
from sepfrag.separateness import (
    DisjointSets,
    NoGuardAnnotation,
    NotPrenex,
    OverlappingSets,
    VariablePartition,
    block_segments,
    co_occurrence_components,
    guard_separated,
    index_map,
    phi_prefix,
    separated,
    strictly_separated,
    terminal_prefix,
    var_index,
)
from sepfrag.syntax import EXISTS, FORALL


class TestSeparated:
    """Test plain, strict and guard separateness."""

    def test_separated_sets(self):
        """Sets that never share an atom are separated."""
        phi = parse_formula("forall x y z. P(x) & R(y, z)")
        assert separated(phi, {'x'}, {'y', 'z'})

    def test_shared_atom_breaks_separateness(self):
        """R(y, z) joins y and z."""
        phi = parse_formula("forall x y z. P(x) & R(y, z)")
        assert not separated(phi, {'y'}, {'z'})

    def test_overlapping_sets_rejected(self):
        """The two sets must be disjoint."""
        phi = parse_formula("forall x. P(x)")
        with pytest.raises(OverlappingSets):
            separated(phi, {'x'}, {'x'})

    def test_strict_needs_separate_scopes(self):
        """A quantified subformula mentioning both sets breaks strictness."""
        nested = parse_formula("forall x. exists y. P(x) & Q(y)")
        assert separated(nested, {'x'}, {'y'})
        assert not strictly_separated(nested, {'x'}, {'y'})

        split = parse_formula("(forall x. P(x)) & exists y. Q(y)")
        assert strictly_separated(split, {'x'}, {'y'})

    def test_guard_separated_needs_annotation(self):
        """Without guards there is nothing to check against."""
        phi = parse_formula("forall x. P(x)")
        with pytest.raises(NoGuardAnnotation):
            guard_separated(phi, {'x'}, set(), None)


class TestPrefixBookkeeping:
    """Test segments, indices and phi-prefixes."""

    PHI = "exists u. forall x. exists y. forall z. R(x, y) & P(u) & Q(z)"

    def test_block_segments(self):
        """A leading existential block is segment 1 with no universals."""
        phi = parse_formula(self.PHI)
        assert block_segments(phi) == [((), ('u',)), (('x',), ('y',)), (('z',), ())]

    def test_index_map(self):
        """Variables are numbered by their segment."""
        phi = parse_formula(self.PHI)
        assert index_map(phi) == {'u': 1, 'x': 2, 'y': 2, 'z': 3}

    def test_var_index_outside_prefix_is_infinite(self):
        """Names not bound in the prefix get index infinity."""
        phi = parse_formula(self.PHI)
        assert var_index(phi, 'w') == inf

    def test_non_prenex_rejected(self):
        """Segments are only defined for prenex sentences."""
        phi = parse_formula("(forall x. P(x)) & exists y. Q(y)")
        with pytest.raises(NotPrenex):
            block_segments(phi)

    def test_phi_prefix(self):
        """The binders of the free variables, outermost first."""
        phi = parse_formula("forall x. exists y. forall z. R(x, z)")
        assert phi_prefix(phi, (0, 0, 0)) == ((FORALL, 'x'), (FORALL, 'z'))

    def test_terminal_prefix(self):
        """The longest suffix that starts with a universal."""
        prefix = ((EXISTS, 'u'), (FORALL, 'x'), (EXISTS, 'y'))
        assert terminal_prefix(prefix) == ((FORALL, 'x'), (EXISTS, 'y'))
        assert terminal_prefix(((EXISTS, 'u'),)) == ()


class TestComponents:
    """Test the union-find helpers."""

    def test_disjoint_sets(self):
        """Unions merge components; find returns a shared root."""
        sets = DisjointSets(['a', 'b', 'c'])
        sets.union('a', 'b')
        assert sets.find('a') == sets.find('b')
        assert sets.find('c') != sets.find('a')
        assert sets.components() == [['a', 'b'], ['c']]

    def test_co_occurrence_components(self):
        """Variables sharing atoms, transitively, form one component."""
        phi = parse_formula("forall x y z w. R(x, y) & R(y, z) & P(w)")
        assert co_occurrence_components(phi) == [frozenset({'w'}), frozenset({'x', 'y', 'z'})]


class TestVariablePartition:
    """Test partition certificates."""

    def test_overlapping_classes_rejected(self):
        """A variable can belong to one class only."""
        with pytest.raises(OverlappingSets):
            VariablePartition({'Y': {'x'}, 'X1': {'x'}}, 'SBSR')

    def test_describe_omits_empty_classes(self):
        """Compact text lists non-empty classes with sorted members."""
        partition = VariablePartition({'Y': {'y', 'u'}, 'X1': set(), 'X2': {'x'}}, 'SBSR')
        assert partition.describe() == "Y={u,y} X2={x}"
        assert partition.class_of('x') == 'X2'
        assert partition.class_of('w') is None
