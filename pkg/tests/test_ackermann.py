"""Tests for the special form and the universal-behind-a-disjunction step."""

import pytest
from hypothesis import given, settings

from sepfrag.ackermann import (
    PairCellsOverlap,
    forall_behind_or,
    saf_special_form,
    saf_to_af,
    sgks_to_gks,
)
from sepfrag.fragments import FragmentId, NotSAF, membership
from sepfrag.normal_forms import BudgetExceeded
from sepfrag.parser import parse_formula
from sepfrag.semantics import equivalent_upto
from sepfrag.syntax import Atom, Exists, Forall, Or, Var
from sepfrag.transforms import BlowupBudget, ShapeMismatch
from sepfrag.witnesses import WitnessFamily, gen_witness

from .strategies import universal_cells

P_x = Atom('P', (Var('x'),))
Q_y = Atom('Q', (Var('y'),))


def assert_equivalent(phi, psi, max_size=2):
    result = equivalent_upto(phi, psi, max_size=max_size)
    assert result.equivalent, result.counterexample


class TestForallBehindOr:
    """Test the copy construction for a disjunction of universal cells."""

    def test_single_atom_two_copies(self):
        """One atom gives q = 2 copies of x and y."""
        psi = parse_formula("forall x. exists y. R(x, y)")
        result = forall_behind_or(psi, [])
        assert isinstance(result, Exists)
        assert len(result.vars) == 2 * 2
        guesses, table = result.body.parts
        assert isinstance(table, Forall) and table.vars == ('x',)
        assert isinstance(table.body, Exists) and table.body.vars == ('y',)
        assert len(table.body.body.parts) == 2
        assert_equivalent(psi, result, max_size=3)

    def test_two_cells_four_copies(self):
        """Two atoms over two cells give q = 4 copies."""
        psi = Or((Forall(('x',), Exists(('y',), P_x)), Forall(('x',), Exists(('y',), Q_y))))
        result = forall_behind_or(psi, [])
        assert len(result.vars) == 4 * 2
        assert_equivalent(psi, result, max_size=3)

    def test_reference_variables_stay_free(self):
        """Variables in z may occur freely and are left alone."""
        psi = parse_formula("forall x. exists y. R(z, x) | R(x, y)", allow_free=True)
        result = forall_behind_or(psi, ['z'])
        closed_in, closed_out = Exists(('z',), psi), Exists(('z',), result)
        assert_equivalent(closed_in, closed_out)

    def test_shape_checks(self):
        """Cells must start with a universal, share a prefix and close over z."""
        with pytest.raises(ShapeMismatch):
            forall_behind_or(parse_formula("exists y. Q(y)"), [])
        with pytest.raises(ShapeMismatch):
            forall_behind_or(Or((Forall(('x',), P_x), Forall(('y',), Q_y))), [])
        with pytest.raises(ShapeMismatch):
            forall_behind_or(parse_formula("forall x. R(x, z)", allow_free=True), [])

    def test_atom_budget(self):
        """Too many atoms refuse the 2^|At| expansion."""
        psi = Or((Forall(('x',), Exists(('y',), P_x)), Forall(('x',), Exists(('y',), Q_y))))
        with pytest.raises(BudgetExceeded):
            forall_behind_or(psi, [], BlowupBudget(max_atoms_for_expansion=1))

    @settings(max_examples=100, deadline=None)
    @given(universal_cells())
    def test_random_disjunctions_keep_meaning(self, psi):
        """Random disjunctions of cells keep their meaning under the copy construction."""
        result = forall_behind_or(psi, [])
        assert isinstance(result, Exists)
        check = equivalent_upto(psi, result, max_size=2, budget=8, samples=20)
        assert check.equivalent, check.counterexample


class TestSpecialForm:
    """Test the SAF special form."""

    def test_af_input(self):
        """An AF sentence keeps its meaning."""
        phi = parse_formula("exists z. forall x. exists y. R(z, x) & R(x, y)")
        assert_equivalent(phi, saf_special_form(phi))

    def test_shifts_past_conjunction(self):
        """The universal blocks of a two-block SAF sentence end up in separate cells."""
        phi = parse_formula("forall x. exists y. forall z. exists u. R(x, y) & R(z, u)")
        result = saf_special_form(phi)
        assert_equivalent(phi, result)

    def test_not_saf(self):
        """Sentences outside SAF are refused."""
        with pytest.raises(NotSAF):
            saf_special_form(parse_formula("forall x y. exists z. R(x, z) & R(z, y)"))


class TestTranslations:
    """Test the entry points on small inputs."""

    def test_af_input_is_prenexed(self):
        """AF sentences pass through saf_to_af in prenex form."""
        phi = parse_formula("exists z. forall x. exists y. R(z, x) & R(x, y)")
        assert saf_to_af(phi) == phi

    def test_saf_to_af(self):
        """A disjunction of universal cells becomes a single universal."""
        phi = parse_formula("forall x. exists y. forall z. exists u. R(x, y) | R(z, u)")
        assert not membership(phi, FragmentId.AF).verdict
        result = saf_to_af(phi)
        assert membership(result, FragmentId.AF).verdict
        assert_equivalent(phi, result, max_size=2)

    def test_sgks_to_gks(self):
        """Two universal pairs in separate blocks end up under one pair."""
        phi = parse_formula("forall x1 x2. exists y1. forall x3 x4. exists y2. "
                            "R(x1, y1) & R(x2, y1) & R(x3, y2) & R(x4, y2)")
        assert not membership(phi, FragmentId.GKS).verdict
        result = sgks_to_gks(phi)
        assert membership(result, FragmentId.GKS).verdict
        assert_equivalent(phi, result, max_size=2)


class TestSGKS:
    """Test pairs whose members sit in different universal blocks."""

    INTERLEAVED = "forall x2. exists y2. forall x1. exists y1. (P(x1, x2) <-> Q(y1, y2))"

    def test_adjacent_pair(self):
        """A pair already sharing a block translates to an equivalent GKS sentence."""
        phi = parse_formula("forall x1 x2. exists y1 y2. P(x1, x2) <-> Q(y1, y2)")
        assert membership(phi, FragmentId.SGKS).verdict
        result = sgks_to_gks(phi)
        assert membership(result, FragmentId.GKS).verdict
        assert_equivalent(phi, result, max_size=2)

    def test_interleaved_pair(self):
        """Partner cells split by an existential are merged behind a guess."""
        phi = parse_formula(self.INTERLEAVED)
        assert membership(phi, FragmentId.SGKS).verdict
        history = []
        result = sgks_to_gks(phi, history=history)
        assert membership(result, FragmentId.GKS).verdict
        assert any(event.step == 'merge-pair' for event in history)
        assert_equivalent(phi, result, max_size=2)

    def test_overlapping_cells_refused(self):
        """Partner cells that can hold together are refused, not mistranslated."""
        phi = parse_formula("forall x2. exists y2. forall x1. exists y1. "
                            "(P(x1, x2) | Q(y1, y2)) & (R(x1, x2) | ~Q(y1, y2))")
        with pytest.raises(PairCellsOverlap):
            sgks_to_gks(phi)

    def test_witness_respects_budget(self):
        """The smallest witness outgrows a small term budget instead of running on."""
        phi = gen_witness(WitnessFamily.SGKS_GKS, 1)
        assert membership(phi, FragmentId.SGKS).verdict
        with pytest.raises(BudgetExceeded):
            sgks_to_gks(phi, BlowupBudget(max_terms=64))
