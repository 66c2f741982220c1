"""Tests for the SLGF and SGNFO translation engines."""

import pytest

from sepfrag.fragments import FragmentId, NotSGNFO, membership
from sepfrag.guarded import sgnfo_to_gnfo, slgf_to_lgf
from sepfrag.parser import parse_formula
from sepfrag.semantics import equivalent_upto


class TestSLGF:
    """Test slgf_to_lgf."""

    def test_lgf_input_unchanged(self):
        """Guarded sentences are returned as they are."""
        phi = parse_formula("forall x y. R(x, y) -> P(x)")
        assert slgf_to_lgf(phi) is phi

    def test_guard_distributed(self):
        """A body mentioning an outer variable is split off the inner quantifier."""
        history = []
        phi = parse_formula("forall x. P(x) -> exists y. Q(y) & P(x)")
        result = slgf_to_lgf(phi, history=history)
        steps = [event.step for event in history]
        assert 'distribute-guard' in steps
        assert steps[-1] == 'lift'
        assert membership(result, FragmentId.GF).verdict
        assert equivalent_upto(phi, result, max_size=3).equivalent


class TestSGNFO:
    """Test sgnfo_to_gnfo."""

    def test_negation_split(self):
        """The doubly guarded negation is split before the existentials move in."""
        seen = []
        phi = parse_formula("exists x y. P(x) & Q(y) & ~(R(x, x) & R(y, y))")
        result = sgnfo_to_gnfo(phi, on_step=seen.append)
        steps = [event.step for event in seen]
        assert 'split-negation' in steps
        assert steps[-1] == 'shift-exists'
        assert membership(result, FragmentId.GNFO).verdict
        assert equivalent_upto(phi, result, max_size=2).equivalent

    def test_not_sgnfo(self):
        """Universal quantifiers are refused."""
        with pytest.raises(NotSGNFO):
            sgnfo_to_gnfo(parse_formula("forall x. P(x)"))
