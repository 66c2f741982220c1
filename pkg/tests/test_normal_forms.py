"""Tests for DNF/CNF regrouping and quantifier pushing."""

import pytest

from sepfrag.normal_forms import (
    BudgetExceeded,
    cnf_clauses,
    dnf_terms,
    miniscope,
    push_quantifier,
    simplify,
)
from sepfrag.parser import parse_formula
from sepfrag.syntax import EXISTS, FORALL, TRUE, And, Atom, Exists, Forall, Not, Or, Var

P_x = Atom('P', (Var('x'),))
Q_x = Atom('Q', (Var('x'),))
Q_y = Atom('Q', (Var('y'),))


def open_formula(text):
    return parse_formula(text, allow_free=True)


class TestRegrouping:
    """Test normal forms over basic formulas."""

    def test_dnf_distributes(self):
        """A conjunction over a disjunction splits into two terms."""
        terms = dnf_terms(open_formula("P(x) & (Q(x) | Q(y))"))
        assert terms == [(P_x, Q_x), (P_x, Q_y)]

    def test_complementary_term_dropped(self):
        """A term holding a literal and its negation is false."""
        assert dnf_terms(open_formula("Q(x) & ~Q(x)")) == []

    def test_absorption(self):
        """P | (P & Q) keeps only the term P."""
        assert dnf_terms(open_formula("P(x) | P(x) & Q(x)")) == [(P_x,)]

    def test_absorption_keeps_order(self):
        """A later, shorter term absorbs an earlier one; survivors keep their order."""
        terms = dnf_terms(open_formula("P(x) & Q(x) | Q(y) | Q(x)"))
        assert terms == [(Q_y,), (Q_x,)]

    def test_cnf_distributes(self):
        """A disjunction over a conjunction splits into two clauses."""
        clauses = cnf_clauses(open_formula("P(x) | Q(x) & Q(y)"))
        assert clauses == [(P_x, Q_x), (P_x, Q_y)]

    def test_quantified_subformulas_are_basic(self):
        """Quantified parts are never opened up."""
        phi = open_formula("P(x) & exists y. Q(y) | P(y)")
        assert dnf_terms(phi) == [(P_x, phi.parts[1])]

    def test_term_budget(self):
        """Regrouping refuses past max_terms."""
        phi = open_formula("(P(x) | Q(x)) & (P(y) | Q(y)) & (P(z) | Q(z))")
        with pytest.raises(BudgetExceeded):
            dnf_terms(phi, max_terms=2)


class TestSimplify:
    """Test constant folding."""

    def test_tautology_folds(self):
        """Excluded middle under a quantifier folds to truth."""
        assert simplify(parse_formula("forall x. P(x) | ~P(x)")) == TRUE

    def test_double_negation(self):
        """Double negation disappears."""
        assert simplify(Not(Not(P_x))) == P_x

    def test_vacuous_binder_dropped(self):
        """A binder whose variable no longer occurs goes away."""
        assert simplify(Forall(('x', 'y'), P_x)) == Forall(('x',), P_x)


class TestPushing:
    """Test moving quantifiers onto the basics that mention them."""

    def test_exists_onto_its_conjunct(self):
        """exists y. P(x) & Q(y) becomes P(x) & exists y. Q(y)."""
        result = push_quantifier(EXISTS, 'y', And((P_x, Q_y)))
        assert result == And((P_x, Exists(('y',), Q_y)))

    def test_forall_onto_its_disjunct(self):
        """forall y. P(x) | Q(y) becomes P(x) | forall y. Q(y)."""
        result = push_quantifier(FORALL, 'y', Or((P_x, Q_y)))
        assert result == Or((P_x, Forall(('y',), Q_y)))

    def test_unused_variable(self):
        """A quantifier over an absent variable is dropped."""
        assert push_quantifier(FORALL, 'y', P_x) == P_x

    def test_miniscope(self):
        """Every quantifier ends up over the basics that mention its variable."""
        result = miniscope(parse_formula("forall x. exists y. P(x) & Q(y)"))
        assert result == And((Forall(('x',), P_x), Exists(('y',), Q_y)))
