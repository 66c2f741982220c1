"""Tests for the formula representation and syntactic normal forms."""

import pytest
from hypothesis import given, settings

from sepfrag.parser import parse_formula
from sepfrag.syntax import (
    FALSE,
    TRUE,
    And,
    Atom,
    CaptureRisk,
    Exists,
    Forall,
    NotASubformula,
    NotRectified,
    Or,
    TwoupOverflow,
    Var,
    Vocabulary,
    VocabularyError,
    alternation_count,
    canonical_prenex,
    conj,
    disj,
    formula_len,
    free_vars,
    is_nnf,
    is_prenex,
    is_rectified,
    prefix_signature,
    rectify,
    replace_at,
    subformula_at,
    substitute,
    to_nnf,
    to_prenex,
    twoup,
)

from .strategies import sentences

P_x = Atom('P', (Var('x'),))
Q_x = Atom('Q', (Var('x'),))


class TestConstructors:
    """Test the flattening smart constructors and node invariants."""

    def test_conj_flattens_nested_conjunctions(self):
        """Nested conjunctions are spliced into one n-ary node."""
        inner = And((P_x, Q_x))
        assert conj([inner, P_x]) == And((P_x, Q_x, P_x))

    def test_conj_units(self):
        """Empty conjunction is truth and a singleton is the part itself."""
        assert conj([]) == TRUE
        assert conj([P_x]) == P_x

    def test_disj_units(self):
        """Empty disjunction is falsity and a singleton is the part itself."""
        assert disj([]) == FALSE
        assert disj([Q_x]) == Q_x
        assert disj([Or((P_x, Q_x)), P_x]) == Or((P_x, Q_x, P_x))

    def test_empty_quantifier_block_rejected(self):
        """A quantifier must bind at least one variable."""
        with pytest.raises(ValueError):
            Forall((), P_x)

    def test_duplicate_block_variable_rejected(self):
        """A block may not bind the same variable twice."""
        with pytest.raises(ValueError):
            Exists(('x', 'x'), P_x)


class TestVocabulary:
    """Test vocabulary merging and validation."""

    def test_of_collects_predicates(self):
        """Vocabulary.of gathers every predicate with its arity."""
        phi = parse_formula("forall x y. P(x) -> R(x, y)")
        assert Vocabulary.of(phi).predicates == {'P': 1, 'R': 2}

    def test_merge_rejects_arity_clash(self):
        """Merging two vocabularies with different arities for a name fails."""
        with pytest.raises(VocabularyError):
            Vocabulary({'P': 1}).merge(Vocabulary({'P': 2}))

    def test_symbol_cannot_be_predicate_and_constant(self):
        """A name is either a predicate or a constant."""
        with pytest.raises(VocabularyError):
            Vocabulary({'c': 1}, frozenset({'c'}))


class TestTraversal:
    """Test path addressing."""

    def test_subformula_at(self):
        """Paths index children from the root."""
        phi = parse_formula("forall x. P(x) & Q(x)")
        assert subformula_at(phi, (0, 1)) == Q_x

    def test_subformula_at_bad_path(self):
        """A path past a leaf raises NotASubformula."""
        phi = parse_formula("forall x. P(x)")
        with pytest.raises(NotASubformula):
            subformula_at(phi, (0, 0))

    def test_replace_at(self):
        """Replacing a subformula rebuilds the spine."""
        phi = parse_formula("forall x. P(x) & Q(x)")
        assert replace_at(phi, (0, 1), P_x) == Forall(('x',), And((P_x, P_x)))


class TestRenaming:
    """Test rectification and substitution."""

    def test_rectify_renames_second_binder(self):
        """The first binder keeps its name, later ones get a numeric suffix."""
        phi = parse_formula("(forall x. P(x)) & exists x. Q(x)")
        result = rectify(phi)
        expected = And((
            Forall(('x',), P_x),
            Exists(('x1',), Atom('Q', (Var('x1'),))),
        ))
        assert result == expected
        assert is_rectified(result)

    def test_rectify_drops_vacuous_binders(self):
        """Variables that do not occur in the body are not bound."""
        phi = parse_formula("forall x y. P(x)")
        assert rectify(phi) == Forall(('x',), P_x)

    def test_substitute_avoids_capture(self):
        """A binder that would capture the substituted variable is renamed."""
        phi = parse_formula("exists y. R(x, y)", allow_free=True)
        result = substitute(phi, {'x': Var('y')})
        assert result == Exists(('y1',), Atom('R', (Var('y'), Var('y1'))))

    def test_substitute_without_auto_rename(self):
        """With auto-renaming disabled a capture is an error."""
        phi = parse_formula("exists y. R(x, y)", allow_free=True)
        with pytest.raises(CaptureRisk):
            substitute(phi, {'x': Var('y')}, auto_rename=False)

    def test_free_vars(self):
        """Only occurrences outside every binder of the name are free."""
        phi = parse_formula("R(x, y) & exists y. P(y)", allow_free=True)
        assert free_vars(phi) == {'x', 'y'}


class TestNormalForms:
    """Test negation normal form and prenex form."""

    def test_nnf_pushes_negation_through_quantifiers(self):
        """~forall x. (P(x) -> exists y. R(x, y)) becomes exists x. P(x) & forall y. ~R(x, y)."""
        phi = parse_formula("~forall x. (P(x) -> exists y. R(x, y))")
        expected = parse_formula("exists x. P(x) & forall y. ~R(x, y)")
        assert to_nnf(phi) == expected
        assert is_nnf(to_nnf(phi))

    def test_prenex_requires_rectified_input(self):
        """Two binders of x make to_prenex refuse."""
        phi = parse_formula("(forall x. P(x)) & exists x. Q(x)")
        with pytest.raises(NotRectified):
            to_prenex(phi)

    def test_canonical_prenex_pulls_existentials_first(self):
        """Sibling prefixes are merged with existential runs first."""
        phi = parse_formula("(forall x. P(x)) & exists y. Q(y)")
        result = canonical_prenex(phi)
        assert prefix_signature(result) == 'EA'
        assert result == parse_formula("exists y. forall x. P(x) & Q(y)")

    def test_alternation_count(self):
        """Each forall block followed by an exists block counts once."""
        assert alternation_count(parse_formula("forall x. exists y. R(x, y)")) == 1
        assert alternation_count(parse_formula("exists x. forall y. R(x, y)")) == 0
        phi = parse_formula("forall x. exists y. forall z. exists w. R(x, y) & R(z, w)")
        assert alternation_count(phi) == 2

    @settings(max_examples=60, deadline=None)
    @given(sentences())
    def test_normal_forms_have_their_shape(self, phi):
        """Rectification, NNF and prenex conversion produce the promised shapes."""
        assert is_rectified(rectify(phi))
        assert is_nnf(to_nnf(phi))
        assert is_prenex(canonical_prenex(phi))


class TestLengthAndTetration:
    """Test formula_len and twoup."""

    def test_formula_len(self):
        """Atoms count their arguments, binders two symbols per variable."""
        assert formula_len(P_x) == 2
        assert formula_len(Forall(('x',), P_x)) == 4
        assert formula_len(And((P_x, Q_x))) == 5

    @pytest.mark.parametrize("k,m,expected", [
        (0, 5, 5),
        (1, 3, 8),
        (2, 2, 16),
        (3, 2, 65536),
        (2, 4, 65536),
    ])
    def test_twoup_values(self, k, m, expected):
        """twoup(k, m) iterates exponentiation k times starting at m."""
        assert twoup(k, m) == expected

    def test_twoup_overflow(self):
        """Values past the bit cap raise instead of hanging."""
        with pytest.raises(TwoupOverflow):
            twoup(4, 4)

    def test_twoup_rejects_negative(self):
        """Tetration is only defined on nonnegative integers."""
        with pytest.raises(ValueError):
            twoup(-1, 2)
