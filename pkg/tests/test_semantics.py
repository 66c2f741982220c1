"""Tests for evaluation, the equivalence oracle and model search."""

import pytest
from hypothesis import given, settings

from sepfrag import semantics
from sepfrag.ackermann import PairCellsOverlap
from sepfrag.fragments import NotBSR, NotSF
from sepfrag.parser import parse_formula, print_structure
from sepfrag.semantics import (
    SAT,
    UNKNOWN,
    UNSAT,
    ConstantOutsideS,
    EmptyS,
    FiniteStructure,
    UnboundVariable,
    VocabularyMismatch,
    bsr_model_bound,
    bsr_sat,
    enumerate_structures,
    equivalent_upto,
    evaluate,
    evaluate_reference,
    evaluation_form,
    induced_substructure,
    sat,
    sf_model_bound,
    structure_count,
)
from sepfrag.syntax import Atom, Exists, Var, Vocabulary, conj

from .strategies import sentences, structures


class TestStructures:
    """Test structure construction and enumeration."""

    def test_tuple_outside_domain(self):
        """Relations only hold domain elements."""
        with pytest.raises(ValueError):
            FiniteStructure(2, {'P': {(2,)}})

    def test_mixed_arities(self):
        """A relation has one arity."""
        with pytest.raises(ValueError):
            FiniteStructure(2, {'R': {(0,), (0, 1)}})

    @pytest.mark.parametrize("vocab,size,expected", [
        (Vocabulary({'P': 1}), 1, 2),
        (Vocabulary({'R': 2}), 2, 16),
        (Vocabulary({'P': 1, 'Q': 1}), 2, 16),
        (Vocabulary({'P': 1}, frozenset({'c'})), 2, 8),
    ])
    def test_enumeration_is_complete(self, vocab, size, expected):
        """Every structure appears exactly once."""
        found = [print_structure(s) for s in enumerate_structures(vocab, size)]
        assert structure_count(vocab, size) == expected
        assert len(found) == expected
        assert len(set(found)) == expected

    def test_induced_substructure(self):
        """Elements are relabeled in increasing order."""
        structure = FiniteStructure(3, {'R': {(0, 1), (1, 2)}}, {'c': 2})
        sub = induced_substructure(structure, {1, 2})
        assert sub.domain_size == 2
        assert sub.relations['R'] == frozenset({(0, 1)})
        assert sub.constant_map == {'c': 1}

    def test_induced_substructure_errors(self):
        """The set must be nonempty and keep every constant."""
        structure = FiniteStructure(3, {'R': {(0, 1)}}, {'c': 2})
        with pytest.raises(EmptyS):
            induced_substructure(structure, [])
        with pytest.raises(ConstantOutsideS):
            induced_substructure(structure, {0, 1})


class TestEvaluate:
    """Test truth evaluation."""

    STRUCTURE = FiniteStructure(2, {'P': {(0,)}, 'R': {(0, 1), (1, 1)}})

    @pytest.mark.parametrize("text,expected", [
        ("forall x. P(x)", False),
        ("exists x. P(x)", True),
        ("forall x. exists y. R(x, y)", True),
        ("exists y. forall x. R(x, y)", True),
        ("forall x. R(x, x)", False),
        ("forall x y. x = y | R(x, y) | R(y, x)", True),
    ])
    def test_sentences(self, text, expected):
        """Quantifiers reduce over the domain."""
        phi = parse_formula(text)
        assert evaluate(self.STRUCTURE, phi) is expected
        assert evaluate_reference(self.STRUCTURE, phi) is expected

    def test_assignment(self):
        """Free variables take their values from beta."""
        phi = parse_formula("R(x, y)", allow_free=True)
        assert evaluate(self.STRUCTURE, phi, {'x': 0, 'y': 1})
        assert not evaluate(self.STRUCTURE, phi, {'x': 1, 'y': 0})

    def test_unbound_variable(self):
        """Every free variable needs a value."""
        phi = parse_formula("P(x)", allow_free=True)
        with pytest.raises(UnboundVariable):
            evaluate(self.STRUCTURE, phi)

    def test_vocabulary_mismatch(self):
        """The structure must interpret every symbol with its arity."""
        with pytest.raises(VocabularyMismatch):
            evaluate(self.STRUCTURE, parse_formula("forall x. Q(x)"))
        with pytest.raises(VocabularyMismatch):
            evaluate(self.STRUCTURE, parse_formula("forall x y. P(x, y)"))

    @settings(max_examples=100, deadline=None)
    @given(sentences(), structures())
    def test_agrees_with_reference(self, phi, structure):
        """Tensor evaluation matches direct recursion."""
        assert evaluate(structure, phi) == evaluate_reference(structure, phi)

    @pytest.mark.parametrize("holds", [True, False])
    def test_block_wider_than_numpy_axes(self, holds):
        """Blocks with more variables than an array has axes still evaluate."""
        names = tuple(f"y{i}" for i in range(70))
        phi = Exists(names, conj(Atom('P', (Var(v),)) for v in names))
        structure = FiniteStructure(1, {'P': {(0,)} if holds else set()}, arities={'P': 1})
        assert evaluate(structure, phi) is holds

    def test_linked_wide_block(self):
        """A chain links every variable, so the block is fixed tuple by tuple."""
        names = tuple(f"y{i}" for i in range(40))
        chain = conj(Atom('R', (Var(a), Var(b))) for a, b in zip(names, names[1:]))
        phi = Exists(names, chain)
        assert evaluation_form(phi) == phi
        assert evaluate(FiniteStructure(1, {'R': {(0, 0)}}), phi)

    @pytest.mark.parametrize("text,expected", [
        ("forall x y. P(x) | Q(y)", "(forall x. P(x)) | (forall y. Q(y))"),
        ("exists x y z. P(x) & R(y, z)", "(exists x. P(x)) & (exists y z. R(y, z))"),
        ("forall x y. P(x) & R(x, y)", "(forall x. P(x)) & (forall x y. R(x, y))"),
        ("forall x. exists y. R(x, y)", "forall x. exists y. R(x, y)"),
    ])
    def test_evaluation_form(self, text, expected):
        """Blocks are bound on the smallest parts that mention them."""
        assert evaluation_form(parse_formula(text)) == parse_formula(expected)


class TestEquivalence:
    """Test the bounded equivalence oracle."""

    def test_forall_and_exists_differ_on_two_elements(self):
        """The first counterexample has two elements."""
        result = equivalent_upto(parse_formula("forall x. P(x)"), parse_formula("exists x. P(x)"))
        assert not result.equivalent
        assert result.counterexample.domain_size == 2
        assert result.exhaustive_sizes == [1, 2]

    def test_equivalent_sentences(self):
        """De Morgan duals agree everywhere."""
        phi = parse_formula("~forall x. P(x)")
        psi = parse_formula("exists x. ~P(x)")
        result = equivalent_upto(phi, psi, max_size=3)
        assert result.equivalent
        assert result.checked == 2 + 4 + 8

    def test_sampling_past_budget(self):
        """Sizes past the budget are sampled with the given seed."""
        phi = parse_formula("forall x. P(x)")
        result = equivalent_upto(phi, phi, max_size=2, budget=1, samples=5, seed=7)
        assert result.equivalent
        assert result.sampled_sizes == [1, 2]
        assert result.checked == 10
        assert result.to_dict()['seed'] == 7

    def test_size_callback(self):
        """on_size reports the mode of every size."""
        seen = []
        phi = parse_formula("forall x. P(x)")
        equivalent_upto(phi, phi, max_size=2, on_size=lambda *args: seen.append(args))
        assert seen == [(1, 'exhaustive', 2), (2, 'exhaustive', 4)]


class TestModelBounds:
    """Test BSR and SF model bounds."""

    def test_bsr_bound_counts_leading_existentials(self):
        """Leading existentials plus constants."""
        assert bsr_model_bound(parse_formula("exists x y. forall z. R(x, z) & R(z, y)")) == 2
        assert bsr_model_bound(parse_formula("vocab P/1 c; exists x. P(x) & P(c)")) == 2
        assert bsr_model_bound(parse_formula("forall x. P(x)")) == 1

    def test_bsr_bound_needs_bsr(self):
        """Non-BSR sentences are refused."""
        with pytest.raises(NotBSR):
            bsr_model_bound(parse_formula("forall x. exists y. R(x, y)"))

    def test_sf_bound(self):
        """One alternation: len + len^2 * 2^len."""
        phi = parse_formula("forall x. exists y. P(x) & Q(y)")
        assert sf_model_bound(phi) == 9 + 81 * 512

    def test_sf_bound_needs_sf(self):
        """Non-SF sentences are refused."""
        with pytest.raises(NotSF):
            sf_model_bound(parse_formula("forall x. exists y. R(x, y)"))


class TestSat:
    """Test satisfiability dispatch."""

    def test_bsr_sat_finds_smallest_model(self):
        """A one-element loop satisfies exists x forall y R(x, y)."""
        result = bsr_sat(parse_formula("exists x. forall y. R(x, y)"))
        assert result.verdict == SAT
        assert result.bound_used == 1
        assert result.model.relations['R'] == frozenset({(0, 0)})
        assert result.header() == "SAT bound=1 method=BSR"

    def test_bsr_unsat(self):
        """Exhausting the bound proves unsatisfiability."""
        result = sat(parse_formula("(forall x. P(x)) & exists y. ~P(y)"))
        assert result.verdict == UNSAT
        assert result.method == 'BSR'

    def test_sf_goes_through_bsr(self):
        """SF sentences are decided in their BSR translation."""
        result = sat(parse_formula("forall x. exists y. P(x) & Q(y)"))
        assert result.verdict == SAT
        assert result.method == 'SF->BSR'

    def test_sbsr_goes_through_bsr(self):
        """SBSR sentences outside SF use the SBSR engine."""
        result = sat(parse_formula("forall x. exists y. forall z. R(y, z) & P(x)"))
        assert result.verdict == SAT
        assert result.method == 'SBSR->BSR'

    def test_saf_bounded_search(self):
        """Other separated sentences get a bounded search in their translation."""
        result = sat(parse_formula("forall x. exists y. R(x, y) & ~R(y, x)"))
        assert result.verdict == SAT
        assert result.method == 'SAF->AF->bounded-search'
        assert result.bound_used == 3

    def test_refused_translation_searches_input(self, monkeypatch):
        """A translation refused for overlapping pair cells falls back to the input."""
        def refuse(*args, **kwargs):
            raise PairCellsOverlap("overlap")

        monkeypatch.setattr(semantics, 'translate', refuse)
        result = sat(parse_formula("forall x. exists y. R(x, y) & ~R(y, x)"))
        assert result.verdict == SAT
        assert result.method == 'bounded-search'
        assert result.bound_used == 3

    def test_plain_bounded_search(self):
        """Sentences in no decidable fragment are searched directly."""
        phi = parse_formula("forall x y w. exists z. R(x, z) & R(z, y) & R(w, z)")
        result = sat(phi)
        assert result.verdict == SAT
        assert result.method == 'bounded-search'

    def test_bounded_search_never_says_unsat(self):
        """An exhausted bounded search is UNKNOWN."""
        phi = parse_formula("forall x y w. exists z. R(x, z) & R(z, y) & R(w, z) & ~R(z, z)")
        result = sat(phi, max_model_size=1)
        assert result.verdict == UNKNOWN
        assert result.bound_used == 1

    def test_structure_budget(self):
        """Running out of structures gives UNKNOWN with a marked method."""
        result = sat(parse_formula("exists x. forall y. R(x, y)"), budget=1)
        assert result.verdict == UNKNOWN
        assert result.bound_used == 0
        assert result.method == 'BSR (structure budget)'
