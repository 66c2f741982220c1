"""Tests for the seeded sentence generators."""

import pytest

from sepfrag.corpus import (
    CORPUS_FRAGMENTS,
    CorpusExhausted,
    CorpusGenerator,
    witness_variants,
)
from sepfrag.fragments import membership, parse_fragment
from sepfrag.parser import parse_formula, print_formula
from sepfrag.witnesses import WitnessFamily

NOT_GUARDED = "forall x. exists y. R(x, y)"


class TestGenerator:
    """Test CorpusGenerator."""

    @pytest.mark.parametrize("label", CORPUS_FRAGMENTS[:-1])
    def test_entries_are_members(self, label):
        """Every generated sentence belongs to its fragment."""
        fragment, k = parse_fragment(label)
        for entry in CorpusGenerator(seed=11).generate(label, 3):
            assert entry.fragment == label
            assert membership(entry.formula, fragment, k).verdict

    def test_same_seed_same_corpus(self):
        """Generation is reproducible from the seed."""
        first = [print_formula(e.formula) for e in CorpusGenerator(seed=5).generate('SF', 4)]
        second = [print_formula(e.formula) for e in CorpusGenerator(seed=5).generate('SF', 4)]
        assert first == second

    def test_mixed(self):
        """'mixed' draws a fragment per entry."""
        entries = CorpusGenerator(seed=2).generate('mixed', 6)
        assert len(entries) == 6
        assert all(entry.fragment in CORPUS_FRAGMENTS for entry in entries)

    def test_no_generator(self):
        """Fragments without a generator are refused."""
        with pytest.raises(ValueError):
            CorpusGenerator().entry('GNFO')

    def test_fallback(self):
        """When sampling fails a contained fragment supplies the sentence."""
        generator = CorpusGenerator(seed=3, max_tries=2)
        generator._builders['SBSR'] = lambda: parse_formula(NOT_GUARDED)
        entry = generator.entry('SBSR')
        assert entry.tags == ['fallback']
        assert membership(entry.formula, *parse_fragment('SBSR')).verdict

    def test_exhausted(self):
        """Without a fallback a failing generator gives up."""
        generator = CorpusGenerator(max_tries=2)
        generator._builders['GF'] = lambda: parse_formula(NOT_GUARDED)
        with pytest.raises(CorpusExhausted):
            generator.entry('GF')


class TestWitnessVariants:
    """Test arity-truncated witness sentences."""

    def test_tagged_as_derived(self):
        """Variants carry the source fragment label and the derived tag."""
        entries = witness_variants(WitnessFamily.SGF_LGF, [1, 2], 1)
        assert [entry.fragment for entry in entries] == ['SLGF', 'SLGF']
        assert all(entry.tags == ['derived'] for entry in entries)

    def test_to_dict(self):
        """Entries serialize with a printed formula."""
        entry = witness_variants(WitnessFamily.MFO_BSR, [1], 1)[0]
        data = entry.to_dict()
        assert data['fragment'] == 'SF'
        assert parse_formula(data['formula']) == entry.formula
