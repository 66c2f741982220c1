"""End-to-end checks over worked examples and generated corpora.

The corpus runs are marked slow; deselect them with -m "not slow".
"""

import pytest

from sepfrag.ackermann import PairCellsOverlap, saf_special_form, saf_to_af
from sepfrag.corpus import CorpusGenerator
from sepfrag.fragments import FragmentId, classify, membership
from sepfrag.normal_forms import BudgetExceeded
from sepfrag.parser import parse_formula, print_formula
from sepfrag.semantics import (
    SAT,
    UNSAT,
    bsr_sat,
    enumerate_structures,
    equivalent_upto,
    evaluate,
    structure_count,
)
from sepfrag.syntax import Vocabulary, twoup
from sepfrag.transforms import BlowupBudget, sbsr_to_bsr, sf_to_bsr, translate
from sepfrag.witnesses import (
    WitnessFamily,
    count_leading_existentials,
    gap_report,
    gen_witness,
    theoretical_bound,
)

TWO_IMPLICATIONS = "forall x. exists y. P(x) <-> Q(y)"
TWO_IMPLICATIONS_BSR = "exists y1 y2. forall x. (P(x) -> Q(y1)) & (~P(x) -> ~Q(y2))"

SBSR_EXAMPLE = "exists u. forall x. exists y. forall z. (P(u, z) & Q(u, x)) | (P(y, z) & Q(u, y))"
SBSR_EXAMPLE_BSR = (
    "exists u y. forall x z v. ((P(u, x) | P(y, x)) & P(u, x) & Q(u, x))"
    " | ((P(u, z) | P(y, z)) & Q(u, y) & Q(u, z))"
    " | ((P(u, v) | P(y, v)) & Q(u, y) & P(y, v))"
)

SAF_EXAMPLE = (
    "exists y. forall x1. exists u1. forall x2. exists u2 u3."
    " (~P(y, x1) | (Q(x1, u1) & R(y, x2, u2)))"
    " & (P(y, x1) | (~Q(x1, u1) & ~R(y, x2, u3)))"
)

CONTAINMENTS = [
    ('BSR', 'SF'), ('SF', 'SBSR'), ('AF', 'SAF'), ('SAF', 'SGKS'), ('GF', 'SGF'),
    ('SGF', 'SLGF'), ('LGF', 'SLGF'), ('GNFO', 'SGNFO'), ('FL', 'SFL'), ('FO2', 'SFO2'),
]

TRANSLATABLE = {
    'SF': (FragmentId.SF, None, FragmentId.BSR, None),
    'SBSR': (FragmentId.SBSR, None, FragmentId.BSR, None),
    'SAF': (FragmentId.SAF, None, FragmentId.AF, None),
    'SGKS': (FragmentId.SGKS, None, FragmentId.GKS, None),
    'SGF': (FragmentId.SLGF, None, FragmentId.LGF, None),
    'SFO2': (FragmentId.SFOk, 2, FragmentId.FOk, 2),
    'SFL': (FragmentId.SFL, None, FragmentId.FL, None),
}


def oracle(phi, psi, max_size=2, budget=2000, samples=300):
    return equivalent_upto(phi, psi, max_size=max_size, budget=budget, samples=samples, seed=0)


class TestWorkedExamples:
    """Translations of the worked example sentences."""

    def test_two_implications(self):
        """The SF sentence matches the hand-made BSR sentence on every small structure."""
        result = sf_to_bsr(parse_formula(TWO_IMPLICATIONS))
        assert membership(result, FragmentId.BSR).verdict
        check = equivalent_upto(result, parse_formula(TWO_IMPLICATIONS_BSR), max_size=3)
        assert check.equivalent
        assert check.exhaustive_sizes == [1, 2, 3]

    @pytest.mark.slow
    def test_sbsr_example(self):
        """The SBSR translation agrees with the hand-made BSR sentence."""
        phi = parse_formula(SBSR_EXAMPLE)
        assert membership(phi, FragmentId.SBSR).verdict
        result = sbsr_to_bsr(phi)
        assert membership(result, FragmentId.BSR).verdict
        expected = parse_formula(SBSR_EXAMPLE_BSR)
        check = oracle(result, expected, max_size=3, budget=70000, samples=10000)
        assert check.equivalent, check.counterexample
        assert check.exhaustive_sizes == [1, 2]
        assert check.sampled_sizes == [3]

    def test_sbsr_example_is_also_saf(self):
        """The same sentence sits in SBSR and SAF but in none of AF, SF, BSR and MFO."""
        report = classify(parse_formula(SBSR_EXAMPLE))
        assert report.verdict('SBSR') and report.verdict('SAF')
        assert not any(report.verdict(label) for label in ('AF', 'SF', 'BSR', 'MFO'))

    @pytest.mark.slow
    def test_saf_example(self):
        """The special form and the AF translation keep the meaning."""
        phi = parse_formula(SAF_EXAMPLE)
        assert membership(phi, FragmentId.SAF).verdict
        special = saf_special_form(phi)
        result = saf_to_af(phi)
        assert membership(result, FragmentId.AF).verdict
        for candidate in (special, result):
            check = oracle(phi, candidate, max_size=3, budget=70000, samples=10000)
            assert check.equivalent, check.counterexample
            assert check.exhaustive_sizes == [1, 2]
            assert check.sampled_sizes == [3]


class TestGapTable:
    """Growth of the measured translations."""

    @pytest.mark.slow
    def test_mfo_bsr_growth(self):
        """Translated length grows strictly and meets the 2^n leading existentials."""
        rows = gap_report(WitnessFamily.MFO_BSR, [1, 2, 3])
        assert [row.status for row in rows] == ['ok'] * 3
        lengths = [row.target_len for row in rows]
        assert lengths == sorted(set(lengths))
        assert [row.leading_exists >= 2 ** row.n for row in rows] == [True] * 3

    def test_mfo_bsr_translations_are_equivalent(self):
        """n = 1, 2 translate to equivalent sentences."""
        for n in (1, 2):
            phi = gen_witness(WitnessFamily.MFO_BSR, n)
            result = sf_to_bsr(phi)
            assert count_leading_existentials(result) >= 2 ** n
            assert oracle(phi, result, max_size=2, budget=300, samples=100).equivalent

    def test_theoretical_bound_column(self):
        """Exact sums of towers while they fit."""
        for n in (1, 2, 3):
            assert theoretical_bound(WitnessFamily.SF_BSR, n) == sum(
                twoup(k, n) for k in range(1, n + 1)
            )


@pytest.mark.slow
class TestCorpora:
    """Properties over generated corpora."""

    def test_round_trip(self):
        """Printing and parsing gives back the same sentence."""
        for entry in CorpusGenerator(seed=1).generate('mixed', 200):
            assert parse_formula(print_formula(entry.formula)) == entry.formula

    def test_containments(self):
        """Sub-fragment membership always implies membership in the larger fragment."""
        for entry in CorpusGenerator(seed=2).generate('mixed', 1000):
            report = classify(entry.formula, levels=(2,))
            for small, large in CONTAINMENTS:
                if report.verdict(small):
                    assert report.verdict(large), (small, large, print_formula(entry.formula))

    def test_bsr_bound_is_enough(self):
        """No structure slightly past the bound changes a BSR verdict."""
        for entry in CorpusGenerator(seed=3, max_arity=1).generate('BSR', 40):
            phi = entry.formula
            result = bsr_sat(phi)
            vocab = Vocabulary.of(phi)
            if result.verdict == SAT:
                assert evaluate(result.model, phi)
                continue
            assert result.verdict == UNSAT
            for size in range(1, result.bound_used + 3):
                if structure_count(vocab, size) > 5000:
                    break
                assert not any(evaluate(s, phi) for s in enumerate_structures(vocab, size))

    @pytest.mark.parametrize("label", sorted(TRANSLATABLE))
    def test_translations_are_sound(self, label):
        """Every translation lands in its target and keeps the meaning."""
        source, k, target, target_k = TRANSLATABLE[label]
        budget = BlowupBudget(max_formula_len=20000, max_atoms_for_expansion=6)
        checked = 0
        for entry in CorpusGenerator(seed=4, max_arity=2).generate(label, 300):
            if not membership(entry.formula, source, k).verdict:
                continue
            try:
                result = translate(entry.formula, source, k, budget)
            except (BudgetExceeded, PairCellsOverlap):
                continue
            assert membership(result.target, target, target_k).verdict
            check = oracle(entry.formula, result.target, max_size=2, budget=5000, samples=300)
            assert check.equivalent, print_formula(entry.formula)
            checked += 1
        assert checked > 0
