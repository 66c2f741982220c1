"""sepfrag: separated fragments of first-order logic.

sepfrag decides membership of first-order sentences in the separated
fragments (SF, SBSR, SAF, SGKS, SLGF, SGNFO, SFO^k, SFL) and their base
fragments, translates separated sentences into equivalent base-fragment
sentences, checks results on finite structures, and measures how much
longer the translations get.
"""

__version__ = "0.1.0"
__author__ = "Cameron"
__license__ = "MIT"

from .syntax import Formula, SepfragError, Vocabulary, twoup
from .parser import ParseError, parse_formula, parse_structure, print_formula
from .separateness import guard_separated, separated, strictly_separated
from .fragments import FragmentId, MembershipResult, classify, membership
from .transforms import BlowupBudget, TranslationResult, translate
from .semantics import FiniteStructure, bsr_sat, equivalent_upto, evaluate, sat
from .witnesses import WitnessFamily, gap_report, gen_witness, gen_witness_model

__all__ = [
    "Formula",
    "SepfragError",
    "Vocabulary",
    "twoup",
    "ParseError",
    "parse_formula",
    "parse_structure",
    "print_formula",
    "separated",
    "strictly_separated",
    "guard_separated",
    "FragmentId",
    "MembershipResult",
    "classify",
    "membership",
    "BlowupBudget",
    "TranslationResult",
    "translate",
    "FiniteStructure",
    "bsr_sat",
    "equivalent_upto",
    "evaluate",
    "sat",
    "WitnessFamily",
    "gap_report",
    "gen_witness",
    "gen_witness_model",
]
