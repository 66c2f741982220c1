"""Equivalence-preserving translations into the base fragments.

Every engine works the same way: quantifiers of a prenex sentence are shifted
inward one at a time, rightmost first, each onto the basic formulas that
mention its variable (see normal_forms); the shifted sentence is then
reassembled in the target fragment's shape and the result is re-checked by
the membership deciders.

Engines accept a BlowupBudget and report each step as a TraceEvent through an
``on_step`` callback and an optional ``history`` list.
"""

from contextlib import contextmanager
from dataclasses import dataclass, asdict, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .fragments import (
    FragmentId,
    NotSBSR,
    NotSF,
    fragment_label,
    membership,
    sf_sbsr_partition,
)
from .normal_forms import (
    DEFAULT_MAX_TERMS,
    BudgetExceeded,
    push_quantifier,
    shift_quantifiers_rules,
    simplify,
)
from .separateness import VariablePartition
from .syntax import (
    EXISTS,
    FORALL,
    Binder,
    Exists,
    Forall,
    Formula,
    Path,
    SepfragError,
    VarName,
    all_vars,
    bound_vars,
    canonical_prenex,
    formula_len,
    free_vars,
    is_nnf,
    is_rectified,
    kind_of,
    prefix_blocks,
    quantify,
    rectify,
    to_nnf,
    to_prenex,
    walk_scoped,
)

DEFAULT_MAX_FORMULA_LEN = 10 ** 6
DEFAULT_MAX_ATOMS_FOR_EXPANSION = 12

Step = Tuple[str, VarName]
StepCallback = Callable[['TraceEvent'], None]


class PreconditionViolated(SepfragError):
    """A shifting step was applied to a formula outside its invariants."""

    def __init__(self, condition: str, message: str = ''):
        super().__init__(message or f"Shifting condition ({condition}) does not hold")
        self.condition = condition


class ShapeMismatch(SepfragError):
    """A formula does not have the shape an operation expects, or a result misses its target."""


@dataclass
class BlowupBudget:
    """Limits that make a translation refuse instead of exploding.

    Attributes:
        max_formula_len: Largest intermediate or final formula, in symbols.
        max_atoms_for_expansion: Largest atom set a type expansion may range over
            (the expansion makes 2 ** atoms copies).
        max_terms: Largest DNF/CNF a single regrouping may build.
    """
    max_formula_len: int = DEFAULT_MAX_FORMULA_LEN
    max_atoms_for_expansion: int = DEFAULT_MAX_ATOMS_FOR_EXPANSION
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self) -> None:
        for name in ('max_formula_len', 'max_atoms_for_expansion', 'max_terms'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)


@dataclass
class TraceEvent:
    """One rewriting step: which step, where, and the formula size before and after."""
    step: str
    path: Path
    before: int
    after: int

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {'step': self.step, 'path': list(self.path), 'before': self.before,
                'after': self.after}

    def line(self) -> str:
        path = '.'.join(str(i) for i in self.path) or '-'
        return f"{self.step} {path} {self.before} {self.after}"


@dataclass
class TranslationResult:
    """A finished translation with its step history."""
    source: Formula
    target: Formula
    source_fragment: str
    target_fragment: str
    history: List[TraceEvent] = field(default_factory=list)

    @property
    def source_len(self) -> int:
        return formula_len(self.source)

    @property
    def target_len(self) -> int:
        return formula_len(self.target)

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        from .parser import print_formula

        return {
            'source_fragment': self.source_fragment,
            'target_fragment': self.target_fragment,
            'source': print_formula(self.source),
            'target': print_formula(self.target),
            'source_len': self.source_len,
            'target_len': self.target_len,
            'history': [event.to_dict() for event in self.history],
        }


class Tracer:
    """Budget enforcement and step reporting shared by the engines."""

    def __init__(
        self,
        budget: Optional[BlowupBudget] = None,
        on_step: Optional[StepCallback] = None,
        history: Optional[List[TraceEvent]] = None,
    ):
        self.budget = budget or BlowupBudget()
        self.on_step = on_step
        self.history: List[TraceEvent] = history if history is not None else []

    def record(self, step: str, path: Path, before: Formula, after: Formula) -> Formula:
        """Log a step and enforce the length budget on its result.

        Raises:
            BudgetExceeded: if after is longer than max_formula_len.
        """
        event = TraceEvent(step, tuple(path), formula_len(before), formula_len(after))
        self.history.append(event)
        if self.on_step:
            self.on_step(event)
        if event.after > self.budget.max_formula_len:
            raise BudgetExceeded(
                f"{step} at {list(path)} produced {event.after} symbols "
                f"(budget {self.budget.max_formula_len})",
                self.history,
            )
        return after

    @contextmanager
    def regrouping(self) -> Iterator[None]:
        """Attach the step history to budget errors raised by the normal-form code."""
        try:
            yield
        except BudgetExceeded as exc:
            if exc.trace:
                raise
            raise BudgetExceeded(str(exc), self.history) from exc


def verified(result: Formula, fragment: FragmentId, k: Optional[int] = None) -> Formula:
    """Return result after checking it lies in the target fragment.

    Raises:
        ShapeMismatch: if the membership check rejects the result.
    """
    check = membership(result, fragment, k)
    if not check.verdict:
        raise ShapeMismatch(
            f"Translation result is not in {fragment_label(fragment, k)}: {check.describe()}"
        )
    return result


def prefix_path(position: int) -> Path:
    """Path of the position-th quantifier of a prenex formula with single-variable nodes."""
    return (0,) * position


# ---------------------------------------------------------------------------
# Quantifier shifting
# ---------------------------------------------------------------------------

def shift_quantifiers(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Miniscope phi with the distribution, pull-out and swap rules, innermost first.

    No normal form is built, so the result is never longer than phi. Inputs
    that are not in negation normal form or not rectified are normalized first.

    Raises:
        BudgetExceeded: if the result exceeds the length budget.
    """
    tracer = Tracer(budget, on_step, history)
    subject = phi
    if not is_nnf(subject) or not is_rectified(subject):
        subject = rectify(to_nnf(subject))
    result = shift_quantifiers_rules(subject)
    return tracer.record('shift', (), phi, result)


# ---------------------------------------------------------------------------
# SBSR shifting step
# ---------------------------------------------------------------------------

@dataclass
class PrefixOrder:
    """Positions, kinds and segment numbers of the variables of a quantifier prefix.

    Segments pair a universal block with the existential block after it; a
    leading existential block forms segment 0.
    """
    position: Dict[VarName, int]
    kind: Dict[VarName, str]
    segment: Dict[VarName, int]

    @classmethod
    def of(cls, prefix: Sequence[Step]) -> 'PrefixOrder':
        position: Dict[VarName, int] = {}
        kind: Dict[VarName, str] = {}
        segment: Dict[VarName, int] = {}
        number = 0
        previous: Optional[str] = None
        for index, (q, name) in enumerate(prefix):
            if q == FORALL and previous != FORALL:
                number += 1
            position[name] = index
            kind[name] = q
            segment[name] = number
            previous = q
        return cls(position, kind, segment)


def prefix_of(phi: Formula) -> List[Step]:
    """Quantifier prefix of a prenex formula as (kind, variable) pairs."""
    blocks, _ = prefix_blocks(phi)
    return [(block.kind, name) for block in blocks for name in block.vars]


def _class_number(label: Optional[str]) -> Optional[int]:
    if label is None or not label.startswith('X'):
        return None
    return int(label[1:])


def _universal_problem(
    name: VarName, names: Sequence[VarName], context: VariablePartition, order: PrefixOrder
) -> bool:
    number = _class_number(context.class_of(name))
    if number is None:
        return True
    for v in names:
        label = context.class_of(v)
        if label is None:
            return True
        if label == 'Y':
            if order.segment[v] >= number:
                return True
        elif label != f"X{number}":
            return True
    return False


def _existential_problem(name: VarName, names: Sequence[VarName], order: PrefixOrder) -> bool:
    top = order.segment[name]
    return any(
        order.kind.get(v) == FORALL and order.segment[v] <= top for v in names
    )


def check_shift_conditions(
    phi: Formula, context: VariablePartition, prefix: Sequence[Step]
) -> Optional[str]:
    """First shifting condition that phi = Qv.psi violates, or None.

    (i) negation normal form, no variable rebound along a branch and none both
    free and bound; (ii) nested quantifiers follow the prefix order; (iii)
    every universal subformula of psi sees only its own X class and earlier
    existentials; (iv) no existential subformula of psi mentions a universal
    of its own or an earlier segment; (v) along every branch of psi the
    existentials come before the universals and from earlier segments.

    Copies of a prefix quantifier made by regrouping keep its variable name,
    so (i) is checked per branch rather than globally.
    """
    order = PrefixOrder.of(prefix)
    if not is_nnf(phi) or free_vars(phi) & set(bound_vars(phi)):
        return 'i'
    for path, node, scope in walk_scoped(phi):
        if not isinstance(node, (Forall, Exists)):
            continue
        chain = list(scope)
        q = kind_of(node)
        for position, name in enumerate(node.vars):
            if name not in order.position or order.kind[name] != q:
                return 'ii'
            if any(b.var == name for b in chain):
                return 'i'
            if chain and order.position[chain[-1].var] >= order.position[name]:
                return 'ii'
            if path != ():
                inner = [b for b in chain if b.path != ()]
                if q == EXISTS and any(b.kind == FORALL for b in inner):
                    return 'v'
                if q == FORALL and any(
                    b.kind == EXISTS and order.segment[b.var] >= order.segment[name]
                    for b in inner
                ):
                    return 'v'
                names = sorted(all_vars(node) - set(node.vars[:position]))
                if q == FORALL and _universal_problem(name, names, context, order):
                    return 'iii'
                if q == EXISTS and _existential_problem(name, names, order):
                    return 'iv'
            chain.append(Binder(path, position, q, name))
    return None


def sbsr_shift_step(
    phi: Formula,
    context: VariablePartition,
    prefix: Sequence[Step],
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
    path: Path = (),
) -> Formula:
    """Shift the outermost quantifier of phi = Qv.psi inward.

    For a universal the body is regrouped into a conjunction of disjunctions of
    basic formulas and the quantifier binds only the part of each disjunction
    that mentions v; existentials work dually over a disjunction of
    conjunctions. A quantifier whose variable does not occur is dropped.

    Args:
        context: SBSR partition of the sentence phi was cut from.
        prefix: That sentence's quantifier prefix.

    Raises:
        PreconditionViolated: naming the first shifting condition phi violates.
        BudgetExceeded: if the regrouping exceeds the budget.
    """
    if not isinstance(phi, (Forall, Exists)) or len(phi.vars) != 1:
        raise PreconditionViolated('i', "Expected a formula Qv.psi with a single quantifier")
    problem = check_shift_conditions(phi, context, prefix)
    if problem is not None:
        raise PreconditionViolated(problem)
    tracer = Tracer(budget, on_step, history)
    kind, name = kind_of(phi), phi.vars[0]
    with tracer.regrouping():
        result = push_quantifier(kind, name, phi.body, tracer.budget.max_terms)
    return tracer.record(f"shift-{kind}", path, phi, result)


def shift_prefix(
    prenex: Formula,
    context: VariablePartition,
    tracer: Tracer,
) -> Formula:
    """Apply sbsr_shift_step to every prefix quantifier, rightmost first."""
    prefix = prefix_of(prenex)
    _, matrix = prefix_blocks(prenex)
    body = matrix
    for position in reversed(range(len(prefix))):
        kind, name = prefix[position]
        body = sbsr_shift_step(
            quantify(kind, [name], body), context, prefix, tracer.budget,
            tracer.on_step, tracer.history, prefix_path(position),
        )
    return body


def _to_bsr(prenex: Formula, context: VariablePartition, tracer: Tracer) -> Formula:
    shifted = shift_prefix(prenex, context, tracer)
    folded = simplify(shifted)
    tracer.record('simplify', (), shifted, folded)
    result = to_prenex(rectify(folded), existentials_first=True)
    tracer.record('prenex', (), folded, result)
    return verified(result, FragmentId.BSR)


def sbsr_to_bsr(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent BSR sentence for an SBSR sentence.

    BSR inputs come back as their canonical prenex form.

    Raises:
        NotSBSR: if phi is not in SBSR.
        BudgetExceeded: with the step history attached.
    """
    if membership(phi, FragmentId.BSR).verdict:
        return canonical_prenex(phi)
    check = membership(phi, FragmentId.SBSR)
    if not check.verdict:
        raise NotSBSR(f"Not an SBSR sentence: {check.describe()}", check)
    assert isinstance(check.witness, VariablePartition) and check.subject is not None
    return _to_bsr(check.subject, check.witness, Tracer(budget, on_step, history))


def sf_to_bsr(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent BSR sentence for an SF sentence, via its canonical SBSR partition.

    Raises:
        NotSF: if phi is not in SF.
        BudgetExceeded: with the step history attached.
    """
    check = membership(phi, FragmentId.SF)
    if not check.verdict:
        raise NotSF(f"Not an SF sentence: {check.describe()}", check)
    if membership(phi, FragmentId.BSR).verdict:
        return canonical_prenex(phi)
    assert check.subject is not None
    partition = sf_sbsr_partition(check.subject)
    return _to_bsr(check.subject, partition, Tracer(budget, on_step, history))


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

# source fragment -> target fragment
TARGETS: Dict[FragmentId, FragmentId] = {
    FragmentId.SF: FragmentId.BSR,
    FragmentId.SBSR: FragmentId.BSR,
    FragmentId.SAF: FragmentId.AF,
    FragmentId.SGKS: FragmentId.GKS,
    FragmentId.SLGF: FragmentId.LGF,
    FragmentId.SGNFO: FragmentId.GNFO,
    FragmentId.SFOk: FragmentId.FOk,
    FragmentId.SFL: FragmentId.FL,
}


def translate(
    phi: Formula,
    source: FragmentId,
    k: Optional[int] = None,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
) -> TranslationResult:
    """Run the translation out of source and collect its history.

    Raises:
        ValueError: for a fragment without a translation, or SFOk without k.
        NotInFragment: if phi is not in source.
        BudgetExceeded: if the translation exceeds the budget.
    """
    from .ackermann import saf_to_af, sgks_to_gks
    from .finite_variable import sfl_to_fl, sfok_to_fok
    from .guarded import sgnfo_to_gnfo, slgf_to_lgf

    source = FragmentId(source)
    if source not in TARGETS:
        raise ValueError(
            f"No translation out of {source.value}; expected one of "
            f"{', '.join(f.value for f in TARGETS)}"
        )
    history: List[TraceEvent] = []
    if source is FragmentId.SFOk:
        if k is None or k < 1:
            raise ValueError("SFOk needs a positive number of variables")
        target = sfok_to_fok(phi, k, budget, on_step, history)
    else:
        engines: Dict[FragmentId, Callable[..., Formula]] = {
            FragmentId.SF: sf_to_bsr,
            FragmentId.SBSR: sbsr_to_bsr,
            FragmentId.SAF: saf_to_af,
            FragmentId.SGKS: sgks_to_gks,
            FragmentId.SLGF: slgf_to_lgf,
            FragmentId.SGNFO: sgnfo_to_gnfo,
            FragmentId.SFL: sfl_to_fl,
        }
        target = engines[source](phi, budget, on_step, history)
    level = k if source is FragmentId.SFOk else None
    return TranslationResult(
        phi, target, fragment_label(source, level), fragment_label(TARGETS[source], level),
        history,
    )
