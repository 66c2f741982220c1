"""Membership in the base fragments and their separated extensions.

Prefix fragments (BSR, SF, SBSR, AF, SAF, GKS, SGKS) are judged on the
canonical prenex form of a sentence: negation normal form, rectified, with
existential quantifiers pulled out first. Guard fragments are judged on the
sentence itself (rectified when needed), lane fragments on its binders, and
Maslov's K on its negation normal form.

Every positive verdict carries a witness that is re-checked by an independent
checker before it is returned.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from .guards import (
    GF,
    GNFO,
    LGF,
    NEGATION,
    QUANTIFIER_MODES,
    SGF,
    SGNFO,
    SLGF,
    GuardAnnotation,
    GuardInfo,
    GuardViolation,
    recognize_guards,
)
from .lanes import (
    LaneAssignment,
    LaneViolation,
    fluted_lanes,
    fluted_violation,
    fo_lanes,
    herzig_violation,
    rename_binders,
    sfl_lanes,
    sfo_lanes,
)
from .separateness import (
    DisjointSets,
    NotPrenex,
    VariablePartition,
    index_map,
    separated,
    touches_both,
)
from .syntax import (
    EXISTS,
    FORALL,
    And,
    Atom,
    Binder,
    Const,
    Eq,
    Exists,
    Falsity,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Path,
    QuantifierBlock,
    SepfragError,
    Truth,
    Var,
    VarName,
    alternation_count,
    atom_terms,
    atom_vars,
    atoms,
    bound_vars,
    canonical_prenex,
    children,
    conj,
    disj,
    free_vars,
    is_atomic,
    is_prenex,
    is_rectified,
    kind_of,
    prefix_blocks,
    quantify,
    rectify,
    resolve,
    subformula_at,
    to_nnf,
    walk,
    walk_scoped,
    with_children,
)


class FragmentId(str, Enum):
    """Fragments known to the classifier."""
    MFO = 'MFO'
    MFOeq = 'MFOeq'
    BSR = 'BSR'
    SF = 'SF'
    SBSR = 'SBSR'
    AF = 'AF'
    SAF = 'SAF'
    GKS = 'GKS'
    SGKS = 'SGKS'
    MaslovK = 'MaslovK'
    GF = 'GF'
    SGF = 'SGF'
    LGF = 'LGF'
    SLGF = 'SLGF'
    GNFO = 'GNFO'
    SGNFO = 'SGNFO'
    FOk = 'FOk'
    SFOk = 'SFOk'
    FL = 'FL'
    SFL = 'SFL'
    HerzigOrdered = 'HerzigOrdered'


DEFAULT_LEVELS = (1, 2, 3)
DEFAULT_EXHAUSTIVE_LIMIT = 12
EXHAUSTED = 'exhausted-search'

_GUARD_FRAGMENTS = {
    FragmentId.GF: GF,
    FragmentId.SGF: SGF,
    FragmentId.LGF: LGF,
    FragmentId.SLGF: SLGF,
    FragmentId.GNFO: GNFO,
    FragmentId.SGNFO: SGNFO,
}
_NODE_TYPES = (Atom, Eq, Truth, Falsity, Not, And, Or, Implies, Iff, Forall, Exists)
_LEVEL_LABEL = re.compile(r'^(S?FO)(\d+)$')
_X_CLASS = re.compile(r'^X(\d+)$')


class FreeVariables(SepfragError):
    """Membership was asked for a formula with free variables."""


class UnsupportedSyntax(SepfragError):
    """The formula contains a node or term the classifiers do not know."""


class EqualityPresent(SepfragError):
    """An equality-free fragment operation received a formula with equality."""


class WitnessRejected(SepfragError):
    """A witness failed its independent re-check."""


class NotInFragment(SepfragError):
    """A translation received a sentence outside its source fragment."""
    fragment = ''

    def __init__(self, message: str, result: Optional['MembershipResult'] = None):
        super().__init__(message)
        self.result = result


class NotMFO(NotInFragment):
    fragment = 'MFO'


class NotBSR(NotInFragment):
    fragment = 'BSR'


class NotSF(NotInFragment):
    fragment = 'SF'


class NotSBSR(NotInFragment):
    fragment = 'SBSR'


class NotSAF(NotInFragment):
    fragment = 'SAF'


class NotSGKS(NotInFragment):
    fragment = 'SGKS'


class NotSLGF(NotInFragment):
    fragment = 'SLGF'


class NotSGNFO(NotInFragment):
    fragment = 'SGNFO'


class NotSFOk(NotInFragment):
    fragment = 'SFOk'


class NotSFL(NotInFragment):
    fragment = 'SFL'


Witness = Union[VariablePartition, GuardAnnotation, LaneAssignment]
Violation = Tuple[str, Path]


def fragment_label(fragment: FragmentId, k: Optional[int] = None) -> str:
    """Report label of a fragment: 'FO2' and 'SFO3' for the finite-variable ones."""
    fragment = FragmentId(fragment)
    if fragment is FragmentId.FOk:
        return f"FO{k}"
    if fragment is FragmentId.SFOk:
        return f"SFO{k}"
    return fragment.value


def parse_fragment(label: str) -> Tuple[FragmentId, Optional[int]]:
    """Inverse of fragment_label; fragment names are matched case-insensitively.

    Raises:
        ValueError: if the label names no fragment.
    """
    text = label.strip()
    match = _LEVEL_LABEL.match(text.upper())
    if match:
        kind = FragmentId.SFOk if match.group(1) == 'SFO' else FragmentId.FOk
        return kind, int(match.group(2))
    for fragment in FragmentId:
        if fragment.value.lower() == text.lower():
            return fragment, None
    raise ValueError(f"Unknown fragment: {label}")


@dataclass
class MembershipResult:
    """Verdict of one membership check.

    Attributes:
        fragment: Report label ('SF', 'FO2', ...).
        verdict: Whether the sentence belongs to the fragment.
        witness: Partition, guard annotation or lane assignment backing a true verdict.
        violation: (rule, path into subject) explaining a false verdict.
        engine: What decided: structural, union-find, exhaustive, exhausted,
            guards, lanes or containment.
        subject: The normalized formula the verdict and paths refer to.
        details: Extra facts such as the number of alternations.
    """
    fragment: str
    verdict: bool
    witness: Optional[Witness] = None
    violation: Optional[Violation] = None
    engine: str = 'structural'
    subject: Optional[Formula] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        from .parser import print_formula

        result: Dict[str, Any] = {
            'fragment': self.fragment,
            'verdict': self.verdict,
            'engine': self.engine,
        }
        if self.witness is not None:
            result['witness'] = self.witness.to_dict()
        if self.violation is not None:
            rule, path = self.violation
            result['violation'] = {'rule': rule, 'path': list(path)}
        if self.details:
            result['details'] = dict(self.details)
        if self.subject is not None:
            result['subject'] = print_formula(self.subject)
        return result

    def describe(self) -> str:
        """One report line: ``FRAGMENT verdict [witness|violation]``."""
        if self.verdict:
            extra = self.witness.describe() if self.witness is not None else ''
            return f"{self.fragment} true {extra}".rstrip()
        if self.violation is None:
            return f"{self.fragment} false"
        rule, path = self.violation
        return f"{self.fragment} false {rule}@{list(path)}"


@dataclass
class ClassificationReport:
    """Membership results keyed by fragment label, in classification order."""
    results: Dict[str, MembershipResult] = field(default_factory=dict)

    def __getitem__(self, label: str) -> MembershipResult:
        return self.results[label]

    def __contains__(self, label: object) -> bool:
        return label in self.results

    def verdict(self, label: str) -> bool:
        return self.results[label].verdict

    def members(self) -> List[str]:
        return [label for label, result in self.results.items() if result.verdict]

    def lines(self) -> List[str]:
        return [result.describe() for result in self.results.values()]

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {'results': [result.to_dict() for result in self.results.values()]}


# ---------------------------------------------------------------------------
# Input checks and prefix bookkeeping
# ---------------------------------------------------------------------------

def check_sentence(phi: Formula) -> None:
    """Reject formulas the classifiers cannot judge.

    Raises:
        UnsupportedSyntax: for unknown node types or non-variable, non-constant terms.
        FreeVariables: if phi has free variables.
    """
    for path, node in walk(phi):
        if not isinstance(node, _NODE_TYPES):
            raise UnsupportedSyntax(
                f"Unsupported node {type(node).__name__} at {list(path)}"
            )
        if is_atomic(node):
            for term in atom_terms(node):
                if not isinstance(term, (Var, Const)):
                    raise UnsupportedSyntax(
                        f"Only variables and constants may be arguments (at {list(path)})"
                    )
    free = free_vars(phi)
    if free:
        raise FreeVariables(f"Formula has free variables: {sorted(free)}")


def _first_equality(phi: Formula) -> Optional[Path]:
    for path, node in walk(phi):
        if isinstance(node, Eq):
            return path
    return None


def _first_constant(phi: Formula) -> Optional[Path]:
    for path, node in walk(phi):
        if is_atomic(node) and any(isinstance(t, Const) for t in atom_terms(node)):
            return path
    return None


@dataclass
class _Prenex:
    """A prenex, rectified sentence split into prefix facts and matrix atoms."""
    formula: Formula
    blocks: List[QuantifierBlock]
    index: Dict[VarName, int]
    universals: List[VarName]
    existentials: List[VarName]
    atoms: List[Tuple[Path, FrozenSet[VarName]]]
    binder_paths: Dict[VarName, Path]

    @classmethod
    def of(cls, phi: Formula) -> '_Prenex':
        if not is_prenex(phi) or not is_rectified(phi):
            raise NotPrenex("Expected a prenex, rectified sentence")
        blocks, _ = prefix_blocks(phi)
        universals = [v for b in blocks if b.kind == FORALL for v in b.vars]
        existentials = [v for b in blocks if b.kind == EXISTS for v in b.vars]
        found = []
        binder_paths: Dict[VarName, Path] = {}
        for path, node in walk(phi):
            if isinstance(node, (Forall, Exists)):
                for name in node.vars:
                    binder_paths[name] = path
            elif is_atomic(node):
                found.append((path, frozenset(atom_vars(node))))
        return cls(phi, blocks, index_map(phi), universals, existentials, found, binder_paths)

    @property
    def leading(self) -> Tuple[VarName, ...]:
        """The leading existential block, empty when the prefix starts with a universal."""
        if self.blocks and self.blocks[0].kind == EXISTS:
            return self.blocks[0].vars
        return ()

    def segment(self, name: VarName) -> int:
        """Segment of a prefix variable counted from the first universal block; 0 before it."""
        return self.index[name] - (1 if self.leading else 0)

    def path_of(self, name: VarName) -> Path:
        return self.binder_paths.get(name, ())


def _result(
    fragment: str,
    problem: Optional[Violation],
    witness: Optional[Witness],
    subject: Optional[Formula],
    engine: str = 'structural',
    **details: Any,
) -> MembershipResult:
    if problem is not None:
        return MembershipResult(fragment, False, None, problem, engine, subject, dict(details))
    return MembershipResult(fragment, True, witness, None, engine, subject, dict(details))


def _certified(
    fragment: str, witness: Witness, problem: Optional[Violation]
) -> Witness:
    if problem is not None:
        rule, path = problem
        raise WitnessRejected(
            f"{fragment} witness {witness.describe()} fails re-check: {rule} at {list(path)}"
        )
    return witness


# ---------------------------------------------------------------------------
# Monadic fragments
# ---------------------------------------------------------------------------

def _monadic_problem(phi: Formula, allow_equality: bool) -> Optional[Violation]:
    for path, node in walk(phi):
        if isinstance(node, Eq):
            if not allow_equality:
                return 'equality', path
            if any(isinstance(t, Const) for t in atom_terms(node)):
                return 'constant-argument', path
        elif isinstance(node, Atom):
            if len(node.args) != 1:
                return 'non-unary-atom', path
            if isinstance(node.args[0], Const):
                return 'constant-argument', path
    return None


def _mfo(phi: Formula, fragment: FragmentId) -> MembershipResult:
    allow_equality = fragment is FragmentId.MFOeq
    problem = _monadic_problem(phi, allow_equality)
    witness = None
    if problem is None:
        universals = [v for _, n in walk(phi) if isinstance(n, Forall) for v in n.vars]
        existentials = [v for _, n in walk(phi) if isinstance(n, Exists) for v in n.vars]
        witness = VariablePartition(
            {'X': set(universals), 'Y': set(existentials) - set(universals)}, fragment.value
        )
    return _result(fragment.value, problem, witness, phi)


# ---------------------------------------------------------------------------
# Prefix-shape fragments: BSR, AF, GKS
# ---------------------------------------------------------------------------

def _shape_problem(pre: _Prenex, max_universals: Optional[int]) -> Optional[Violation]:
    """Prefix must be exists* forall^{<=m} exists* (exists* forall* when m is None)."""
    kinds = [b.kind for b in pre.blocks]
    allowed = [EXISTS, FORALL] if max_universals is None else [EXISTS, FORALL, EXISTS]
    position = 0
    for block, kind in zip(pre.blocks, kinds):
        while position < len(allowed) and allowed[position] != kind:
            position += 1
        if position == len(allowed):
            return 'prefix-shape', pre.path_of(block.vars[0])
        if kind == FORALL and max_universals is not None and len(block.vars) > max_universals:
            return 'universal-block-size', pre.path_of(block.vars[0])
        position += 1
    return None


def _bsr(pre: _Prenex) -> MembershipResult:
    problem = _shape_problem(pre, None)
    witness = VariablePartition(
        {'Y': pre.existentials, 'X': pre.universals}, FragmentId.BSR.value
    )
    return _result(FragmentId.BSR.value, problem, witness, pre.formula)


def _ackermann_like(pre: _Prenex, fragment: FragmentId) -> MembershipResult:
    """AF (one universal) and GKS (two adjacent universals), equality-free."""
    width = 1 if fragment is FragmentId.AF else 2
    problem = _shape_problem(pre, width)
    equality = _first_equality(pre.formula)
    if problem is None and equality is not None:
        problem = ('equality', equality)
    witness = None
    if problem is None:
        ref = tuple(pre.universals)
        if ref:
            leading = set(pre.leading)
            classes = {
                'Y': [v for v in pre.existentials if v in leading],
                'X': list(ref),
                'U1': [v for v in pre.existentials if v not in leading],
            }
            witness = VariablePartition(classes, fragment.value, {'U1': ref})
        else:
            witness = VariablePartition({'Y': pre.existentials, 'X': []}, fragment.value)
    return _result(fragment.value, problem, witness, pre.formula)


# ---------------------------------------------------------------------------
# SF
# ---------------------------------------------------------------------------

def _sf_problem(pre: _Prenex, partition: VariablePartition) -> Optional[Violation]:
    zs, xs, ys = partition.get('Z'), partition.get('X'), partition.get('Y')
    if not zs <= set(pre.leading):
        return 'leading-block', ()
    if xs != set(pre.universals) or (zs | ys) != set(pre.existentials):
        return 'partition-cover', ()
    for path, names in pre.atoms:
        if touches_both(set(names), set(xs), set(ys)):
            return 'separateness', path
    return None


def check_sf_partition(phi: Formula, partition: VariablePartition) -> Optional[Violation]:
    """Independent check of an SF witness on a prenex sentence; None when it holds."""
    return _sf_problem(_Prenex.of(phi), partition)


def _sf(pre: _Prenex) -> MembershipResult:
    leading = set(pre.leading)
    partition = VariablePartition(
        {
            'Z': pre.leading,
            'X': pre.universals,
            'Y': [v for v in pre.existentials if v not in leading],
        },
        FragmentId.SF.value,
    )
    problem = _sf_problem(pre, partition)
    return _result(
        FragmentId.SF.value, problem, partition, pre.formula,
        alternations=alternation_count(pre.formula),
    )


def sf_sbsr_partition(phi: Formula) -> VariablePartition:
    """Canonical SBSR partition of a prenex SF sentence.

    Every existential goes to Y; the universals form the single class X1.

    Raises:
        NotPrenex: if phi is not prenex and rectified.
        NotSF: if phi is not an SF sentence.
    """
    pre = _Prenex.of(phi)
    result = _sf(pre)
    if not result.verdict:
        raise NotSF(f"Not an SF sentence: {result.describe()}", result)
    partition = VariablePartition(
        {'Y': pre.existentials, 'X1': pre.universals}, FragmentId.SBSR.value
    )
    problem = _sbsr_problem(pre, partition)
    return _certified('SBSR', partition, problem)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# SBSR
# ---------------------------------------------------------------------------

def _sbsr_problem(pre: _Prenex, partition: VariablePartition) -> Optional[Violation]:
    ys = partition.get('Y')
    klass: Dict[VarName, int] = {}
    for label, names in partition.classes.items():
        if label == 'Y':
            continue
        match = _X_CLASS.match(label)
        if match is None:
            return 'unknown-class', ()
        for name in names:
            klass[name] = int(match.group(1))
    for x in pre.universals:
        if not 1 <= klass.get(x, 0) <= pre.segment(x):
            return 'universal-class', pre.path_of(x)
    for y in pre.existentials:
        if y not in ys:
            return 'existential-class', pre.path_of(y)
    for path, names in pre.atoms:
        classes = {klass[v] for v in names if v in klass}
        if len(classes) > 1:
            return 'separated-classes', path
        top = max((pre.segment(v) for v in names if v in ys), default=0)
        if classes and top >= min(classes):
            return 'benign-index', path
    return None


def check_sbsr_partition(phi: Formula, partition: VariablePartition) -> Optional[Violation]:
    """Independent check of an SBSR witness on a prenex sentence; None when it holds."""
    return _sbsr_problem(_Prenex.of(phi), partition)


def find_sbsr_partition(phi: Formula) -> MembershipResult:
    """SBSR witness search on a prenex, rectified sentence.

    Universals sharing an atom must share a class. A class can be no later than
    the earliest segment of its members and must come after every existential
    co-occurring with them; taking the earliest member segment is always safe.

    Raises:
        NotPrenex: if phi is not prenex and rectified.
    """
    pre = _Prenex.of(phi)
    universal = set(pre.universals)
    sets = DisjointSets(pre.universals)
    for _, names in pre.atoms:
        sets.union_all([v for v in pre.universals if v in names])
    chosen: Dict[int, List[VarName]] = {}
    for component in sets.components():
        members = set(component)
        low = min(pre.segment(x) for x in members)  # type: ignore[arg-type]
        for path, names in pre.atoms:
            if not names & members:
                continue
            top = max((pre.segment(v) for v in names if v not in universal), default=0)
            if top >= low:
                return _result(
                    'SBSR', ('benign-index', path), None, phi, 'union-find'
                )
        chosen.setdefault(low, []).extend(component)  # type: ignore[arg-type]
    classes: Dict[str, Sequence[VarName]] = {'Y': pre.existentials}
    for number in sorted(chosen):
        classes[f"X{number}"] = chosen[number]
    partition = VariablePartition(classes, 'SBSR')
    _certified('SBSR', partition, _sbsr_problem(pre, partition))
    return _result('SBSR', None, partition, phi, 'union-find')


def brute_force_sbsr_partition(phi: Formula) -> Optional[VariablePartition]:
    """Enumerate every class assignment of the universals; for cross-checking only."""
    pre = _Prenex.of(phi)
    options = [range(1, pre.segment(x) + 1) for x in pre.universals]
    for combo in product(*options):
        classes: Dict[str, Set[VarName]] = {'Y': set(pre.existentials)}
        for x, number in zip(pre.universals, combo):
            classes.setdefault(f"X{number}", set()).add(x)
        partition = VariablePartition(classes, 'SBSR')
        if _sbsr_problem(pre, partition) is None:
            return partition
    return None


# ---------------------------------------------------------------------------
# SAF and SGKS
# ---------------------------------------------------------------------------
# A grouping puts every universal into a group of at most one (SAF) or two
# (SGKS) reference variables; every existential is either in Y (None) or in
# the U class of a group.

Assignment = Dict[VarName, Optional[int]]


@dataclass
class _Grouping:
    groups: List[Tuple[VarName, ...]]
    assignment: Assignment

    def bounds(self, index: Dict[VarName, int]) -> Tuple[Dict[int, int], Dict[int, int]]:
        low = {n: min(index[x] for x in g) for n, g in enumerate(self.groups, start=1)}
        high = {n: max(index[x] for x in g) for n, g in enumerate(self.groups, start=1)}
        return low, high


def _atom_fits(names: FrozenSet[VarName], assignment: Assignment, low: Dict[int, int],
               index: Dict[VarName, int]) -> bool:
    groups = {assignment[v] for v in names if assignment[v] is not None}
    if not groups:
        return True
    if len(groups) > 1:
        return False
    group = groups.pop()
    return all(
        assignment[v] is not None or index[v] < low[group]  # type: ignore[index]
        for v in names
    )


def _grouped_problem(pre: _Prenex, grouping: _Grouping) -> Optional[Violation]:
    low, high = grouping.bounds(pre.index)
    for name in pre.existentials:
        group = grouping.assignment.get(name)
        if group is not None and pre.index[name] < high[group]:
            return 'reference-index', pre.path_of(name)
    for path, names in pre.atoms:
        if not _atom_fits(names, grouping.assignment, low, pre.index):
            return 'atom-scope', path
    return None


def _grouping_of(
    pre: _Prenex, partition: VariablePartition, max_group: int
) -> Union[_Grouping, Violation]:
    if partition.get('X') != set(pre.universals):
        return 'universal-class', ()
    groups: List[Tuple[VarName, ...]] = []
    assignment: Assignment = {}
    labels = [label for label in partition.classes if label not in ('X', 'Y')]
    for label in labels:
        refs = partition.auxiliary.get(label, ())
        if not 1 <= len(refs) <= max_group or any(r in assignment for r in refs):
            return 'reference-group', ()
        if not set(refs) <= partition.get('X'):
            return 'reference-group', ()
        groups.append(tuple(refs))
        for ref in refs:
            assignment[ref] = len(groups)
        for name in partition.get(label):
            assignment[name] = len(groups)
    for x in pre.universals:
        if x not in assignment:
            groups.append((x,))
            assignment[x] = len(groups)
    for name in pre.existentials:
        if name in partition.get('Y'):
            if name in assignment:
                return 'existential-class', pre.path_of(name)
            assignment[name] = None
        elif name not in assignment:
            return 'existential-class', pre.path_of(name)
    return _Grouping(groups, assignment)


def _relational_problem(pre: _Prenex, allow_constants: bool) -> Optional[Violation]:
    equality = _first_equality(pre.formula)
    if equality is not None:
        raise EqualityPresent(f"Equality at {list(equality)}")
    if not allow_constants:
        constant = _first_constant(pre.formula)
        if constant is not None:
            return 'constant-argument', constant
    return None


def _check_grouped(
    phi: Formula, partition: VariablePartition, max_group: int, allow_constants: bool
) -> Optional[Violation]:
    pre = _Prenex.of(phi)
    if _first_equality(phi) is not None:
        return 'equality', _first_equality(phi) or ()
    if not allow_constants and _first_constant(phi) is not None:
        return 'constant-argument', _first_constant(phi) or ()
    grouping = _grouping_of(pre, partition, max_group)
    if not isinstance(grouping, _Grouping):
        return grouping
    return _grouped_problem(pre, grouping)


def check_saf_partition(
    phi: Formula, partition: VariablePartition, allow_constants: bool = True
) -> Optional[Violation]:
    """Independent check of an SAF witness on a prenex sentence; None when it holds."""
    return _check_grouped(phi, partition, 1, allow_constants)


def check_sgks_partition(
    phi: Formula, partition: VariablePartition, allow_constants: bool = True
) -> Optional[Violation]:
    """Independent check of an SGKS witness on a prenex sentence; None when it holds."""
    return _check_grouped(phi, partition, 2, allow_constants)


def _partition_of(pre: _Prenex, grouping: _Grouping, kind: str) -> VariablePartition:
    classes: Dict[str, Sequence[VarName]] = {
        'Y': [v for v in pre.existentials if grouping.assignment[v] is None],
        'X': pre.universals,
    }
    auxiliary = {}
    for number, members in enumerate(grouping.groups, start=1):
        label = f"U{number}"
        classes[label] = [v for v in pre.existentials if grouping.assignment[v] == number]
        auxiliary[label] = members
    return VariablePartition(classes, kind, auxiliary)


class _Restart(Exception):
    def __init__(self, a: Hashable, b: Hashable):
        self.pair = (a, b)


def _propagate(
    pre: _Prenex, sets: DisjointSets
) -> Union[Dict[VarName, Optional[Hashable]], Violation]:
    """Forced placements of the existentials for the current universal groups.

    Raises:
        _Restart: when two groups must merge.
    """
    universal = set(pre.universals)
    low: Dict[Hashable, int] = {}
    high: Dict[Hashable, int] = {}
    for x in pre.universals:
        root = sets.find(x)
        low[root] = min(low.get(root, pre.index[x]), pre.index[x])
        high[root] = max(high.get(root, pre.index[x]), pre.index[x])
    forced: Dict[VarName, Optional[Hashable]] = {}
    changed = True
    while changed:
        changed = False
        for path, names in pre.atoms:
            roots = {sets.find(v) for v in names if v in universal}
            roots |= {forced[v] for v in names if forced.get(v) is not None}
            if len(roots) > 1:
                first, second = sorted(roots, key=str)[:2]
                raise _Restart(first, second)
            if not roots:
                continue
            group = roots.pop()
            for name in sorted(names - universal):
                target = group if pre.index[name] >= low[group] else None
                if target is not None and pre.index[name] < high[group]:
                    return 'reference-index', path
                if name not in forced:
                    forced[name] = target
                    changed = True
                elif forced[name] != target:
                    if forced[name] is not None and target is not None:
                        raise _Restart(forced[name], target)
                    return 'reference-conflict', path
    return forced


def _greedy_grouping(pre: _Prenex, max_group: int) -> Union[_Grouping, Violation]:
    sets = DisjointSets(pre.universals)
    for _, names in pre.atoms:
        sets.union_all([v for v in pre.universals if v in names])
    while True:
        try:
            forced = _propagate(pre, sets)
        except _Restart as restart:
            sets.union(*restart.pair)
            continue
        break
    if not isinstance(forced, dict):
        return forced
    groups: List[Tuple[VarName, ...]] = []
    number_of: Dict[Hashable, int] = {}
    assignment: Assignment = {}
    for component in sets.components():
        members = tuple(v for v in pre.universals if v in component)
        if len(members) > max_group:
            return 'universal-group-size', pre.path_of(members[0])
        groups.append(members)
        number_of[sets.find(members[0])] = len(groups)
        for x in members:
            assignment[x] = len(groups)
    for name in pre.existentials:
        root = forced.get(name)
        assignment[name] = None if root is None else number_of[root]
    return _Grouping(groups, assignment)


def _groupings(
    universals: Sequence[VarName], max_group: int
) -> Iterator[List[Tuple[VarName, ...]]]:
    """Every partition of the universals into groups of at most max_group."""
    if not universals:
        yield []
        return
    head, rest = universals[0], list(universals[1:])
    for tail in _groupings(rest, max_group):
        yield [(head,)] + tail
    if max_group >= 2:
        for i, partner in enumerate(rest):
            for tail in _groupings(rest[:i] + rest[i + 1:], max_group):
                yield [(head, partner)] + tail


def _search_existentials(pre: _Prenex, groups: List[Tuple[VarName, ...]]) -> Optional[_Grouping]:
    assignment: Assignment = {x: n for n, g in enumerate(groups, start=1) for x in g}
    grouping = _Grouping(groups, assignment)
    low, high = grouping.bounds(pre.index)
    order = list(pre.existentials)
    position = {name: i for i, name in enumerate(order)}
    # atoms are checked once their last existential is placed
    due: Dict[int, List[FrozenSet[VarName]]] = {}
    for _, names in pre.atoms:
        placed = [position[v] for v in names if v in position]
        if not placed:
            if not _atom_fits(names, assignment, low, pre.index):
                return None
            continue
        due.setdefault(max(placed), []).append(names)

    def place(i: int) -> bool:
        if i == len(order):
            return True
        name = order[i]
        options: List[Optional[int]] = [None] + [
            n for n in high if pre.index[name] >= high[n]
        ]
        for option in options:
            assignment[name] = option
            if all(_atom_fits(names, assignment, low, pre.index) for names in due.get(i, [])):
                if place(i + 1):
                    return True
        del assignment[name]
        return False

    return grouping if place(0) else None


def _exhaustive_grouping(pre: _Prenex, max_group: int) -> Optional[_Grouping]:
    for groups in _groupings(pre.universals, max_group):
        found = _search_existentials(pre, groups)
        if found is not None:
            return found
    return None


def _find_grouped(
    phi: Formula, fragment: str, max_group: int, exhaustive_limit: int, allow_constants: bool
) -> MembershipResult:
    pre = _Prenex.of(phi)
    problem = _relational_problem(pre, allow_constants)
    if problem is not None:
        return _result(fragment, problem, None, phi)
    greedy = _greedy_grouping(pre, max_group)
    if isinstance(greedy, _Grouping):
        engine, grouping = 'union-find', greedy
    elif len(pre.universals) + len(pre.existentials) > exhaustive_limit:
        return _result(fragment, greedy, None, phi, 'union-find')
    else:
        found = _exhaustive_grouping(pre, max_group)
        if found is None:
            return _result(fragment, (EXHAUSTED, ()), None, phi, 'exhausted')
        engine, grouping = 'exhaustive', found
    partition = _partition_of(pre, grouping, fragment)
    _certified(fragment, partition, _check_grouped(phi, partition, max_group, allow_constants))
    return _result(fragment, None, partition, phi, engine)


def find_saf_partition(
    phi: Formula,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    allow_constants: bool = True,
) -> MembershipResult:
    """SAF witness search on a prenex, rectified sentence.

    Union-find propagation decides first; when it fails on a sentence with at
    most exhaustive_limit variables an exact search confirms the verdict.

    Raises:
        NotPrenex: if phi is not prenex and rectified.
        EqualityPresent: if phi contains equality.
    """
    return _find_grouped(phi, 'SAF', 1, exhaustive_limit, allow_constants)


def find_sgks_partition(
    phi: Formula,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    allow_constants: bool = True,
) -> MembershipResult:
    """SGKS witness search on a prenex, rectified sentence; see find_saf_partition.

    Raises:
        NotPrenex: if phi is not prenex and rectified.
        EqualityPresent: if phi contains equality.
    """
    return _find_grouped(phi, 'SGKS', 2, exhaustive_limit, allow_constants)


def _brute_force_grouped(
    phi: Formula, fragment: str, max_group: int
) -> Optional[VariablePartition]:
    pre = _Prenex.of(phi)
    for groups in _groupings(pre.universals, max_group):
        numbers = list(range(1, len(groups) + 1))
        choices: List[Optional[int]] = [None, *numbers]
        for combo in product(choices, repeat=len(pre.existentials)):
            assignment: Assignment = {x: n for n, g in enumerate(groups, start=1) for x in g}
            assignment.update(zip(pre.existentials, combo))
            partition = _partition_of(pre, _Grouping(groups, assignment), fragment)
            if _check_grouped(phi, partition, max_group, True) is None:
                return partition
    return None


def brute_force_saf_partition(phi: Formula) -> Optional[VariablePartition]:
    """Enumerate every SAF partition of a small prenex sentence; for cross-checking only."""
    return _brute_force_grouped(phi, 'SAF', 1)


def brute_force_sgks_partition(phi: Formula) -> Optional[VariablePartition]:
    """Enumerate every SGKS partition of a small prenex sentence; for cross-checking only."""
    return _brute_force_grouped(phi, 'SGKS', 2)


def _grouped_membership(
    pre: _Prenex, fragment: str, max_group: int, exhaustive_limit: int, allow_constants: bool
) -> MembershipResult:
    try:
        return _find_grouped(pre.formula, fragment, max_group, exhaustive_limit, allow_constants)
    except EqualityPresent:
        return _result(fragment, ('equality', _first_equality(pre.formula) or ()), None,
                       pre.formula)


# ---------------------------------------------------------------------------
# Maslov's K
# ---------------------------------------------------------------------------

def _maslov(phi: Formula) -> MembershipResult:
    subject = rectify(to_nnf(phi))
    equality = _first_equality(subject)
    if equality is not None:
        return _result('MaslovK', ('equality', equality), None, subject)
    chain: Optional[Tuple[Binder, ...]] = None
    for path, node, scope in walk_scoped(subject):
        if not is_atomic(node):
            continue
        names = atom_vars(node)
        prefix = [b for b in scope if b.var in names and resolve(scope, b.var) == b]
        start = next((i for i, b in enumerate(prefix) if b.kind == FORALL), len(prefix))
        terminal = tuple(prefix[start:])
        if len(terminal) <= 1 or terminal[-1].kind == EXISTS:
            continue
        if any(b.kind == EXISTS for b in terminal):
            return _result('MaslovK', ('terminal-prefix', path), None, subject)
        if chain is None:
            first, last = scope.index(terminal[0]), scope.index(terminal[-1])
            if any(b.kind == EXISTS for b in scope[first:last + 1]):
                return _result('MaslovK', ('interspersed-existential', path), None, subject)
            chain = terminal
        elif terminal != chain:
            return _result('MaslovK', ('second-universal-chain', path), None, subject)
    witness = VariablePartition({'K': [b.var for b in chain or ()]}, 'MaslovK')
    return _result('MaslovK', None, witness, subject)


# ---------------------------------------------------------------------------
# Guard fragments
# ---------------------------------------------------------------------------

def _cooccur(bound: Sequence[VarName], guard: Sequence[Formula]) -> bool:
    covered: Set[VarName] = set()
    for a in guard:
        covered |= atom_vars(a)
    return all(
        any({u, v} <= atom_vars(a) for a in guard) for u in bound for v in covered
    )


def _quantifier_problem(
    node: Formula, info: GuardInfo, mode: str, inner: List[Formula]
) -> Optional[str]:
    guard_vars: Set[VarName] = set()
    for a in info.guard:
        guard_vars |= atom_vars(a)
    occurring = atoms(node)
    if not info.guard or any(a not in occurring for a in info.guard):
        return 'guard-atom'
    if mode in (GF, SGF) and len(info.guard) != 1:
        return 'guard-atom'
    if not set(info.bound) <= guard_vars:
        return 'guard-coverage'
    if mode in (LGF, SLGF) and not _cooccur(info.bound, info.guard):
        return 'guard-cooccurrence'
    outside = free_vars(info.body) - guard_vars
    if outside != set(info.outside):
        return 'guard-outside'
    if outside:
        if mode in (GF, LGF):
            return 'guard-coverage'
        bound = set(info.bound)
        if not separated(info.body, bound, outside):
            return 'guard-separation'
        if any(touches_both(atom_vars(a), bound, outside) for a in inner):
            return 'guard-separation'
    return None


def _negation_problem(info: GuardInfo, mode: str) -> Optional[str]:
    free = free_vars(info.body)
    if not free:
        return None
    if mode == GNFO:
        if len(info.guard) != 1 or not free <= atom_vars(info.guard[0]):
            return 'negation-guard'
        return None
    shares = [set(u) for u, _ in info.division]
    if len(shares) != len(info.guard) or set().union(*shares) != free:
        return 'negation-division'
    if sum(len(s) for s in shares) != len(free):
        return 'negation-division'
    for atom, share in zip(info.guard, shares):
        if atom_vars(atom) & free != share:
            return 'negation-division'
    classes = [set(u) | set(z) for u, z in info.division]
    quantified = set(bound_vars(info.body))
    if set().union(*(set(z) for _, z in info.division)) != quantified:
        return 'negation-division'
    for a in atoms(info.body):
        names = atom_vars(a)
        if sum(1 for c in classes if names & c) > 1:
            return 'negation-separation'
    return None


def check_guard_annotation(phi: Formula, annotation: GuardAnnotation) -> Optional[Violation]:
    """Independent check of a guard annotation; None when every guard holds."""
    mode = annotation.mode
    for path, node in walk(phi):
        if mode in QUANTIFIER_MODES:
            if isinstance(node, (Forall, Exists)) and path not in annotation.guards:
                parent = subformula_at(phi, path[:-1]) if path else None
                merged = (
                    isinstance(parent, (Forall, Exists)) and kind_of(parent) == kind_of(node)
                )
                if not merged:
                    return 'unguarded-quantifier', path
        else:
            if isinstance(node, (Forall, Implies, Iff)):
                return 'connective-not-allowed', path
            if isinstance(node, Not) and path not in annotation.guards:
                return 'unguarded-negation', path
    for path, info in annotation.guards.items():
        node = subformula_at(phi, path)
        if info.kind == NEGATION:
            rule = _negation_problem(info, mode)
        else:
            inner = [
                a for p, g in annotation.guards.items()
                if len(p) > len(path) and p[:len(path)] == path for a in g.guard
            ]
            rule = _quantifier_problem(node, info, mode, inner)
        if rule is not None:
            return rule, path
    return None


def annotate_guards(phi: Formula, mode: str) -> MembershipResult:
    """Guard annotation of a sentence under one of the guard modes.

    Raises:
        FreeVariables: if phi has free variables.
        ValueError: for an unknown mode.
    """
    check_sentence(phi)
    subject = phi if is_rectified(phi) else rectify(phi)
    try:
        annotation = recognize_guards(subject, mode)
    except GuardViolation as exc:
        return _result(mode, (exc.rule, exc.path), None, subject, 'guards')
    _certified(mode, annotation, check_guard_annotation(subject, annotation))
    return _result(mode, None, annotation, subject, 'guards')


# ---------------------------------------------------------------------------
# Lane fragments
# ---------------------------------------------------------------------------

def check_lane_assignment(
    phi: Formula, assignment: LaneAssignment, k: Optional[int] = None, fluted: bool = False
) -> Optional[Violation]:
    """Independent check of a lane witness.

    Renaming every binder to its lane name must keep every occurrence bound by
    the same binder. With k, every lane may use at most k names. With fluted,
    every atom must read x_l .. x_m of one lane in binding order.
    """
    try:
        renamed = rename_binders(phi, assignment.names())
    except ValueError:
        return 'lane-capture', ()
    original = [(p, n, s) for p, n, s in walk_scoped(phi)]
    for (path, node, scope), (_, new_node, new_scope) in zip(original, walk_scoped(renamed)):
        if not is_atomic(node):
            continue
        for old, new in zip(atom_terms(node), atom_terms(new_node)):
            if not isinstance(old, Var):
                continue
            binder = resolve(scope, old.name)
            target = resolve(new_scope, new.name)  # type: ignore[union-attr]
            if binder is None or target is None or \
                    (target.path, target.position) != (binder.path, binder.position):
                return 'lane-capture', path
    if k is not None and any(width > k for width in assignment.widths()):
        return 'lane-width', ()
    if fluted:
        for path, node, scope in original:
            if not is_atomic(node):
                continue
            terms = atom_terms(node)
            if not terms or not all(isinstance(t, Var) for t in terms):
                return 'fluted-argument', path
            labels = [
                assignment.labels[resolve(scope, t.name)]  # type: ignore[index,union-attr]
                for t in terms
            ]
            lanes = {lane for lane, _ in labels}
            slots = [slot for _, slot in labels]
            if len(lanes) != 1 or slots != list(range(slots[0], slots[0] + len(slots))):
                return 'fluted-sequence', path
            binders = [resolve(scope, t.name) for t in terms]  # type: ignore[union-attr]
            depth = [scope.index(b) for b in binders]  # type: ignore[arg-type]
            if depth != sorted(depth):
                return 'prefix-order', path
    return None


def _fok(phi: Formula, k: int) -> MembershipResult:
    label = fragment_label(FragmentId.FOk, k)
    lanes = fo_lanes(phi)
    width = max(lanes.widths(), default=0)
    if width > k:
        return _result(label, ('variable-width', ()), None, phi, 'lanes', width=width)
    _certified(label, lanes, check_lane_assignment(phi, lanes, k))
    return _result(label, None, lanes, phi, 'lanes', width=width)


def _sfok(phi: Formula, k: int) -> MembershipResult:
    label = fragment_label(FragmentId.SFOk, k)
    lanes = sfo_lanes(phi)
    widths = lanes.widths()
    if any(w > k for w in widths):
        return _result(label, ('lane-width', ()), None, phi, 'lanes', widths=widths)
    _certified(label, lanes, check_lane_assignment(phi, lanes, k))
    return _result(label, None, lanes, phi, 'lanes', widths=widths)


def _fl(phi: Formula) -> MembershipResult:
    problem = fluted_violation(phi)
    witness = None
    if problem is None:
        witness = fluted_lanes(phi)
        _certified('FL', witness, check_lane_assignment(phi, witness, fluted=True))
    return _result('FL', problem, witness, phi, 'lanes')


def _sfl(phi: Formula) -> MembershipResult:
    try:
        lanes = sfl_lanes(phi)
    except LaneViolation as exc:
        return _result('SFL', (exc.rule, exc.path), None, phi, 'lanes')
    _certified('SFL', lanes, check_lane_assignment(phi, lanes, fluted=True))
    return _result('SFL', None, lanes, phi, 'lanes')


def _herzig(phi: Formula) -> MembershipResult:
    label = FragmentId.HerzigOrdered.value
    problem = herzig_violation(phi)
    witness = None
    if problem is None:
        witness = LaneAssignment(label, fluted_lanes(phi).labels)
        _certified(label, witness, check_lane_assignment(phi, witness, fluted=True))
    return _result(label, problem, witness, phi, 'lanes')


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def membership(
    phi: Formula,
    fragment: Union[FragmentId, str],
    k: Optional[int] = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    allow_constants: bool = True,
) -> MembershipResult:
    """Decide whether the sentence phi belongs to a fragment.

    Raises:
        FreeVariables: if phi has free variables.
        UnsupportedSyntax: for nodes or terms outside the supported syntax.
        ValueError: if k is missing for FOk/SFOk.
    """
    fragment = FragmentId(fragment)
    check_sentence(phi)
    if fragment in (FragmentId.FOk, FragmentId.SFOk):
        if k is None or k < 1:
            raise ValueError(f"{fragment.value} needs a positive number of variables")
        return _fok(phi, k) if fragment is FragmentId.FOk else _sfok(phi, k)
    if fragment in (FragmentId.MFO, FragmentId.MFOeq):
        return _mfo(phi, fragment)
    if fragment in _GUARD_FRAGMENTS:
        return annotate_guards(phi, _GUARD_FRAGMENTS[fragment])
    if fragment is FragmentId.MaslovK:
        return _maslov(phi)
    if fragment is FragmentId.FL:
        return _fl(phi)
    if fragment is FragmentId.SFL:
        return _sfl(phi)
    if fragment is FragmentId.HerzigOrdered:
        return _herzig(phi)
    pre = _Prenex.of(canonical_prenex(phi))
    if fragment is FragmentId.BSR:
        return _bsr(pre)
    if fragment is FragmentId.SF:
        return _sf(pre)
    if fragment is FragmentId.SBSR:
        return find_sbsr_partition(pre.formula)
    if fragment in (FragmentId.AF, FragmentId.GKS):
        return _ackermann_like(pre, fragment)
    if fragment is FragmentId.SAF:
        return _grouped_membership(pre, 'SAF', 1, exhaustive_limit, allow_constants)
    return _grouped_membership(pre, 'SGKS', 2, exhaustive_limit, allow_constants)


def _relabeled_partition(kind: str) -> Callable[[MembershipResult, Formula], Optional[Witness]]:
    def derive(parent: MembershipResult, subject: Formula) -> Optional[Witness]:
        p = parent.witness
        assert isinstance(p, VariablePartition)
        partition = VariablePartition(p.classes, kind, p.auxiliary)
        max_group = 1 if kind == 'SAF' else 2
        if _check_grouped(subject, partition, max_group, True) is not None:
            return None
        return partition
    return derive


def _relabeled_guards(mode: str) -> Callable[[MembershipResult, Formula], Optional[Witness]]:
    def derive(parent: MembershipResult, subject: Formula) -> Optional[Witness]:
        a = parent.witness
        assert isinstance(a, GuardAnnotation)
        guards = {}
        for path, info in a.guards.items():
            if info.kind == NEGATION and not info.division and mode == SGNFO:
                share = tuple(sorted(free_vars(info.body)))
                z = tuple(sorted(set(bound_vars(info.body))))
                info = GuardInfo(info.kind, (), info.guard, info.body, (), ((share, z),))
            guards[path] = info
        annotation = GuardAnnotation(mode, guards)
        if check_guard_annotation(subject, annotation) is not None:
            return None
        return annotation
    return derive


def _sbsr_from_sf(parent: MembershipResult, subject: Formula) -> Optional[Witness]:
    return sf_sbsr_partition(subject)


def _k_from_saf(parent: MembershipResult, subject: Formula) -> Optional[Witness]:
    return VariablePartition({'K': []}, 'MaslovK')


def _sfl_from_lanes(parent: MembershipResult, subject: Formula) -> Optional[Witness]:
    lanes = parent.witness
    assert isinstance(lanes, LaneAssignment)
    witness = LaneAssignment('SFL', lanes.labels)
    if check_lane_assignment(subject, witness, fluted=True) is not None:
        return None
    return witness


Derivation = Callable[[MembershipResult, Formula], Optional[Witness]]

# fragment -> parents whose positive verdict implies it, with a witness transfer
_CONTAINMENTS: Dict[FragmentId, List[Tuple[FragmentId, Derivation]]] = {
    FragmentId.SBSR: [(FragmentId.SF, _sbsr_from_sf)],
    FragmentId.SAF: [(FragmentId.AF, _relabeled_partition('SAF'))],
    FragmentId.SGKS: [
        (FragmentId.SAF, _relabeled_partition('SGKS')),
        (FragmentId.GKS, _relabeled_partition('SGKS')),
    ],
    FragmentId.MaslovK: [(FragmentId.SAF, _k_from_saf)],
    FragmentId.SGF: [(FragmentId.GF, _relabeled_guards(SGF))],
    FragmentId.SLGF: [
        (FragmentId.SGF, _relabeled_guards(SLGF)),
        (FragmentId.LGF, _relabeled_guards(SLGF)),
    ],
    FragmentId.SGNFO: [(FragmentId.GNFO, _relabeled_guards(SGNFO))],
    FragmentId.SFL: [
        (FragmentId.FL, _sfl_from_lanes),
        (FragmentId.HerzigOrdered, _sfl_from_lanes),
    ],
}

_ORDER = [
    FragmentId.MFO, FragmentId.MFOeq, FragmentId.BSR, FragmentId.SF, FragmentId.SBSR,
    FragmentId.AF, FragmentId.SAF, FragmentId.GKS, FragmentId.SGKS, FragmentId.MaslovK,
    FragmentId.GF, FragmentId.SGF, FragmentId.LGF, FragmentId.SLGF, FragmentId.GNFO,
    FragmentId.SGNFO, FragmentId.FL, FragmentId.HerzigOrdered, FragmentId.SFL,
]


def classify(
    phi: Formula,
    levels: Sequence[int] = DEFAULT_LEVELS,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    allow_constants: bool = True,
    on_result: Optional[Callable[[MembershipResult], None]] = None,
) -> ClassificationReport:
    """Membership in every fragment, FOk and SFOk for each k in levels.

    A fragment whose sub-fragment already holds takes over that witness
    (engine 'containment') instead of running its own search.

    Args:
        on_result: Optional callback invoked with each result as it is decided.
    """
    check_sentence(phi)
    report = ClassificationReport()

    def record(result: MembershipResult) -> None:
        report.results[result.fragment] = result
        if on_result:
            on_result(result)

    for fragment in _ORDER:
        derived = None
        for parent_id, derive in _CONTAINMENTS.get(fragment, []):
            parent = report.results.get(parent_id.value)
            if parent is None or not parent.verdict or parent.subject is None:
                continue
            witness = derive(parent, parent.subject)
            if witness is not None:
                derived = MembershipResult(
                    fragment.value, True, witness, None, 'containment', parent.subject,
                    {'derived_from': parent_id.value},
                )
                break
        record(derived or membership(phi, fragment, None, exhaustive_limit, allow_constants))
    for k in levels:
        record(membership(phi, FragmentId.FOk, k))
    for k in levels:
        record(membership(phi, FragmentId.SFOk, k))
    return report


# ---------------------------------------------------------------------------
# Embedding MFO sentences
# ---------------------------------------------------------------------------

def _trivial_guards(phi: Formula) -> Formula:
    if isinstance(phi, Forall):
        body = _trivial_guards(phi.body)
        for name in reversed(phi.vars):
            body = Forall((name,), Implies(Eq(Var(name), Var(name)), body))
        return body
    if isinstance(phi, Exists):
        body = _trivial_guards(phi.body)
        for name in reversed(phi.vars):
            body = Exists((name,), conj([Eq(Var(name), Var(name)), body]))
        return body
    if isinstance(phi, (Not, And, Or, Implies, Iff)):
        return with_children(phi, tuple(_trivial_guards(c) for c in children(phi)))
    return phi


def _reflexive(names: Sequence[VarName]) -> List[Formula]:
    return [Eq(Var(n), Var(n)) for n in sorted(names)]


def _as_guarded_negation(phi: Formula) -> Formula:
    """GNFO shape of an NNF formula: exists, and, or, and guarded negation only."""
    if isinstance(phi, Not):
        return conj(_reflexive(atom_vars(phi.body)) + [phi])
    if isinstance(phi, (And, Or)):
        parts = [_as_guarded_negation(p) for p in phi.parts]
        return conj(parts) if isinstance(phi, And) else disj(parts)
    if isinstance(phi, Exists):
        return quantify(EXISTS, phi.vars, _as_guarded_negation(phi.body))
    if isinstance(phi, Forall):
        core = Not(quantify(EXISTS, phi.vars, _as_guarded_negation(to_nnf(phi.body, True))))
        return conj(_reflexive(free_vars(phi)) + [core])
    return phi


def embed_mfo(phi: Formula, target: Union[FragmentId, str]) -> Formula:
    """Equivalent copy of an MFO sentence inside SGF, SGNFO or SFL.

    SGF gets trivial guards v = v on every quantifier, SGNFO rewrites universal
    quantifiers as negated existentials guarded by trivial equations, SFL
    renames every bound variable into its own lane.

    Raises:
        NotMFO: if phi is not an MFO sentence.
        ValueError: for any other target.
    """
    target = FragmentId(target)
    base = membership(phi, FragmentId.MFO)
    if not base.verdict:
        raise NotMFO(f"Not an MFO sentence: {base.describe()}", base)
    subject = rectify(phi)
    if target is FragmentId.SGF:
        result = _trivial_guards(subject)
    elif target is FragmentId.SGNFO:
        result = _as_guarded_negation(to_nnf(subject))
    elif target is FragmentId.SFL:
        order = [
            Binder(path, position, kind_of(node), name)
            for path, node in walk(subject) if isinstance(node, (Forall, Exists))
            for position, name in enumerate(node.vars)
        ]
        result = rename_binders(subject, {b: f"x{i}_1" for i, b in enumerate(order, start=1)})
    else:
        raise ValueError(f"MFO embeds into SGF, SGNFO or SFL, not {target.value}")
    check = membership(result, target)
    if not check.verdict:
        raise WitnessRejected(f"Embedding into {target.value} failed: {check.describe()}")
    return result
