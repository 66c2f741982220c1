"""Finite structures, truth evaluation and bounded model search.

Formulas are evaluated as boolean numpy tensors with one axis per free
variable, so a quantifier block is a reduction (``all``/``any``) over its
axes. Blocks whose tensors would grow past MAX_TABLE_CELLS cells or
MAX_TABLE_DIMS axes are iterated element by element instead.
"""

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import product
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .ackermann import PairCellsOverlap
from .fragments import FragmentId, NotBSR, NotSF, check_sentence, membership
from .syntax import (
    EXISTS,
    FORALL,
    And,
    Atom,
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
    SepfragError,
    Term,
    Truth,
    TwoupOverflow,
    Var,
    VarName,
    Vocabulary,
    children,
    conj,
    constants_of,
    disj,
    formula_len,
    free_vars,
    predicates_of,
    prefix_blocks,
    quantify,
    twoup,
    with_children,
)
from .separateness import DisjointSets
from .transforms import TARGETS, BlowupBudget, ShapeMismatch, translate

Assignment = Mapping[VarName, int]
Tuples = FrozenSet[Tuple[int, ...]]

SAT = 'SAT'
UNSAT = 'UNSAT'
UNKNOWN = 'UNKNOWN'

MAX_TABLE_CELLS = 1 << 22
# numpy 1.x arrays have at most 32 axes
MAX_TABLE_DIMS = 32
DEFAULT_MAX_SIZE = 3
DEFAULT_STRUCTURE_BUDGET = 10 ** 6
DEFAULT_SAMPLES = 10 ** 4
DEFAULT_MAX_MODEL_SIZE = 4


class UnboundVariable(SepfragError):
    """A free variable of the formula has no value in the assignment."""


class VocabularyMismatch(SepfragError):
    """The formula uses a symbol the structure does not interpret, or with another arity."""


class EmptyS(SepfragError):
    """An induced substructure was requested for the empty set."""


class ConstantOutsideS(SepfragError):
    """A constant is interpreted outside the set inducing a substructure."""


@dataclass
class FiniteStructure:
    """Structure over the domain 0..domain_size-1.

    Attributes:
        domain_size: Number of elements.
        relations: Predicate symbol -> set of tuples.
        constant_map: Constant symbol -> element.
        arities: Predicate arities; inferred from the tuples when omitted.
            Empty relations of unknown arity fit any atom.
    """
    domain_size: int
    relations: Dict[str, Tuples]
    constant_map: Dict[str, int] = field(default_factory=dict)
    arities: Dict[str, int] = field(default_factory=dict)
    _tensors: Dict[str, np.ndarray] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.domain_size < 1:
            raise ValueError(f"Domain size must be positive, got {self.domain_size}")
        self.relations = {name: frozenset(t) for name, t in self.relations.items()}
        self.arities = dict(self.arities)
        for name, tuples in self.relations.items():
            lengths = {len(t) for t in tuples}
            if name in self.arities:
                lengths.add(self.arities[name])
            if len(lengths) > 1:
                raise ValueError(f"Relation {name} mixes arities {sorted(lengths)}")
            if lengths:
                self.arities[name] = lengths.pop()
            if any(v < 0 or v >= self.domain_size for t in tuples for v in t):
                raise ValueError(f"Relation {name} has a tuple outside the domain")
        for name, value in self.constant_map.items():
            if not 0 <= value < self.domain_size:
                raise ValueError(f"Constant {name} mapped outside the domain")

    @classmethod
    def from_tensors(
        cls, domain_size: int, tensors: Mapping[str, np.ndarray], constant_map: Mapping[str, int]
    ) -> 'FiniteStructure':
        """Build a structure from boolean tensors of shape (domain_size,) * arity."""
        relations = {
            name: frozenset(tuple(int(v) for v in row) for row in np.argwhere(table))
            for name, table in tensors.items()
        }
        structure = cls(
            domain_size, relations, dict(constant_map),
            {name: table.ndim for name, table in tensors.items()},
        )
        structure._tensors.update({name: np.asarray(t, dtype=bool) for name, t in tensors.items()})
        return structure

    @property
    def vocabulary(self) -> Vocabulary:
        return Vocabulary(dict(self.arities), frozenset(self.constant_map))

    def tensor(self, name: str, arity: int) -> np.ndarray:
        """Boolean membership tensor of a relation, cached per predicate."""
        cached = self._tensors.get(name)
        if cached is not None and cached.ndim == arity:
            return cached
        table = np.zeros((self.domain_size,) * arity, dtype=bool)
        for row in self.relations.get(name, ()):
            table[row] = True
        self._tensors[name] = table
        return table

    def check_vocabulary(self, phi: Formula) -> None:
        """Raise VocabularyMismatch unless every symbol of phi is interpreted."""
        for name, arity in predicates_of(phi).items():
            if name not in self.relations:
                raise VocabularyMismatch(f"Structure does not interpret predicate {name}")
            if self.arities.get(name, arity) != arity:
                raise VocabularyMismatch(
                    f"Predicate {name} has arity {self.arities[name]} in the structure, "
                    f"{arity} in the formula"
                )
        missing = sorted(constants_of(phi) - set(self.constant_map))
        if missing:
            raise VocabularyMismatch(f"Structure does not interpret constants {missing}")

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'domain_size': self.domain_size,
            'relations': {
                name: [list(t) for t in sorted(tuples)]
                for name, tuples in sorted(self.relations.items())
            },
            'constants': dict(sorted(self.constant_map.items())),
        }


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

Table = Tuple[Tuple[VarName, ...], np.ndarray]


def _term_index(term: Term, names: Tuple[VarName, ...], structure: FiniteStructure,
                env: Assignment) -> Union[int, np.ndarray]:
    if isinstance(term, Const):
        return structure.constant_map[term.name]
    if term.name in env:
        return env[term.name]
    shape = [1] * len(names)
    position = names.index(term.name)
    shape[position] = structure.domain_size
    return np.arange(structure.domain_size).reshape(shape)


def _lookup(table: np.ndarray, args: Sequence[Term], structure: FiniteStructure,
            env: Assignment) -> Table:
    names = tuple(dict.fromkeys(
        t.name for t in args if isinstance(t, Var) and t.name not in env
    ))
    index = tuple(_term_index(t, names, structure, env) for t in args)
    values = np.asarray(table[index])
    return names, np.broadcast_to(values, (structure.domain_size,) * len(names))


def _expand(table: Table, target: Tuple[VarName, ...]) -> np.ndarray:
    """Values of table with axes reordered to target; absent variables get length-1 axes."""
    names, values = table
    if not names:
        return np.asarray(values).reshape([1] * len(target))
    order = sorted(range(len(names)), key=lambda i: target.index(names[i]))
    values = np.transpose(values, order)
    present = set(names)
    return values.reshape([values.shape[0] if v in present else 1 for v in target])


def _combine(tables: List[Table], op: Callable[[np.ndarray, np.ndarray], np.ndarray],
             size: int) -> Table:
    target = tuple(dict.fromkeys(v for names, _ in tables for v in names))
    merged = reduce(op, [_expand(t, target) for t in tables])
    return target, np.broadcast_to(merged, (size,) * len(target))


_JOIN: Dict[type, Callable[[Iterable[Formula]], Formula]] = {And: conj, Or: disj}


def _push_block(kind: str, names: Sequence[VarName], body: Formula) -> Formula:
    """Block kind names over body, bound on the smallest parts that need it.

    A universal spreads over a conjunction and splits a disjunction into
    groups of parts linked by shared block variables; existentials dually.
    """
    names = [v for v in dict.fromkeys(names) if v in free_vars(body)]
    if not names:
        return body
    spread, split = (And, Or) if kind == FORALL else (Or, And)
    if isinstance(body, spread):
        return _JOIN[spread](_push_block(kind, names, p) for p in body.parts)
    if isinstance(body, split):
        owned = [free_vars(p) & set(names) for p in body.parts]
        links = DisjointSets(range(len(body.parts)))
        for name in names:
            links.union_all(i for i, mine in enumerate(owned) if name in mine)
        groups: Dict[Hashable, List[int]] = {}
        for i in range(len(body.parts)):
            if owned[i]:
                groups.setdefault(links.find(i), []).append(i)
        outside = [p for p, mine in zip(body.parts, owned) if not mine]
        if len(groups) > 1 or outside:
            pushed = [
                _push_block(kind, [v for v in names if any(v in owned[i] for i in group)],
                            _JOIN[split](body.parts[i] for i in group))
                for group in groups.values()
            ]
            return _JOIN[split](outside + pushed)
    return quantify(kind, names, body)


def _pushed_in(phi: Formula) -> Formula:
    if isinstance(phi, (Forall, Exists)):
        kind = FORALL if isinstance(phi, Forall) else EXISTS
        return _push_block(kind, phi.vars, _pushed_in(phi.body))
    kids = children(phi)
    if not kids:
        return phi
    return with_children(phi, tuple(_pushed_in(k) for k in kids))


@lru_cache(maxsize=64)
def evaluation_form(phi: Formula) -> Formula:
    """phi with every quantifier block pushed onto the parts that mention it.

    Equivalent to phi over nonempty domains; the evaluator works on this form
    so that long prenex blocks become many small tensors.
    """
    return _pushed_in(phi)


def _quantified(phi: Union[Forall, Exists], structure: FiniteStructure, env: Dict[VarName, int]
                ) -> Table:
    size = structure.domain_size
    open_vars = free_vars(phi.body) - set(env)
    bound = [v for v in phi.vars if v in open_vars]
    if not bound:
        return _table(phi.body, structure, env)
    if len(open_vars) <= MAX_TABLE_DIMS and size ** len(open_vars) <= MAX_TABLE_CELLS:
        names, values = _table(phi.body, structure, env)
        axes = tuple(names.index(v) for v in bound)
        reduced = values.all(axis=axes) if isinstance(phi, Forall) else values.any(axis=axes)
        return tuple(v for v in names if v not in bound), np.asarray(reduced)
    # Too wide for one tensor: fix the block's values one tuple at a time.
    rest = tuple(sorted(open_vars - set(bound)))
    universal = isinstance(phi, Forall)
    acc = np.full((size,) * len(rest), universal, dtype=bool)
    for values in product(range(size), repeat=len(bound)):
        inner = dict(env)
        inner.update(zip(bound, values))
        part = _expand(_table(phi.body, structure, inner), rest)
        acc = acc & part if universal else acc | part
        if not rest and bool(acc) != universal:
            break
    return rest, acc


def _table(phi: Formula, structure: FiniteStructure, env: Dict[VarName, int]) -> Table:
    size = structure.domain_size
    if isinstance(phi, Atom):
        return _lookup(structure.tensor(phi.pred, len(phi.args)), phi.args, structure, env)
    if isinstance(phi, Eq):
        return _lookup(np.eye(size, dtype=bool), (phi.left, phi.right), structure, env)
    if isinstance(phi, Truth):
        return (), np.asarray(True)
    if isinstance(phi, Falsity):
        return (), np.asarray(False)
    if isinstance(phi, Not):
        names, values = _table(phi.body, structure, env)
        return names, ~values
    if isinstance(phi, And):
        return _combine([_table(p, structure, env) for p in phi.parts], np.logical_and, size)
    if isinstance(phi, Or):
        return _combine([_table(p, structure, env) for p in phi.parts], np.logical_or, size)
    if isinstance(phi, Implies):
        left, right = _table(phi.left, structure, env), _table(phi.right, structure, env)
        return _combine([(left[0], ~left[1]), right], np.logical_or, size)
    if isinstance(phi, Iff):
        left, right = _table(phi.left, structure, env), _table(phi.right, structure, env)
        return _combine([left, right], np.equal, size)
    if isinstance(phi, (Forall, Exists)):
        return _quantified(phi, structure, env)
    raise TypeError(f"Unknown formula node {type(phi).__name__}")


def _checked_assignment(structure: FiniteStructure, phi: Formula,
                        beta: Optional[Assignment]) -> Dict[VarName, int]:
    structure.check_vocabulary(phi)
    env = dict(beta or {})
    missing = sorted(free_vars(phi) - set(env))
    if missing:
        raise UnboundVariable(f"No value for free variables {missing}")
    for name, value in env.items():
        if not 0 <= value < structure.domain_size:
            raise ValueError(f"Variable {name} assigned {value} outside the domain")
    return env


def evaluate(structure: FiniteStructure, phi: Formula, beta: Optional[Assignment] = None
             ) -> bool:
    """Truth value of phi in the structure under the assignment beta.

    Raises:
        UnboundVariable: if beta misses a free variable of phi.
        VocabularyMismatch: if the structure does not interpret a symbol of phi.
    """
    env = _checked_assignment(structure, phi, beta)
    _, values = _table(evaluation_form(phi), structure, env)
    return bool(values)


def _holds(phi: Formula, structure: FiniteStructure, env: Dict[VarName, int]) -> bool:
    def value(term: Term) -> int:
        if isinstance(term, Const):
            return structure.constant_map[term.name]
        return env[term.name]

    if isinstance(phi, Atom):
        return tuple(value(t) for t in phi.args) in structure.relations[phi.pred]
    if isinstance(phi, Eq):
        return value(phi.left) == value(phi.right)
    if isinstance(phi, Truth):
        return True
    if isinstance(phi, Falsity):
        return False
    if isinstance(phi, Not):
        return not _holds(phi.body, structure, env)
    if isinstance(phi, And):
        return all(_holds(p, structure, env) for p in phi.parts)
    if isinstance(phi, Or):
        return any(_holds(p, structure, env) for p in phi.parts)
    if isinstance(phi, Implies):
        return not _holds(phi.left, structure, env) or _holds(phi.right, structure, env)
    if isinstance(phi, Iff):
        return _holds(phi.left, structure, env) == _holds(phi.right, structure, env)
    if isinstance(phi, (Forall, Exists)):
        check = all if isinstance(phi, Forall) else any
        return check(
            _holds(phi.body, structure, {**env, **dict(zip(phi.vars, values))})
            for values in product(range(structure.domain_size), repeat=len(phi.vars))
        )
    raise TypeError(f"Unknown formula node {type(phi).__name__}")


def evaluate_reference(structure: FiniteStructure, phi: Formula,
                       beta: Optional[Assignment] = None) -> bool:
    """Truth value by direct recursion over the inductive definition.

    Slow, and kept as the independent check for ``evaluate``.
    """
    env = _checked_assignment(structure, phi, beta)
    return _holds(phi, structure, env)


def induced_substructure(structure: FiniteStructure, elements: Iterable[int]) -> FiniteStructure:
    """Substructure induced by a set of elements, relabeled 0..|S|-1 in increasing order.

    Raises:
        EmptyS: if elements is empty.
        ConstantOutsideS: if some constant is interpreted outside elements.
    """
    kept = sorted(set(elements))
    if not kept:
        raise EmptyS("Cannot induce a substructure on the empty set")
    if kept[0] < 0 or kept[-1] >= structure.domain_size:
        raise ValueError(f"Elements outside the domain 0..{structure.domain_size - 1}")
    relabel = {old: new for new, old in enumerate(kept)}
    outside = sorted(c for c, v in structure.constant_map.items() if v not in relabel)
    if outside:
        raise ConstantOutsideS(f"Constants {outside} are interpreted outside the set")
    relations = {
        name: frozenset(
            tuple(relabel[v] for v in t) for t in tuples if all(v in relabel for v in t)
        )
        for name, tuples in structure.relations.items()
    }
    constants = {c: relabel[v] for c, v in structure.constant_map.items()}
    return FiniteStructure(len(kept), relations, constants, dict(structure.arities))


# ---------------------------------------------------------------------------
# Enumeration and sampling
# ---------------------------------------------------------------------------

def structure_count(vocab: Vocabulary, size: int) -> int:
    """Number of structures over vocab with the given domain size."""
    count = size ** len(vocab.constants)
    for arity in vocab.predicates.values():
        count *= 2 ** (size ** arity)
    return count


def enumerate_structures(vocab: Vocabulary, size: int) -> Iterator[FiniteStructure]:
    """Every structure over vocab with domain 0..size-1, exactly once, in a fixed order.

    Relations vary in sorted predicate order, each as a bit mask over its
    tuples in lexicographic order; constants vary last.
    """
    if size < 1:
        raise ValueError(f"Domain size must be positive, got {size}")
    names = sorted(vocab.predicates)
    constants = sorted(vocab.constants)
    cells = [size ** vocab.predicates[p] for p in names]
    masks = [range(2 ** n) for n in cells]
    for choice in product(*masks):
        tensors = {
            p: ((mask >> np.arange(n)) & 1).astype(bool).reshape((size,) * vocab.predicates[p])
            for p, mask, n in zip(names, choice, cells)
        }
        for values in product(range(size), repeat=len(constants)):
            yield FiniteStructure.from_tensors(size, tensors, dict(zip(constants, values)))


def sample_structures(vocab: Vocabulary, size: int, count: int,
                      rng: np.random.Generator) -> Iterator[FiniteStructure]:
    """Random structures: every tuple in every relation independently with probability 1/2."""
    names = sorted(vocab.predicates)
    constants = sorted(vocab.constants)
    for _ in range(count):
        tensors = {p: rng.random((size,) * vocab.predicates[p]) < 0.5 for p in names}
        values = rng.integers(0, size, len(constants))
        yield FiniteStructure.from_tensors(
            size, tensors, {c: int(v) for c, v in zip(constants, values)}
        )


# ---------------------------------------------------------------------------
# Equivalence oracle
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceResult:
    """Outcome of a bounded equivalence check.

    ``equivalent`` means no distinguishing structure was found, never a proof.

    Attributes:
        equivalent: False when counterexample holds a distinguishing structure.
        counterexample: Structure where the two sentences disagree.
        checked: Number of structures evaluated.
        exhaustive_sizes: Domain sizes enumerated completely.
        sampled_sizes: Domain sizes covered by random samples.
        seed: Seed of the sampling generator.
    """
    equivalent: bool
    counterexample: Optional[FiniteStructure] = None
    checked: int = 0
    exhaustive_sizes: List[int] = field(default_factory=list)
    sampled_sizes: List[int] = field(default_factory=list)
    seed: int = 0

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        result: Dict[str, Any] = {
            'equivalent': self.equivalent,
            'checked': self.checked,
            'exhaustive_sizes': list(self.exhaustive_sizes),
            'sampled_sizes': list(self.sampled_sizes),
            'seed': self.seed,
        }
        if self.counterexample is not None:
            result['counterexample'] = self.counterexample.to_dict()
        return result


def equivalent_upto(
    phi: Formula,
    psi: Formula,
    max_size: int = DEFAULT_MAX_SIZE,
    budget: int = DEFAULT_STRUCTURE_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    on_size: Optional[Callable[[int, str, int], None]] = None,
) -> EquivalenceResult:
    """Look for a structure of size at most max_size telling phi and psi apart.

    Sizes are enumerated exhaustively while the running structure count
    stays within budget; larger sizes get ``samples`` random structures.
    The first counterexample in that order is returned.

    Args:
        on_size: Optional callback (size, 'exhaustive' | 'sampled', count)
            invoked before each domain size is checked.
    """
    check_sentence(phi)
    check_sentence(psi)
    vocab = Vocabulary.of(phi, psi)
    result = EquivalenceResult(True, seed=seed)
    rng = np.random.default_rng(seed)
    spent = 0
    for size in range(1, max_size + 1):
        count = structure_count(vocab, size)
        if spent + count <= budget:
            spent += count
            result.exhaustive_sizes.append(size)
            mode, structures = 'exhaustive', enumerate_structures(vocab, size)
        else:
            count = samples
            result.sampled_sizes.append(size)
            mode, structures = 'sampled', sample_structures(vocab, size, samples, rng)
        if on_size:
            on_size(size, mode, count)
        for structure in structures:
            result.checked += 1
            if evaluate(structure, phi) != evaluate(structure, psi):
                result.equivalent = False
                result.counterexample = structure
                return result
    return result


# ---------------------------------------------------------------------------
# Satisfiability
# ---------------------------------------------------------------------------

@dataclass
class SatResult:
    """Verdict of a satisfiability check.

    Attributes:
        verdict: SAT, UNSAT or UNKNOWN.
        model: A model of the input when verdict is SAT.
        bound_used: Largest domain size searched.
        method: Pipeline that decided, e.g. 'SF->BSR' or 'SAF->AF->bounded-search'.
        checked: Number of structures evaluated.
    """
    verdict: str
    model: Optional[FiniteStructure] = None
    bound_used: int = 0
    method: str = ''
    checked: int = 0

    def header(self) -> str:
        return f"{self.verdict} bound={self.bound_used} method={self.method}"

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        result: Dict[str, Any] = {
            'verdict': self.verdict,
            'bound_used': self.bound_used,
            'method': self.method,
            'checked': self.checked,
        }
        if self.model is not None:
            result['model'] = self.model.to_dict()
        return result


def _leading_existentials(prenex: Formula) -> int:
    blocks, _ = prefix_blocks(prenex)
    return len(blocks[0].vars) if blocks and blocks[0].kind == EXISTS else 0


def bsr_model_bound(phi: Formula) -> int:
    """max(|z| + k, 1) for a BSR sentence with |z| leading existentials and k constants.

    Raises:
        NotBSR: if phi is not in BSR.
    """
    check = membership(phi, FragmentId.BSR)
    if not check.verdict:
        raise NotBSR(f"Not a BSR sentence: {check.describe()}", check)
    assert check.subject is not None
    return max(_leading_existentials(check.subject) + len(constants_of(phi)), 1)


def sf_model_bound(phi: Formula) -> Union[int, str]:
    """Model size bound len + k * len^2 * (2^^k len)^k for an SF sentence with k alternations.

    Sentences without alternations are BSR and get the BSR bound. Past the
    tetration cap the bound comes back as a symbolic string.

    Raises:
        NotSF: if phi is not in SF.
    """
    check = membership(phi, FragmentId.SF)
    if not check.verdict:
        raise NotSF(f"Not an SF sentence: {check.describe()}", check)
    k = int(check.details.get('alternations', 0))
    if k == 0:
        assert check.subject is not None
        return bsr_model_bound(check.subject)
    length = formula_len(phi)
    try:
        tower = twoup(k, length)
    except TwoupOverflow:
        return f"{length} + {k}*{length}^2*(2^^{k} {length})^{k}"
    return length + k * length ** 2 * tower ** k


def _search(
    phi: Formula,
    bound: int,
    budget: Optional[int],
    method: str,
    complete: bool,
    on_size: Optional[Callable[[int, int], None]] = None,
    vocab: Optional[Vocabulary] = None,
) -> SatResult:
    if vocab is None:
        vocab = Vocabulary.of(phi)
    checked = 0
    for size in range(1, bound + 1):
        count = structure_count(vocab, size)
        if budget is not None and checked + count > budget:
            return SatResult(UNKNOWN, None, size - 1, method + ' (structure budget)', checked)
        if on_size:
            on_size(size, count)
        for structure in enumerate_structures(vocab, size):
            checked += 1
            if evaluate(structure, phi):
                return SatResult(SAT, structure, size, method, checked)
    return SatResult(UNSAT if complete else UNKNOWN, None, bound, method, checked)


def bsr_sat(
    phi: Formula,
    budget: Optional[int] = None,
    on_size: Optional[Callable[[int, int], None]] = None,
) -> SatResult:
    """Decide a BSR sentence by trying every structure up to its model bound.

    UNKNOWN only when the structure budget runs out before the bound.

    Raises:
        NotBSR: if phi is not in BSR.
    """
    return _search(phi, bsr_model_bound(phi), budget, 'BSR', True, on_size)


_TRANSLATED = (
    FragmentId.SAF, FragmentId.SGKS, FragmentId.SLGF, FragmentId.SGNFO, FragmentId.SFL,
)


def sat(
    phi: Formula,
    max_model_size: int = DEFAULT_MAX_MODEL_SIZE,
    budget: Optional[int] = DEFAULT_STRUCTURE_BUDGET,
    translation_budget: Optional[BlowupBudget] = None,
    on_size: Optional[Callable[[int, int], None]] = None,
) -> SatResult:
    """Satisfiability of a sentence.

    BSR, SF and SBSR sentences are decided through their BSR model bound.
    Everything else gets a bounded model search up to max_model_size that
    answers SAT or UNKNOWN, never UNSAT; members of a separated fragment
    are searched in their translation, or in themselves when the SGKS
    translation refuses them.

    Raises:
        BudgetExceeded: if the translation exceeds translation_budget.
    """
    check_sentence(phi)
    if membership(phi, FragmentId.BSR).verdict:
        result = bsr_sat(phi, budget, on_size)
    else:
        candidates = (FragmentId.SF, FragmentId.SBSR) + _TRANSLATED
        source = next((s for s in candidates if membership(phi, s).verdict), None)
        if source is FragmentId.SF or source is FragmentId.SBSR:
            target = translate(phi, source, budget=translation_budget).target
            method = f"{source.value}->BSR"
            result = _search(
                target, bsr_model_bound(target), budget, method, True, on_size,
                Vocabulary.of(phi, target),
            )
        elif source is not None:
            try:
                target = translate(phi, source, budget=translation_budget).target
            except PairCellsOverlap:
                result = _search(phi, max_model_size, budget, 'bounded-search', False, on_size)
            else:
                method = f"{source.value}->{TARGETS[source].value}->bounded-search"
                result = _search(
                    target, max_model_size, budget, method, False, on_size,
                    Vocabulary.of(phi, target),
                )
        else:
            result = _search(phi, max_model_size, budget, 'bounded-search', False, on_size)

    if result.model is not None and not evaluate(result.model, phi):
        raise ShapeMismatch(f"Model found through {result.method} does not satisfy the input")
    return result
