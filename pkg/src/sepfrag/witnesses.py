"""Succinctness witness families, their explicit models and gap metrics.

Every family is a variant of

    forall x_n exists y_n ... forall x_1 exists y_1. AND_i (P_i(x_1..x_n) <-> Q_i(y_1..y_n))

whose models are built from layers of sets: layer 1 holds the half-size
subsets of the colors 1..m, layer k+1 the half-size subsets of layer k.
Every set S of layer k contributes an element a^(k)_S on the P side and
b^(k)_S on the Q side. Sets of layer k > 1 are stored as frozensets of
indices into layer k - 1.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import comb
from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple
from typing import Union

from .ackermann import PairCellsOverlap
from .fragments import FragmentId
from .normal_forms import BudgetExceeded
from .semantics import FiniteStructure, evaluate, induced_substructure
from .separateness import NotPrenex
from .syntax import (
    EXISTS,
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    SepfragError,
    TwoupOverflow,
    Var,
    conj,
    disj,
    formula_len,
    is_prenex,
    prefix_blocks,
    twoup,
)
from .transforms import BlowupBudget, translate

DEFAULT_MODEL_CAP = 10 ** 4


class NBelowMinimum(SepfragError):
    """The family is only defined from a larger parameter on."""


class CapExceeded(SepfragError):
    """The explicit model would have more elements than allowed.

    Attributes:
        required: Lower bound on the number of elements the model needs.
    """

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class NoSuchElement(SepfragError):
    """The requested layer or set does not name an element of the model."""


class ModelCheckFailed(SepfragError):
    """A constructed model does not satisfy its witness sentence."""


class WitnessFamily(str, Enum):
    """Sentence families behind the succinctness gaps."""
    SF_BSR = 'sf_bsr'
    MFO_BSR = 'mfo_bsr'
    SGKS_GKS = 'sgks_gks'
    SGF_LGF = 'sgf_lgf'
    SGNFO_GNFO = 'sgnfo_gnfo'
    SFO2_FO2 = 'sfo2_fo2'


@dataclass(frozen=True)
class _Shape:
    minimum: int
    source: FragmentId
    k: Optional[int]
    colors: Callable[[int], int]
    first: Callable[[int], int]
    depth: Callable[[int], int]


_SHAPES: Dict[WitnessFamily, _Shape] = {
    WitnessFamily.SF_BSR: _Shape(1, FragmentId.SF, None, lambda n: 4 * n, lambda n: 2 * n,
                                 lambda n: n),
    WitnessFamily.MFO_BSR: _Shape(1, FragmentId.SF, None, lambda n: 2 * n, lambda n: n,
                                  lambda n: 1),
    WitnessFamily.SGKS_GKS: _Shape(1, FragmentId.SGKS, None, lambda n: 8 * n, lambda n: 2 * n,
                                   lambda n: 2),
    WitnessFamily.SGF_LGF: _Shape(3, FragmentId.SLGF, None, lambda n: 4 * n, lambda n: 2 * n,
                                  lambda n: n),
    WitnessFamily.SGNFO_GNFO: _Shape(3, FragmentId.SGNFO, None, lambda n: 4 * n,
                                     lambda n: 2 * n, lambda n: n),
    WitnessFamily.SFO2_FO2: _Shape(1, FragmentId.SFOk, 2, lambda n: 2 * (n + 1),
                                   lambda n: n + 1, lambda n: 2),
}


def source_fragment(family: WitnessFamily) -> Tuple[FragmentId, Optional[int]]:
    """Separated fragment the family's sentences belong to, with k for SFO^k."""
    shape = _SHAPES[WitnessFamily(family)]
    return shape.source, shape.k


# ---------------------------------------------------------------------------
# Sentences
# ---------------------------------------------------------------------------

def _atom(pred: str, prefix: str, first: int, last: int, arity: Optional[int]) -> Atom:
    """pred(prefix_first, ..., prefix_last), cut down to its first arity arguments."""
    if arity is not None:
        last = min(last, first + arity - 1)
    return Atom(pred, tuple(Var(f"{prefix}{i}") for i in range(first, last + 1)))


def _matrix(colors: int, depth: int, arity: Optional[int]) -> List[Formula]:
    return [
        Iff(_atom(f"P{i}", 'x', 1, depth, arity), _atom(f"Q{i}", 'y', 1, depth, arity))
        for i in range(1, colors + 1)
    ]


def _alternating(depth: int, body: Formula) -> Formula:
    for j in range(1, depth + 1):
        body = Forall((f"x{j}",), Exists((f"y{j}",), body))
    return body


def _mfo(n: int) -> Formula:
    matrix = [
        Iff(Atom(f"P{i}", (Var('x'),)), Atom(f"Q{i}", (Var('y'),))) for i in range(1, 2 * n + 1)
    ]
    return Forall(('x',), Exists(('y',), conj(matrix)))


def _guarded(n: int, arity: Optional[int]) -> Formula:
    body = conj(_matrix(4 * n, n, arity))
    for j in range(1, n + 1):
        body = Exists((f"y{j}",), conj([_atom(f"T{j}", 'y', j, n, arity), body]))
        body = Forall((f"x{j}",), Implies(_atom(f"R{j}", 'x', j, n, arity), body))
    return body


def _guarded_negation(n: int, arity: Optional[int]) -> Formula:
    """Every universal written as a negated existential under separated negation guards."""
    def r(j: int) -> Atom:
        return _atom(f"R{j}", 'x', j, n, arity)

    def t(j: int) -> Atom:
        return _atom(f"T{j}", 'y', j, n, arity)

    p = [_atom(f"P{i}", 'x', 1, n, arity) for i in range(1, 4 * n + 1)]
    q = [_atom(f"Q{i}", 'y', 1, n, arity) for i in range(1, 4 * n + 1)]
    matrix = conj(
        disj((conj([r(1), t(1), pi, qi]), conj([r(1), t(1), Not(disj((pi, qi)))])))
        for pi, qi in zip(p, q)
    )
    body: Formula = matrix
    for j in range(1, n + 1):
        body = Exists((f"y{j}",), conj([r(j), t(j), body]))
        outer = [r(j)] + ([t(j + 1)] if j < n else [])
        body = Not(Exists((f"x{j}",), conj(outer + [Not(body)])))
    return Exists(('z',), conj([Eq(Var('z'), Var('z')), body]))


def gen_witness(family: WitnessFamily, n: int, arity: Optional[int] = None) -> Formula:
    """Witness sentence of the family for parameter n.

    Args:
        arity: Cut every atom down to its first ``arity`` arguments. Such
            variants are derived material for the oracle; they accept any
            n >= 1.

    Raises:
        NBelowMinimum: if n is below the family's minimum and no arity is given.
    """
    family = WitnessFamily(family)
    shape = _SHAPES[family]
    minimum = 1 if arity is not None else shape.minimum
    if n < minimum:
        raise NBelowMinimum(f"{family.value} is defined for n >= {minimum}, got {n}")
    if arity is not None and arity < 1:
        raise ValueError(f"Arity must be positive, got {arity}")
    if family is WitnessFamily.MFO_BSR:
        return _mfo(n)
    if family is WitnessFamily.SGF_LGF:
        return _guarded(n, arity)
    if family is WitnessFamily.SGNFO_GNFO:
        return _guarded_negation(n, arity)
    depth = shape.depth(n)
    return _alternating(depth, conj(_matrix(shape.colors(n), depth, arity)))


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

Layer = List[FrozenSet[int]]


def layer_sizes(family: WitnessFamily, n: int, cap: Optional[int] = None) -> List[int]:
    """Number of sets per layer.

    Raises:
        CapExceeded: once twice the running total passes cap; ``required``
            is the total counted so far.
    """
    shape = _SHAPES[WitnessFamily(family)]
    sizes: List[int] = []
    previous, half = shape.colors(n), shape.first(n)
    for level in range(shape.depth(n)):
        size = comb(previous, half)
        sizes.append(size)
        if cap is not None and 2 * sum(sizes) > cap:
            raise CapExceeded(
                f"{WitnessFamily(family).value} model for n={n} needs more than "
                f"{2 * sum(sizes)} elements (layer {level + 1} alone has {size} sets), cap {cap}",
                2 * sum(sizes),
            )
        previous, half = size, size // 2
    return sizes


def _layers(shape: _Shape, n: int) -> List[Layer]:
    layers: List[Layer] = [
        [frozenset(c) for c in combinations(range(1, shape.colors(n) + 1), shape.first(n))]
    ]
    while len(layers) < shape.depth(n):
        below = len(layers[-1])
        layers.append([frozenset(c) for c in combinations(range(below), below // 2)])
    return layers


def _chains(layers: List[Layer], start: int) -> Iterator[Tuple[int, ...]]:
    """Index tuples (i_start, ..., i_top) with each set a member of the next one."""
    top = len(layers) - 1

    def down(level: int, chosen: List[int]) -> Iterator[Tuple[int, ...]]:
        if level < start:
            yield tuple(reversed(chosen))
            return
        pool = range(len(layers[level])) if level == top else sorted(layers[level + 1][chosen[-1]])
        for index in pool:
            yield from down(level - 1, chosen + [index])

    return down(top, [])


@dataclass
class WitnessModel:
    """Explicit model of a witness sentence together with its element labels.

    Elements are numbered a-elements first, layer by layer, then
    b-elements in the same order.
    """
    family: WitnessFamily
    n: int
    layers: List[Layer]
    structure: FiniteStructure
    offsets: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.offsets:
            total = 0
            for layer in self.layers:
                self.offsets.append(total)
                total += len(layer)

    @property
    def half(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def _index(self, k: int, subset: Iterable[int]) -> int:
        if not 1 <= k <= len(self.layers):
            raise NoSuchElement(f"No layer {k}; the model has {len(self.layers)}")
        key = frozenset(subset)
        try:
            return self.layers[k - 1].index(key)
        except ValueError:
            raise NoSuchElement(f"{sorted(key)} is not a set of layer {k}") from None

    def a_element(self, k: int, subset: Iterable[int]) -> int:
        index = self._index(k, subset)
        return self.offsets[k - 1] + index

    def b_element(self, k: int, subset: Iterable[int]) -> int:
        index = self._index(k, subset)
        return self.half + self.offsets[k - 1] + index

    def b_elements(self) -> Iterator[Tuple[int, FrozenSet[int]]]:
        """(layer, set) for every b-element."""
        for k, layer in enumerate(self.layers, start=1):
            for subset in layer:
                yield k, subset

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return {
            'family': self.family.value,
            'n': self.n,
            'layer_sizes': [len(layer) for layer in self.layers],
            'structure': self.structure.to_dict(),
        }


def _relation(chains: Iterable[Tuple[int, ...]], element: Callable[[int, int], int],
              start: int) -> FrozenSet[Tuple[int, ...]]:
    return frozenset(
        tuple(element(start + offset, index) for offset, index in enumerate(chain))
        for chain in chains
    )


def gen_witness_model(family: WitnessFamily, n: int, cap: int = DEFAULT_MODEL_CAP
                      ) -> WitnessModel:
    """Explicit model of gen_witness(family, n).

    The families whose smallest admissible n is above n are built as the model of
    their derived variant ``gen_witness(family, n, arity=n)``.

    Raises:
        CapExceeded: if the domain would exceed cap.
        ModelCheckFailed: if the structure does not satisfy the sentence.
    """
    family = WitnessFamily(family)
    shape = _SHAPES[family]
    layer_sizes(family, n, cap)
    layers = _layers(shape, n)
    depth = len(layers)
    offsets = [sum(len(layer) for layer in layers[:level]) for level in range(depth)]
    half = sum(len(layer) for layer in layers)

    def a(level: int, index: int) -> int:
        return offsets[level] + index

    def b(level: int, index: int) -> int:
        return half + offsets[level] + index

    full = list(_chains(layers, 0))
    relations: Dict[str, FrozenSet[Tuple[int, ...]]] = {}
    for i in range(1, shape.colors(n) + 1):
        colored = [c for c in full if i in layers[0][c[0]]]
        relations[f"P{i}"] = _relation(colored, a, 0)
        relations[f"Q{i}"] = _relation(colored, b, 0)
    if family in (WitnessFamily.SGF_LGF, WitnessFamily.SGNFO_GNFO):
        for j in range(1, depth + 1):
            chains = list(_chains(layers, j - 1))
            relations[f"R{j}"] = _relation(chains, a, j - 1)
            relations[f"T{j}"] = _relation(chains, b, j - 1)

    structure = FiniteStructure(2 * half, relations)
    sentence = gen_witness(family, n, arity=n if n < shape.minimum else None)
    if not evaluate(structure, sentence):
        raise ModelCheckFailed(f"Constructed {family.value} model for n={n} fails its sentence")
    return WitnessModel(family, n, layers, structure, offsets)


def drop_b_element(model: WitnessModel, k: int, subset: Iterable[int]) -> FiniteStructure:
    """Substructure of the model without b^(k)_S.

    Raises:
        NoSuchElement: if (k, subset) does not name a b-element.
    """
    dropped = model.b_element(k, subset)
    keep = [e for e in range(model.structure.domain_size) if e != dropped]
    return induced_substructure(model.structure, keep)


# ---------------------------------------------------------------------------
# Gap metrics
# ---------------------------------------------------------------------------

def count_leading_existentials(phi: Formula) -> int:
    """Length of the maximal existential block at the front of a prenex sentence.

    Raises:
        NotPrenex: if phi is not prenex.
    """
    if not is_prenex(phi):
        raise NotPrenex("Leading existentials are counted on prenex sentences")
    blocks, _ = prefix_blocks(phi)
    return len(blocks[0].vars) if blocks and blocks[0].kind == EXISTS else 0


def theoretical_bound(family: WitnessFamily, n: int) -> Union[int, str]:
    """Known lower bound on the length of any equivalent base-fragment sentence.

    Leading existentials for SF_BSR and MFO_BSR, length otherwise. Values
    beyond the tetration cap come back as symbolic strings.
    """
    family = WitnessFamily(family)
    try:
        if family is WitnessFamily.SF_BSR:
            return sum(twoup(k, n) for k in range(1, n + 1))
        if family in (WitnessFamily.SGF_LGF, WitnessFamily.SGNFO_GNFO):
            return twoup(n - 1, n)
    except TwoupOverflow:
        if family is WitnessFamily.SF_BSR:
            return f"sum(2^^k {n} for k=1..{n})"
        return f"2^^{n - 1} {n}"
    return 2 ** n


@dataclass
class GapRow:
    """One line of the gap table.

    Attributes:
        status: 'ok', 'budget-exceeded', 'pair-cells-overlap' or
            'n-below-minimum'.
        target_len: Length of the translation, None unless status is 'ok'.
        leading_exists: Leading existentials of a prenex translation.
    """
    family: WitnessFamily
    n: int
    source_len: Optional[int]
    target_len: Optional[int]
    leading_exists: Optional[int]
    theoretical_bound: Union[int, str]
    status: str = 'ok'
    steps: int = 0

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        result: Dict[str, Any] = {
            'family': self.family.value,
            'n': self.n,
            'source_len': self.source_len,
            'target_len': self.target_len,
            'leading_exists': self.leading_exists,
            'theoretical_bound': self.theoretical_bound,
            'status': self.status,
            'steps': self.steps,
        }
        return result


def gap_row(family: WitnessFamily, n: int, budget: Optional[BlowupBudget] = None) -> GapRow:
    """Translate the n-th witness and measure the result."""
    family = WitnessFamily(family)
    bound = theoretical_bound(family, n)
    try:
        phi = gen_witness(family, n)
    except NBelowMinimum:
        return GapRow(family, n, None, None, None, bound, 'n-below-minimum')
    source, k = source_fragment(family)
    row = GapRow(family, n, formula_len(phi), None, None, bound)
    try:
        result = translate(phi, source, k=k, budget=budget)
    except BudgetExceeded as exc:
        row.status, row.steps = 'budget-exceeded', len(exc.trace)
        return row
    except PairCellsOverlap:
        row.status = 'pair-cells-overlap'
        return row
    row.target_len = result.target_len
    row.steps = len(result.history)
    if is_prenex(result.target):
        row.leading_exists = count_leading_existentials(result.target)
    return row


def gap_report(
    family: WitnessFamily,
    n_values: Iterable[int],
    budget: Optional[BlowupBudget] = None,
    on_row: Optional[Callable[[GapRow], None]] = None,
) -> List[GapRow]:
    """Gap table rows for each n; rows that blow the budget are marked and the run goes on."""
    rows: List[GapRow] = []
    for n in n_values:
        row = gap_row(family, n, budget)
        rows.append(row)
        if on_row:
            on_row(row)
    return rows
