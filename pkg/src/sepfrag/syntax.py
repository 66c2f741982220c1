"""First-order formula representation and syntactic normal forms.

Formulas are immutable trees of frozen dataclasses. Quantifier nodes carry a
block of variables rather than a single variable; a singleton block is the
degenerate case. Every operation in this module is a pure function.

Subformulas are addressed by paths: tuples of child indices from the root.
Children are ordered as follows: ``Not`` and quantifiers have their body at
index 0, ``And``/``Or`` their parts in order, ``Implies``/``Iff`` left then
right.
"""

from dataclasses import dataclass, field
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Set,
    Tuple,
    Union,
)
import re

Path = Tuple[int, ...]
VarName = str

FORALL = 'forall'
EXISTS = 'exists'


class SepfragError(Exception):
    """Base class for every error raised by sepfrag."""


class NotRectified(SepfragError):
    """An operation that needs rectified input received a formula that is not."""


class CaptureRisk(SepfragError):
    """A substitution would capture a variable and auto-renaming is disabled."""


class TwoupOverflow(SepfragError):
    """A tetration value exceeds the configured magnitude cap."""


class NotASubformula(SepfragError):
    """A path does not address a subformula."""


class VocabularyError(SepfragError):
    """A vocabulary declaration is inconsistent."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """Variable occurrence."""
    name: VarName


@dataclass(frozen=True)
class Const:
    """Constant symbol occurrence."""
    name: str


Term = Union[Var, Const]


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...] = ()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Truth:
    pass


@dataclass(frozen=True)
class Falsity:
    pass


@dataclass(frozen=True)
class Not:
    body: 'Formula'


@dataclass(frozen=True)
class And:
    parts: Tuple['Formula', ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple['Formula', ...]


@dataclass(frozen=True)
class Implies:
    left: 'Formula'
    right: 'Formula'


@dataclass(frozen=True)
class Iff:
    left: 'Formula'
    right: 'Formula'


@dataclass(frozen=True)
class Forall:
    vars: Tuple[VarName, ...]
    body: 'Formula'

    def __post_init__(self) -> None:
        _check_block(self.vars)


@dataclass(frozen=True)
class Exists:
    vars: Tuple[VarName, ...]
    body: 'Formula'

    def __post_init__(self) -> None:
        _check_block(self.vars)


Formula = Union[Atom, Eq, Truth, Falsity, Not, And, Or, Implies, Iff, Forall, Exists]
Quantifier = Union[Forall, Exists]
Literal = Union[Atom, Eq, Not]

TRUE = Truth()
FALSE = Falsity()


def _check_block(names: Tuple[VarName, ...]) -> None:
    if not names:
        raise ValueError("Quantifier block must bind at least one variable")
    if len(set(names)) != len(names):
        raise ValueError(f"Quantifier block binds a variable twice: {names}")


@dataclass(frozen=True)
class QuantifierBlock:
    """Maximal run of same-kind quantifiers in a prefix."""
    kind: str
    vars: Tuple[VarName, ...]


@dataclass(frozen=True)
class Binder:
    """A single bound variable occurrence: the quantifier node and position in its block."""
    path: Path
    position: int
    kind: str
    var: VarName


@dataclass
class Vocabulary:
    """Predicate symbols with arities plus constant symbols."""
    predicates: Dict[str, int] = field(default_factory=dict)
    constants: FrozenSet[str] = frozenset()

    def __post_init__(self) -> None:
        self.constants = frozenset(self.constants)
        clash = set(self.predicates) & self.constants
        if clash:
            raise VocabularyError(
                f"Symbols declared both as predicate and constant: {sorted(clash)}"
            )
        for name, arity in self.predicates.items():
            if arity < 0:
                raise VocabularyError(f"Negative arity for {name}")

    @property
    def relational(self) -> bool:
        """Always true: function symbols beyond constants are not representable."""
        return True

    def merge(self, other: 'Vocabulary') -> 'Vocabulary':
        """Union of two vocabularies; arities must agree."""
        preds = dict(self.predicates)
        for name, arity in other.predicates.items():
            if preds.get(name, arity) != arity:
                raise VocabularyError(
                    f"Predicate {name} used with arities {preds[name]} and {arity}"
                )
            preds[name] = arity
        return Vocabulary(preds, self.constants | other.constants)

    @classmethod
    def of(cls, *formulas: 'Formula') -> 'Vocabulary':
        """Smallest vocabulary covering the given formulas."""
        vocab = cls()
        for phi in formulas:
            vocab = vocab.merge(cls(predicates_of(phi), constants_of(phi)))
        return vocab


# ---------------------------------------------------------------------------
# Smart constructors
# ---------------------------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula:
    """Flattened conjunction; empty gives truth, singleton gives the part itself."""
    flat: List[Formula] = []
    for part in parts:
        if isinstance(part, And):
            flat.extend(part.parts)
        else:
            flat.append(part)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(parts: Iterable[Formula]) -> Formula:
    """Flattened disjunction; empty gives falsity, singleton gives the part itself."""
    flat: List[Formula] = []
    for part in parts:
        if isinstance(part, Or):
            flat.extend(part.parts)
        else:
            flat.append(part)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def quantify(kind: str, names: Iterable[VarName], body: Formula) -> Formula:
    """Wrap body in a quantifier block; an empty block returns body unchanged."""
    block = tuple(names)
    if not block:
        return body
    if kind == FORALL:
        return Forall(block, body)
    return Exists(block, body)


def negate(phi: Formula) -> Formula:
    """Complement of a literal (or any formula) without double negation."""
    if isinstance(phi, Not):
        return phi.body
    if isinstance(phi, Truth):
        return FALSE
    if isinstance(phi, Falsity):
        return TRUE
    return Not(phi)


def dual(kind: str) -> str:
    return EXISTS if kind == FORALL else FORALL


def kind_of(phi: Quantifier) -> str:
    return FORALL if isinstance(phi, Forall) else EXISTS


# ---------------------------------------------------------------------------
# Traversal
# ---------------------------------------------------------------------------

def children(phi: Formula) -> Tuple[Formula, ...]:
    if isinstance(phi, (Not, Forall, Exists)):
        return (phi.body,)
    if isinstance(phi, (And, Or)):
        return phi.parts
    if isinstance(phi, (Implies, Iff)):
        return (phi.left, phi.right)
    return ()


def with_children(phi: Formula, kids: Tuple[Formula, ...]) -> Formula:
    """Rebuild a node of the same kind around new children."""
    if isinstance(phi, Not):
        return Not(kids[0])
    if isinstance(phi, Forall):
        return Forall(phi.vars, kids[0])
    if isinstance(phi, Exists):
        return Exists(phi.vars, kids[0])
    if isinstance(phi, And):
        return And(kids)
    if isinstance(phi, Or):
        return Or(kids)
    if isinstance(phi, Implies):
        return Implies(kids[0], kids[1])
    if isinstance(phi, Iff):
        return Iff(kids[0], kids[1])
    return phi


def walk(phi: Formula, path: Path = ()) -> Iterator[Tuple[Path, Formula]]:
    """Pre-order traversal yielding (path, subformula)."""
    yield path, phi
    for index, child in enumerate(children(phi)):
        yield from walk(child, path + (index,))


def walk_scoped(
    phi: Formula, path: Path = (), scope: Tuple[Binder, ...] = ()
) -> Iterator[Tuple[Path, Formula, Tuple[Binder, ...]]]:
    """Pre-order traversal that also yields the enclosing binders, outermost first.

    Blocks are expanded left to right, so ``forall x y`` contributes the
    binder of x before the binder of y.
    """
    yield path, phi, scope
    if isinstance(phi, (Forall, Exists)):
        kind = kind_of(phi)
        inner = scope + tuple(
            Binder(path, position, kind, name) for position, name in enumerate(phi.vars)
        )
        yield from walk_scoped(phi.body, path + (0,), inner)
        return
    for index, child in enumerate(children(phi)):
        yield from walk_scoped(child, path + (index,), scope)


def resolve(scope: Tuple[Binder, ...], name: VarName) -> Optional[Binder]:
    """Nearest enclosing binder of a variable name, or None when free."""
    for binder in reversed(scope):
        if binder.var == name:
            return binder
    return None


def subformula_at(phi: Formula, path: Path) -> Formula:
    node = phi
    for index in path:
        kids = children(node)
        if index < 0 or index >= len(kids):
            raise NotASubformula(f"Path {path} does not address a subformula")
        node = kids[index]
    return node


def replace_at(phi: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(phi))
    if path[0] >= len(kids):
        raise NotASubformula(f"Path {path} does not address a subformula")
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(phi, tuple(kids))


def map_bottom_up(phi: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Apply fn to every node after its children have been rewritten."""
    kids = children(phi)
    if kids:
        phi = with_children(phi, tuple(map_bottom_up(kid, fn) for kid in kids))
    return fn(phi)


def term_vars(terms: Iterable[Term]) -> Set[VarName]:
    return {t.name for t in terms if isinstance(t, Var)}


def atom_terms(phi: Formula) -> Tuple[Term, ...]:
    if isinstance(phi, Atom):
        return phi.args
    if isinstance(phi, Eq):
        return (phi.left, phi.right)
    return ()


def is_atomic(phi: Formula) -> bool:
    return isinstance(phi, (Atom, Eq))


def is_literal(phi: Formula) -> bool:
    return is_atomic(phi) or isinstance(phi, (Truth, Falsity)) or (
        isinstance(phi, Not) and is_atomic(phi.body)
    )


def atoms(phi: Formula) -> List[Formula]:
    """Atom and equality occurrences, left to right, with repetitions."""
    return [node for _, node in walk(phi) if is_atomic(node)]


def atom_vars(phi: Formula) -> Set[VarName]:
    return term_vars(atom_terms(phi))


def free_vars(phi: Formula) -> Set[VarName]:
    """Variables with at least one free occurrence."""
    if isinstance(phi, (Atom, Eq)):
        return term_vars(atom_terms(phi))
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - set(phi.vars)
    result: Set[VarName] = set()
    for child in children(phi):
        result |= free_vars(child)
    return result


def bound_vars(phi: Formula) -> List[VarName]:
    """Bound variables in binder order, with repetitions."""
    result: List[VarName] = []
    for _, node in walk(phi):
        if isinstance(node, (Forall, Exists)):
            result.extend(node.vars)
    return result


def all_vars(phi: Formula) -> Set[VarName]:
    """Every variable name occurring in an atom or a quantifier block."""
    names = set(bound_vars(phi))
    for node in atoms(phi):
        names |= atom_vars(node)
    return names


def constants_of(phi: Formula) -> FrozenSet[str]:
    names: Set[str] = set()
    for node in atoms(phi):
        names |= {t.name for t in atom_terms(node) if isinstance(t, Const)}
    return frozenset(names)


def predicates_of(phi: Formula) -> Dict[str, int]:
    preds: Dict[str, int] = {}
    for node in atoms(phi):
        if isinstance(node, Atom):
            if preds.get(node.pred, len(node.args)) != len(node.args):
                raise VocabularyError(f"Predicate {node.pred} used with two arities")
            preds[node.pred] = len(node.args)
    return preds


def has_equality(phi: Formula) -> bool:
    return any(isinstance(node, Eq) for node in atoms(phi))


def is_quantifier_free(phi: Formula) -> bool:
    return not any(isinstance(node, (Forall, Exists)) for _, node in walk(phi))


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def is_nnf(phi: Formula) -> bool:
    for _, node in walk(phi):
        if isinstance(node, (Implies, Iff)):
            return False
        if isinstance(node, Not) and not is_atomic(node.body):
            return False
    return True


def is_rectified(phi: Formula) -> bool:
    """No variable bound twice and no variable both free and bound."""
    bound = bound_vars(phi)
    if len(bound) != len(set(bound)):
        return False
    return not (set(bound) & free_vars(phi))


# ---------------------------------------------------------------------------
# Fresh names and rectification
# ---------------------------------------------------------------------------

_TRAILING_DIGITS = re.compile(r'\d+$')


def base_name(name: VarName) -> str:
    stripped = _TRAILING_DIGITS.sub('', name)
    return stripped or name


class NameSupply:
    """Deterministic fresh names: base name plus the smallest unused suffix."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken: Set[str] = set(taken)

    def reserve(self, name: str) -> None:
        self.taken.add(name)

    def fresh(self, hint: str) -> str:
        base = base_name(hint)
        suffix = 1
        while f"{base}{suffix}" in self.taken:
            suffix += 1
        name = f"{base}{suffix}"
        self.taken.add(name)
        return name


def rectify(phi: Formula) -> Formula:
    """Alpha-rename so that every binder binds a distinct, non-free variable.

    The first binder of a name keeps it; later ones get the base name plus the
    smallest unused numeric suffix. Vacuous binders are dropped.
    """
    supply = NameSupply(all_vars(phi) | constants_of(phi))
    used: Set[str] = set(free_vars(phi))

    def go(node: Formula, env: Dict[VarName, VarName]) -> Formula:
        if isinstance(node, (Atom, Eq)):
            return rename_terms(node, env)
        if isinstance(node, (Forall, Exists)):
            live = free_vars(node.body)
            inner = dict(env)
            names: List[VarName] = []
            for name in node.vars:
                if name not in live:
                    inner.pop(name, None)
                    continue
                if name in used:
                    new = supply.fresh(name)
                else:
                    new = name
                used.add(new)
                inner[name] = new
                names.append(new)
            body = go(node.body, inner)
            return quantify(kind_of(node), names, body)
        kids = children(node)
        if not kids:
            return node
        return with_children(node, tuple(go(kid, env) for kid in kids))

    return go(phi, {})


def rename_terms(phi: Formula, env: Mapping[VarName, VarName]) -> Formula:
    """Rename variable arguments of an atom or equality."""
    def sub(t: Term) -> Term:
        if isinstance(t, Var) and t.name in env:
            return Var(env[t.name])
        return t

    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(sub(t) for t in phi.args))
    if isinstance(phi, Eq):
        return Eq(sub(phi.left), sub(phi.right))
    return phi


def rename_free(phi: Formula, env: Mapping[VarName, VarName]) -> Formula:
    """Rename free variables; the caller guarantees the new names are not captured."""
    if isinstance(phi, (Atom, Eq)):
        return rename_terms(phi, env)
    if isinstance(phi, (Forall, Exists)):
        inner = {k: v for k, v in env.items() if k not in phi.vars}
        return with_children(phi, (rename_free(phi.body, inner),))
    kids = children(phi)
    if not kids:
        return phi
    return with_children(phi, tuple(rename_free(kid, env) for kid in kids))


def rename_bound(phi: Formula, env: Mapping[VarName, VarName]) -> Formula:
    """Rename variables everywhere (binders and occurrences); for rectified input."""
    if isinstance(phi, (Atom, Eq)):
        return rename_terms(phi, env)
    if isinstance(phi, (Forall, Exists)):
        names = tuple(env.get(name, name) for name in phi.vars)
        return quantify(kind_of(phi), names, rename_bound(phi.body, env))
    kids = children(phi)
    if not kids:
        return phi
    return with_children(phi, tuple(rename_bound(kid, env) for kid in kids))


def substitute(
    phi: Formula, sigma: Mapping[VarName, Term], auto_rename: bool = True
) -> Formula:
    """Simultaneous capture-avoiding substitution of terms for free variables.

    Raises:
        CaptureRisk: if a binder would capture a substituted variable and
            auto_rename is False.
    """
    incoming: Set[VarName] = set()
    for term in sigma.values():
        if isinstance(term, Var):
            incoming.add(term.name)
    supply = NameSupply(all_vars(phi) | incoming | set(sigma) | constants_of(phi))

    def go(node: Formula, env: Dict[VarName, Term]) -> Formula:
        if not env:
            return node
        if isinstance(node, Atom):
            return Atom(node.pred, tuple(_apply(t, env) for t in node.args))
        if isinstance(node, Eq):
            return Eq(_apply(node.left, env), _apply(node.right, env))
        if isinstance(node, (Forall, Exists)):
            inner = {k: v for k, v in env.items() if k not in node.vars}
            live = free_vars(node.body)
            active = {k: v for k, v in inner.items() if k in live}
            reaching = {t.name for t in active.values() if isinstance(t, Var)}
            names: List[VarName] = []
            for name in node.vars:
                if name in reaching:
                    if not auto_rename:
                        raise CaptureRisk(f"Substitution would be captured by binder {name}")
                    new = supply.fresh(name)
                    active[name] = Var(new)
                    names.append(new)
                else:
                    names.append(name)
            return quantify(kind_of(node), names, go(node.body, active))
        kids = children(node)
        if not kids:
            return node
        return with_children(node, tuple(go(kid, env) for kid in kids))

    return go(phi, dict(sigma))


def _apply(term: Term, env: Mapping[VarName, Term]) -> Term:
    if isinstance(term, Var) and term.name in env:
        return env[term.name]
    return term


# ---------------------------------------------------------------------------
# Negation normal form
# ---------------------------------------------------------------------------

def to_nnf(phi: Formula, negated: bool = False) -> Formula:
    """Negation normal form: only conjunction, disjunction, negated atoms and quantifiers.

    Implication a -> b becomes ~a | b, equivalence a <-> b becomes
    (~a | b) & (~b | a), and its negation (a & ~b) | (b & ~a).
    """
    if isinstance(phi, (Atom, Eq)):
        return Not(phi) if negated else phi
    if isinstance(phi, Truth):
        return FALSE if negated else phi
    if isinstance(phi, Falsity):
        return TRUE if negated else phi
    if isinstance(phi, Not):
        return to_nnf(phi.body, not negated)
    if isinstance(phi, And):
        parts = [to_nnf(part, negated) for part in phi.parts]
        return disj(parts) if negated else conj(parts)
    if isinstance(phi, Or):
        parts = [to_nnf(part, negated) for part in phi.parts]
        return conj(parts) if negated else disj(parts)
    if isinstance(phi, Implies):
        if negated:
            return conj([to_nnf(phi.left), to_nnf(phi.right, True)])
        return disj([to_nnf(phi.left, True), to_nnf(phi.right)])
    if isinstance(phi, Iff):
        a, b = phi.left, phi.right
        if negated:
            return disj([
                conj([to_nnf(a), to_nnf(b, True)]),
                conj([to_nnf(b), to_nnf(a, True)]),
            ])
        return conj([
            disj([to_nnf(a, True), to_nnf(b)]),
            disj([to_nnf(b, True), to_nnf(a)]),
        ])
    kind = kind_of(phi)
    if negated:
        kind = dual(kind)
    return quantify(kind, phi.vars, to_nnf(phi.body, negated))


# ---------------------------------------------------------------------------
# Prenex form
# ---------------------------------------------------------------------------

Prefix = List[Tuple[str, VarName]]


def to_prenex(phi: Formula, existentials_first: bool = True) -> Formula:
    """Pull every quantifier to the front.

    Quantifier-free subtrees are kept as they are. Sibling prefixes are merged
    left to right: whenever some sibling's next quantifier is of the preferred
    kind (existential by default), the maximal run of that kind is pulled from
    every sibling before the other kind is considered.

    Raises:
        NotRectified: if phi is not rectified.
    """
    if not is_rectified(phi):
        raise NotRectified("to_prenex requires a rectified formula")
    if any(isinstance(n, Iff) and not is_quantifier_free(n) for _, n in walk(phi)):
        phi = rectify(map_bottom_up(phi, _expand_quantified_iff))
    first = EXISTS if existentials_first else FORALL
    prefix, matrix = _pull(phi, first)
    return build_prenex(prefix, matrix)


def _expand_quantified_iff(node: Formula) -> Formula:
    if isinstance(node, Iff) and not is_quantifier_free(node):
        return And((Implies(node.left, node.right), Implies(node.right, node.left)))
    return node


def _pull(phi: Formula, first: str) -> Tuple[Prefix, Formula]:
    if is_quantifier_free(phi):
        return [], phi
    if isinstance(phi, (Forall, Exists)):
        kind = kind_of(phi)
        prefix, matrix = _pull(phi.body, first)
        return [(kind, name) for name in phi.vars] + prefix, matrix
    if isinstance(phi, Not):
        prefix, matrix = _pull(phi.body, first)
        return [(dual(kind), name) for kind, name in prefix], Not(matrix)
    if isinstance(phi, Implies):
        left_prefix, left = _pull(phi.left, first)
        right_prefix, right = _pull(phi.right, first)
        flipped = [(dual(kind), name) for kind, name in left_prefix]
        return _merge([flipped, right_prefix], first), Implies(left, right)
    pulled = [_pull(part, first) for part in children(phi)]
    prefix = _merge([p for p, _ in pulled], first)
    return prefix, with_children(phi, tuple(m for _, m in pulled))


def _merge(prefixes: List[Prefix], first: str) -> Prefix:
    queues = [list(p) for p in prefixes]
    merged: Prefix = []
    while any(queues):
        heads = {q[0][0] for q in queues if q}
        kind = first if first in heads else dual(first)
        for queue in queues:
            while queue and queue[0][0] == kind:
                merged.append(queue.pop(0))
    return merged


def build_prenex(prefix: Iterable[Tuple[str, VarName]], matrix: Formula) -> Formula:
    """Wrap a matrix in a prefix, grouping adjacent same-kind quantifiers into blocks."""
    blocks: List[QuantifierBlock] = []
    for kind, name in prefix:
        if blocks and blocks[-1].kind == kind:
            blocks[-1] = QuantifierBlock(kind, blocks[-1].vars + (name,))
        else:
            blocks.append(QuantifierBlock(kind, (name,)))
    result = matrix
    for block in reversed(blocks):
        result = quantify(block.kind, block.vars, result)
    return result


def prefix_blocks(phi: Formula) -> Tuple[List[QuantifierBlock], Formula]:
    """Split off the leading quantifier blocks; adjacent same-kind nodes are merged."""
    blocks: List[QuantifierBlock] = []
    node = phi
    while isinstance(node, (Forall, Exists)):
        kind = kind_of(node)
        if blocks and blocks[-1].kind == kind:
            blocks[-1] = QuantifierBlock(kind, blocks[-1].vars + node.vars)
        else:
            blocks.append(QuantifierBlock(kind, node.vars))
        node = node.body
    return blocks, node


def is_prenex(phi: Formula) -> bool:
    _, matrix = prefix_blocks(phi)
    return is_quantifier_free(matrix)


def canonical_prenex(phi: Formula) -> Formula:
    """Rectified, existentials-first prenex form of the negation normal form."""
    return to_prenex(rectify(to_nnf(phi)))


def prefix_signature(phi: Formula) -> str:
    """Prefix shape of a prenex formula, e.g. 'EAE' for exists-forall-exists blocks."""
    blocks, _ = prefix_blocks(phi)
    return ''.join('A' * len(b.vars) if b.kind == FORALL else 'E' * len(b.vars) for b in blocks)


def alternation_count(phi: Formula) -> int:
    """Number of forall-exists alternations in the prefix of a prenex formula."""
    blocks, _ = prefix_blocks(phi)
    kinds = [b.kind for b in blocks]
    return sum(
        1 for i in range(len(kinds) - 1) if kinds[i] == FORALL and kinds[i + 1] == EXISTS
    )


# ---------------------------------------------------------------------------
# Length and tetration
# ---------------------------------------------------------------------------

def formula_len(phi: Formula) -> int:
    """Symbol count; implication and equivalence are counted through their expansions."""
    if isinstance(phi, Atom):
        return 1 + len(phi.args)
    if isinstance(phi, Eq):
        return 3
    if isinstance(phi, (Truth, Falsity)):
        return 1
    if isinstance(phi, Not):
        return 1 + formula_len(phi.body)
    if isinstance(phi, (And, Or)):
        return sum(formula_len(part) for part in phi.parts) + len(phi.parts) - 1
    if isinstance(phi, Implies):
        return formula_len(phi.left) + formula_len(phi.right) + 2
    if isinstance(phi, Iff):
        return 2 * (formula_len(phi.left) + formula_len(phi.right) + 2) + 1
    return 2 * len(phi.vars) + formula_len(phi.body)


DEFAULT_TWOUP_BITS = 1 << 20


def twoup(k: int, m: int, max_bits: int = DEFAULT_TWOUP_BITS) -> int:
    """Tetration: twoup(0, m) = m and twoup(k + 1, m) = 2 ** twoup(k, m).

    Raises:
        TwoupOverflow: if an intermediate power would exceed max_bits bits.
    """
    if k < 0 or m < 0:
        raise ValueError("twoup is defined for nonnegative integers")
    value = m
    for level in range(k):
        if value >= max_bits:
            raise TwoupOverflow(
                f"twoup({k}, {m}) exceeds {max_bits} bits at level {level + 1}"
            )
        value = 1 << value
    return value
