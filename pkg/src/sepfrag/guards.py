"""Guard recognition for the guarded, loosely guarded and guarded-negation families.

Recognition is local: whether a quantified subformula is guarded depends only
on the subformula itself, so results are cached per (subformula, mode).

Accepted shapes for guarded quantification (ū is the merged block of directly
nested quantifiers of the same kind):

    forall ū. (γ -> ψ)      forall ū. (~γ | ψ)      forall ū. ~γ
    exists ū. (γ & ψ)       exists ū. γ

For the loose modes the guard is any nonempty subset of the candidate atoms;
smaller guards are tried first.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .syntax import (
    EXISTS,
    FALSE,
    FORALL,
    TRUE,
    And,
    Exists,
    Falsity,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Path,
    SepfragError,
    Truth,
    VarName,
    atom_vars,
    atoms,
    bound_vars,
    children,
    conj,
    disj,
    free_vars,
    is_atomic,
    kind_of,
    quantify,
    to_nnf,
)
from .separateness import DisjointSets, separated, touches_both

GF = 'GF'
LGF = 'LGF'
SGF = 'SGF'
SLGF = 'SLGF'
GNFO = 'GNFO'
SGNFO = 'SGNFO'
GUARD_MODES = (GF, LGF, SGF, SLGF, GNFO, SGNFO)
QUANTIFIER_MODES = (GF, LGF, SGF, SLGF)
NEGATION = 'not'

# Loose guards are searched over subsets only when the candidate list is this short.
MAX_LOOSE_CANDIDATES = 8


class GuardViolation(SepfragError):
    """A subformula breaks the guard discipline of the requested mode."""

    def __init__(self, rule: str, path: Path):
        super().__init__(f"{rule} at {list(path)}")
        self.rule = rule
        self.path = path


@dataclass(frozen=True)
class GuardInfo:
    """Guard found at one quantifier (or negation) node.

    Attributes:
        kind: 'forall', 'exists' or 'not'.
        bound: The guarded variables ū (empty for negations).
        guard: Guard atoms, in the order they occur.
        body: The guarded formula ψ with the guard removed.
        outside: Free variables of ψ outside the guard (z̄ of the separated modes).
        division: SGNFO only: per guard atom, its share ū_i of free(ψ) and its Z_i.
    """
    kind: str
    bound: Tuple[VarName, ...]
    guard: Tuple[Formula, ...]
    body: Formula
    outside: Tuple[VarName, ...] = ()
    division: Tuple[Tuple[Tuple[VarName, ...], Tuple[VarName, ...]], ...] = ()


@dataclass
class GuardAnnotation:
    """Guards of a formula keyed by the path of the node they guard."""
    mode: str
    guards: Dict[Path, GuardInfo] = field(default_factory=dict)

    def guard_atoms(self) -> List[Formula]:
        found: List[Formula] = []
        for info in self.guards.values():
            found.extend(info.guard)
        return found

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        from .parser import print_formula

        entries = []
        for path, info in sorted(self.guards.items()):
            entry = {
                'path': list(path),
                'kind': info.kind,
                'bound': list(info.bound),
                'guard': [print_formula(a) for a in info.guard],
            }
            if info.outside:
                entry['outside'] = list(info.outside)
            if info.division:
                entry['division'] = [
                    {'u': list(u), 'z': list(z)} for u, z in info.division
                ]
            entries.append(entry)
        return {'mode': self.mode, 'guards': entries}

    def describe(self) -> str:
        from .parser import print_formula

        parts = []
        for path, info in sorted(self.guards.items()):
            guard = ' & '.join(print_formula(a) for a in info.guard) or 'sentence'
            parts.append(f"{list(path)}:{guard}")
        return ' '.join(parts)


# ---------------------------------------------------------------------------
# Guarded quantification
# ---------------------------------------------------------------------------

@dataclass
class _Shape:
    """A quantifier node split into guard candidates and the rest of its body."""
    kind: str
    bound: Tuple[VarName, ...]
    candidates: List[Formula]
    # (subformula, relative path) pairs recognized independently of the guard choice
    inner: List[Tuple[Formula, Path]]
    # rebuilds ψ from the candidates left out of the guard
    build: Callable[[List[Formula]], Formula]


def _merged_block(node: Formula) -> Tuple[str, Tuple[VarName, ...], Formula, Path]:
    kind = kind_of(node)
    names: Tuple[VarName, ...] = ()
    offset: Path = ()
    while isinstance(node, (Forall, Exists)) and kind_of(node) == kind:
        names += tuple(n for n in node.vars if n not in names)
        node = node.body
        offset += (0,)
    return kind, names, node, offset


def _shape(node: Formula) -> Optional[_Shape]:
    kind, bound, body, offset = _merged_block(node)
    if kind == FORALL:
        if isinstance(body, Implies):
            ant, cons = body.left, body.right
            if isinstance(ant, And):
                ant_parts = ant.parts
                ant_paths = [offset + (0, i) for i in range(len(ant.parts))]
            else:
                ant_parts, ant_paths = (ant,), [offset + (0,)]
            cands = [p for p in ant_parts if is_atomic(p)]
            others = [(p, path) for p, path in zip(ant_parts, ant_paths) if not is_atomic(p)]
            rest_ant = [p for p in ant_parts if not is_atomic(p)]

            def build_implies(unused: List[Formula]) -> Formula:
                premise = rest_ant + unused
                return Implies(conj(premise), cons) if premise else cons

            inner = others + [(cons, offset + (1,))]
            return _Shape(kind, bound, cands, inner, build_implies)
        if isinstance(body, Or):
            cands = [p.body for p in body.parts if isinstance(p, Not) and is_atomic(p.body)]
            rest = [(p, offset + (i,)) for i, p in enumerate(body.parts)
                    if not (isinstance(p, Not) and is_atomic(p.body))]

            def build_or(unused: List[Formula]) -> Formula:
                return disj([p for p, _ in rest] + [Not(a) for a in unused])

            return _Shape(kind, bound, cands, rest, build_or)
        if isinstance(body, Not) and is_atomic(body.body):
            return _Shape(kind, bound, [body.body], [],
                          lambda unused: disj([Not(a) for a in unused]))
        return None
    if isinstance(body, And):
        cands = [p for p in body.parts if is_atomic(p)]
        rest = [(p, offset + (i,)) for i, p in enumerate(body.parts) if not is_atomic(p)]

        def build_and(unused: List[Formula]) -> Formula:
            return conj([p for p, _ in rest] + unused)

        return _Shape(kind, bound, cands, rest, build_and)
    if is_atomic(body):
        return _Shape(kind, bound, [body], [], lambda unused: conj(unused))
    return None


def _guard_subsets(candidates: Sequence[Formula], loose: bool) -> List[Tuple[int, ...]]:
    indices = range(len(candidates))
    if not loose:
        return [(i,) for i in indices]
    if len(candidates) > MAX_LOOSE_CANDIDATES:
        return [(i,) for i in indices] + [tuple(range(k)) for k in range(2, len(candidates) + 1)]
    result: List[Tuple[int, ...]] = []
    for size in range(1, len(candidates) + 1):
        result.extend(combinations(indices, size))
    return result


def _loose_cooccurrence(bound: Sequence[VarName], guard: Sequence[Formula]) -> bool:
    guard_vars: Set[VarName] = set()
    for a in guard:
        guard_vars |= atom_vars(a)
    for u in bound:
        for v in guard_vars:
            if not any({u, v} <= atom_vars(a) for a in guard):
                return False
    return True


def _choose_guard(
    shape: _Shape, mode: str, inner_guards: List[Formula]
) -> Optional[GuardInfo]:
    """First admissible guard; the separated modes prefer guards covering all of free(ψ)."""
    loose = mode in (LGF, SLGF)
    passes = (False, True) if mode in (SGF, SLGF) else (False,)
    for allow_outside in passes:
        for subset in _guard_subsets(shape.candidates, loose):
            guard = [shape.candidates[i] for i in subset]
            unused = [a for i, a in enumerate(shape.candidates) if i not in subset]
            guard_vars: Set[VarName] = set()
            for a in guard:
                guard_vars |= atom_vars(a)
            if not set(shape.bound) <= guard_vars:
                continue
            if loose and not _loose_cooccurrence(shape.bound, guard):
                continue
            psi = shape.build(unused)
            outside = free_vars(psi) - guard_vars
            if bool(outside) != allow_outside:
                continue
            if outside:
                bound = set(shape.bound)
                if not separated(psi, bound, outside):
                    continue
                if any(touches_both(atom_vars(g), bound, outside) for g in inner_guards):
                    continue
            return GuardInfo(
                shape.kind, shape.bound, tuple(guard), psi, tuple(sorted(outside))
            )
    return None


@lru_cache(maxsize=4096)
def _guarded(phi: Formula, mode: str) -> Tuple[Tuple[Path, GuardInfo], ...]:
    """Guards of phi under a quantifier-guard mode with paths relative to phi.

    Raises:
        GuardViolation: at the first unguarded quantifier, path relative to phi.
    """
    if isinstance(phi, (Forall, Exists)):
        shape = _shape(phi)
        if shape is None:
            raise GuardViolation('unguarded-quantifier', ())
        found: List[Tuple[Path, GuardInfo]] = []
        for sub, rel in shape.inner:
            try:
                found.extend((rel + p, g) for p, g in _guarded(sub, mode))
            except GuardViolation as exc:
                raise GuardViolation(exc.rule, rel + exc.path) from None
        inner_guards = [a for _, g in found for a in g.guard]
        info = _choose_guard(shape, mode, inner_guards)
        if info is None:
            rule = 'guard-separation' if mode in (SGF, SLGF) else 'guard-coverage'
            raise GuardViolation(rule, ())
        return (((), info),) + tuple(found)
    found = []
    for index, child in enumerate(children(phi)):
        try:
            found.extend(((index,) + p, g) for p, g in _guarded(child, mode))
        except GuardViolation as exc:
            raise GuardViolation(exc.rule, (index,) + exc.path) from None
    return tuple(found)


# ---------------------------------------------------------------------------
# Guarded negation
# ---------------------------------------------------------------------------

def _exact_cover(
    free: FrozenSet[VarName], candidates: List[Tuple[Formula, FrozenSet[VarName]]]
) -> Optional[List[Tuple[Formula, FrozenSet[VarName]]]]:
    """Backtracking search for candidates whose variable shares partition `free`."""
    def search(
        left: FrozenSet[VarName], chosen: List[Tuple[Formula, FrozenSet[VarName]]]
    ) -> Optional[List[Tuple[Formula, FrozenSet[VarName]]]]:
        if not left:
            return chosen
        pivot = min(left)
        for atom, share in candidates:
            if pivot in share and share <= left:
                found = search(left - share, chosen + [(atom, share)])
                if found is not None:
                    return found
        return None

    return search(free, [])


def _separated_negation_guard(
    siblings: Sequence[Formula], psi: Formula
) -> Optional[GuardInfo]:
    """Separated negation guard for ~psi among the atomic siblings, with its Z division."""
    free = frozenset(free_vars(psi))
    quantified = set(bound_vars(psi))
    atomic = [s for s in siblings if is_atomic(s)]
    if not free:
        guard = tuple(atomic[:1])
        return GuardInfo(NEGATION, (), guard, psi, (), (((), tuple(sorted(quantified))),))

    sets = DisjointSets(sorted(free | quantified))
    for a in atoms(psi):
        sets.union_all(sorted(atom_vars(a) & (free | quantified)))
    component_of = {v: sets.find(v) for v in free | quantified}
    free_part: Dict[object, Set[VarName]] = {}
    for v in free:
        free_part.setdefault(component_of[v], set()).add(v)

    candidates: List[Tuple[Formula, FrozenSet[VarName]]] = []
    for a in atomic:
        share = frozenset(atom_vars(a) & free)
        if not share:
            continue
        # the share must consist of whole components' free parts
        roots = {component_of[v] for v in share}
        if all(free_part[r] <= share for r in roots):
            candidates.append((a, share))
    cover = _exact_cover(free, candidates)
    if cover is None:
        return None

    division = []
    claimed: Set[object] = set()
    for _, share in cover:
        roots = {component_of[v] for v in share}
        claimed |= roots
        z = sorted(v for v in quantified if component_of[v] in roots)
        division.append((tuple(sorted(share)), tuple(z)))
    # components without free variables go to the first class
    spare = sorted(v for v in quantified if component_of[v] not in claimed)
    if spare:
        first_u, first_z = division[0]
        division[0] = (first_u, tuple(sorted(first_z + tuple(spare))))
    return GuardInfo(
        NEGATION, (), tuple(a for a, _ in cover), psi, (), tuple(division)
    )


def _negation_guard(siblings: Sequence[Formula], psi: Formula) -> Optional[GuardInfo]:
    """Single guard atom covering the free variables of psi."""
    free = free_vars(psi)
    atomic = [s for s in siblings if is_atomic(s)]
    if not free:
        return GuardInfo(NEGATION, (), tuple(atomic[:1]), psi)
    for a in atomic:
        if free <= atom_vars(a):
            return GuardInfo(NEGATION, (), (a,), psi)
    return None


@lru_cache(maxsize=4096)
def _negation_guarded(phi: Formula, mode: str) -> Tuple[Tuple[Path, GuardInfo], ...]:
    if isinstance(phi, (Forall, Implies, Iff)):
        raise GuardViolation('connective-not-allowed', ())
    if isinstance(phi, Not):
        # only sentences may be negated outside a conjunction
        if free_vars(phi.body):
            raise GuardViolation('unguarded-negation', ())
        inner = _descend(phi.body, mode, (0,))
        return (((), GuardInfo(NEGATION, (), (), phi.body)),) + inner
    if isinstance(phi, And):
        found: List[Tuple[Path, GuardInfo]] = []
        for index, part in enumerate(phi.parts):
            if not isinstance(part, Not):
                found.extend(_descend(part, mode, (index,)))
                continue
            siblings = phi.parts[:index] + phi.parts[index + 1:]
            if mode == SGNFO:
                info = _separated_negation_guard(siblings, part.body)
            else:
                info = _negation_guard(siblings, part.body)
            if info is None:
                raise GuardViolation('unguarded-negation', (index,))
            found.append(((index,), info))
            found.extend(_descend(part.body, mode, (index, 0)))
        return tuple(found)
    found = []
    for index, child in enumerate(children(phi)):
        found.extend(_descend(child, mode, (index,)))
    return tuple(found)


def _descend(phi: Formula, mode: str, rel: Path) -> Tuple[Tuple[Path, GuardInfo], ...]:
    try:
        return tuple((rel + p, g) for p, g in _negation_guarded(phi, mode))
    except GuardViolation as exc:
        raise GuardViolation(exc.rule, rel + exc.path) from None


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def recognize_guards(phi: Formula, mode: str) -> GuardAnnotation:
    """Guard annotation of phi under mode.

    Raises:
        ValueError: for an unknown mode.
        GuardViolation: naming the first offending rule and subformula path.
    """
    if mode not in GUARD_MODES:
        raise ValueError(f"Unknown guard mode {mode!r}; expected one of {GUARD_MODES}")
    if mode in QUANTIFIER_MODES:
        found = _guarded(phi, mode)
    else:
        found = _negation_guarded(phi, mode)
    return GuardAnnotation(mode, dict(found))


def guarded_split(node: Formula, mode: str = SLGF) -> Optional[GuardInfo]:
    """Guard of a single quantifier node, or None when it is not guarded under mode."""
    if not isinstance(node, (Forall, Exists)) or mode not in QUANTIFIER_MODES:
        return None
    try:
        found = _guarded(node, mode)
    except GuardViolation:
        return None
    return found[0][1]


def negation_guard(
    siblings: Sequence[Formula], psi: Formula, separated: bool = False
) -> Optional[GuardInfo]:
    """Guard for ~psi among its conjunction siblings, or None.

    With separated=True the free variables of psi may be spread over several
    guard atoms; the result's division lists each atom's share.
    """
    if separated:
        return _separated_negation_guard(siblings, psi)
    return _negation_guard(siblings, psi)


def guarded_nnf(phi: Formula, mode: str = SLGF) -> Formula:
    """Negation normal form that keeps guarded quantification recognizable.

    ~forall ū (γ -> ψ) becomes exists ū (γ & ~ψ) and ~exists ū (γ & ψ)
    becomes forall ū (γ -> ~ψ); guards stay in place, every other part is
    brought into negation normal form.

    Raises:
        GuardViolation: if phi is not guarded under mode.
    """
    recognize_guards(phi, mode)
    return _gnnf(phi, False, mode)


def _gnnf(phi: Formula, negated: bool, mode: str) -> Formula:
    if isinstance(phi, Not):
        return _gnnf(phi.body, not negated, mode)
    if isinstance(phi, (And, Or)):
        parts = [_gnnf(p, negated, mode) for p in phi.parts]
        flip = isinstance(phi, And) == negated
        return disj(parts) if flip else conj(parts)
    if isinstance(phi, Implies):
        return _gnnf(Or((Not(phi.left), phi.right)), negated, mode)
    if isinstance(phi, Iff):
        a, b = phi.left, phi.right
        expanded = And((Or((Not(a), b)), Or((Not(b), a))))
        return _gnnf(expanded, negated, mode)
    if isinstance(phi, (Forall, Exists)):
        info = guarded_split(phi, mode)
        if info is None:
            return to_nnf(phi, negated)
        kind = info.kind if not negated else (EXISTS if info.kind == FORALL else FORALL)
        body = _gnnf(info.body, negated, mode)
        if kind == FORALL:
            if isinstance(body, Falsity):
                return quantify(FORALL, info.bound, Not(conj(info.guard)))
            return quantify(FORALL, info.bound, Implies(conj(info.guard), body))
        if isinstance(body, Truth):
            return quantify(EXISTS, info.bound, conj(info.guard))
        return quantify(EXISTS, info.bound, conj(list(info.guard) + [body]))
    if isinstance(phi, Truth):
        return FALSE if negated else TRUE
    if isinstance(phi, Falsity):
        return TRUE if negated else FALSE
    return Not(phi) if negated else phi
