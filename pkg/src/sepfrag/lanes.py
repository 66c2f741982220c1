"""Variable lanes: finite-variable width and fluted variable orderings.

A lane is a set of binders whose variables co-occur in atoms. Separated
finite-variable and separated fluted sentences are those whose lanes can each
be renamed into a small or orderly supply of variable names. Everything here
works on binders (quantifier position plus block slot), so sentences that
reuse variable names are handled without rectifying first.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .syntax import (
    Atom,
    Binder,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    NameSupply,
    Path,
    SepfragError,
    Var,
    VarName,
    children,
    constants_of,
    free_vars,
    is_atomic,
    kind_of,
    quantify,
    rename_terms,
    resolve,
    walk_scoped,
    with_children,
)
from .separateness import DisjointSets

SFO = 'SFOk'
SFL = 'SFL'


class LaneViolation(SepfragError):
    """An atom or binder breaks the lane discipline."""

    def __init__(self, rule: str, path: Path):
        super().__init__(f"{rule} at {list(path)}")
        self.rule = rule
        self.path = path


class WidthExceeded(SepfragError):
    """The sentence needs more variable names than requested."""


@dataclass
class LaneAssignment:
    """Binders grouped into lanes, each binder with a slot inside its lane.

    For finite-variable lanes the slot is a color (binders with the same color
    share a name); for fluted lanes it is the position in the lane's
    variable sequence.
    """
    kind: str
    labels: Dict[Binder, Tuple[int, int]] = field(default_factory=dict)

    @property
    def lane_count(self) -> int:
        return len({lane for lane, _ in self.labels.values()})

    def widths(self) -> List[int]:
        """Number of distinct slots per lane, in lane order."""
        slots: Dict[int, set] = {}
        for lane, slot in self.labels.values():
            slots.setdefault(lane, set()).add(slot)
        return [len(slots[lane]) for lane in sorted(slots)]

    def names(self, stem: str = 'x') -> Dict[Binder, str]:
        return {b: f"{stem}{lane}_{slot}" for b, (lane, slot) in self.labels.items()}

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        lanes: Dict[int, List[Dict]] = {}
        for b, (lane, slot) in sorted(self.labels.items(), key=lambda kv: kv[1]):
            lanes.setdefault(lane, []).append(
                {'var': b.var, 'path': list(b.path), 'slot': slot}
            )
        return {'kind': self.kind, 'lanes': [lanes[k] for k in sorted(lanes)]}

    def describe(self) -> str:
        parts = []
        for lane, width in enumerate(self.widths(), start=1):
            members = sorted(
                {b.var for b, (ln, _) in self.labels.items() if ln == lane}
            )
            parts.append(f"V{lane}={{{','.join(members)}}}/{width}")
        return ' '.join(parts)


# ---------------------------------------------------------------------------
# Binder bookkeeping
# ---------------------------------------------------------------------------

@dataclass
class _BinderTable:
    order: List[Binder]
    enclosing: Dict[Binder, Tuple[Binder, ...]]
    # binders a name of which must stay distinct from the binder's own name
    conflicts: Dict[Binder, List[Binder]]
    occurrences: List[Tuple[Path, Formula, Tuple[Optional[Binder], ...]]]


def _binder_table(phi: Formula) -> _BinderTable:
    order: List[Binder] = []
    enclosing: Dict[Binder, Tuple[Binder, ...]] = {}
    conflicts: Dict[Binder, List[Binder]] = {}
    occurrences: List[Tuple[Path, Formula, Tuple[Optional[Binder], ...]]] = []
    for path, node, scope in walk_scoped(phi):
        if isinstance(node, (Forall, Exists)):
            live = []
            for name in sorted(free_vars(node)):
                outer = resolve(scope, name)
                if outer is not None:
                    live.append(outer)
            block = [
                Binder(path, position, kind_of(node), name)
                for position, name in enumerate(node.vars)
            ]
            for position, binder in enumerate(block):
                order.append(binder)
                enclosing[binder] = scope + tuple(block[:position])
                conflicts[binder] = live + block[:position]
        elif is_atomic(node):
            terms = node.args if isinstance(node, Atom) else (node.left, node.right)
            resolved = tuple(
                resolve(scope, t.name) if isinstance(t, Var) else None for t in terms
            )
            occurrences.append((path, node, resolved))
    return _BinderTable(order, enclosing, conflicts, occurrences)


def _greedy_colors(
    order: Sequence[Binder],
    conflicts: Mapping[Binder, Sequence[Binder]],
    lane_of: Optional[Mapping[Binder, int]] = None,
) -> Dict[Binder, int]:
    """Smallest color not used by a conflicting binder of the same lane, top-down.

    Conflicting binders that are live at a binder form a clique, so top-down
    greedy coloring is optimal.
    """
    color: Dict[Binder, int] = {}
    for binder in order:
        taken = {
            color[other]
            for other in conflicts[binder]
            if lane_of is None or lane_of[other] == lane_of[binder]
        }
        slot = 1
        while slot in taken:
            slot += 1
        color[binder] = slot
    return color


def rename_binders(phi: Formula, names: Mapping[Binder, VarName]) -> Formula:
    """Rename every binder in `names` together with the occurrences it binds."""
    def go(node: Formula, path: Path, env: Dict[VarName, VarName]) -> Formula:
        if is_atomic(node):
            return rename_terms(node, env)
        if isinstance(node, (Forall, Exists)):
            kind = kind_of(node)
            inner = dict(env)
            block = []
            for position, name in enumerate(node.vars):
                new = names.get(Binder(path, position, kind, name), name)
                inner[name] = new
                block.append(new)
            return quantify(kind, block, go(node.body, path + (0,), inner))
        kids = children(node)
        if not kids:
            return node
        return with_children(
            node, tuple(go(kid, path + (i,), env) for i, kid in enumerate(kids))
        )

    return go(phi, (), {})


# ---------------------------------------------------------------------------
# Finite-variable width
# ---------------------------------------------------------------------------

def variable_width(phi: Formula) -> int:
    """Fewest variable names any alpha-variant of the sentence phi needs."""
    table = _binder_table(phi)
    colors = _greedy_colors(table.order, table.conflicts)
    return max(colors.values(), default=0)


def fo_lanes(phi: Formula) -> LaneAssignment:
    """One lane holding every binder, colored as variable_width colors it."""
    table = _binder_table(phi)
    colors = _greedy_colors(table.order, table.conflicts)
    return LaneAssignment('FOk', {b: (1, c) for b, c in colors.items()})


def rename_to_k_variables(
    phi: Formula, k: int, names: Optional[Sequence[VarName]] = None
) -> Formula:
    """Alpha-variant of phi that uses only the first k of `names` (default x1..xk).

    Raises:
        WidthExceeded: if phi needs more than k names.
    """
    table = _binder_table(phi)
    colors = _greedy_colors(table.order, table.conflicts)
    width = max(colors.values(), default=0)
    if width > k:
        raise WidthExceeded(f"Sentence needs {width} variables, only {k} allowed")
    if names is None:
        supply = NameSupply(constants_of(phi))
        names = [supply.fresh('x') for _ in range(k)]
    return rename_binders(phi, {b: names[c - 1] for b, c in colors.items()})


def sfo_lanes(phi: Formula) -> LaneAssignment:
    """Lanes of co-occurring binders, each colored with as few names as possible."""
    table = _binder_table(phi)
    sets = DisjointSets(table.order)
    for _, _, resolved in table.occurrences:
        sets.union_all([b for b in resolved if b is not None])
    lane_of: Dict[Binder, int] = {}
    for number, component in enumerate(sets.components(), start=1):
        for binder in component:
            lane_of[binder] = number  # type: ignore[index]
    colors = _greedy_colors(table.order, table.conflicts, lane_of)
    return LaneAssignment(SFO, {b: (lane_of[b], colors[b]) for b in table.order})


# ---------------------------------------------------------------------------
# Fluted orderings
# ---------------------------------------------------------------------------

def _fluted_args(path: Path, node: Formula) -> Tuple[Var, ...]:
    if isinstance(node, Eq):
        raise LaneViolation('equality', path)
    if not node.args:
        raise LaneViolation('nullary-atom', path)
    if any(isinstance(t, Const) for t in node.args):
        raise LaneViolation('constant-argument', path)
    return node.args


def fluted_violation(phi: Formula) -> Optional[Tuple[str, Path]]:
    """First breach of the fluted discipline, or None for a fluted sentence.

    An atom under the binders v1..vk must list exactly a suffix vl..vk of them
    in order.
    """
    for path, node, scope in walk_scoped(phi):
        if not is_atomic(node):
            continue
        try:
            args = _fluted_args(path, node)
        except LaneViolation as exc:
            return exc.rule, exc.path
        resolved = [resolve(scope, t.name) for t in args]
        if len(args) > len(scope) or tuple(resolved) != scope[len(scope) - len(args):]:
            return 'fluted-suffix', path
    return None


def fluted_lanes(phi: Formula) -> LaneAssignment:
    """One lane whose slots are binder depths; renaming by slot gives x1, x2, ..."""
    table = _binder_table(phi)
    return LaneAssignment(
        'FL', {b: (1, len(table.enclosing[b]) + 1) for b in table.order}
    )


def herzig_violation(phi: Formula) -> Optional[Tuple[str, Path]]:
    """First breach of the ordered discipline, or None.

    The binder of the i-th argument must lie in the scope of exactly the
    binders of the arguments before it.
    """
    table = _binder_table(phi)
    for path, node, resolved in table.occurrences:
        try:
            _fluted_args(path, node)
        except LaneViolation as exc:
            return exc.rule, exc.path
        for i, binder in enumerate(resolved):
            if binder is None:
                return 'free-variable', path
            if set(table.enclosing[binder]) != set(resolved[:i]) or binder in resolved[:i]:
                return 'ordered-scope', path
    return None


def sfl_lanes(phi: Formula) -> LaneAssignment:
    """Lane and level of every binder such that each atom reads x^i_l .. x^i_k.

    Raises:
        LaneViolation: naming the first atom or binder that admits no such labeling.
    """
    table = _binder_table(phi)
    edges: Dict[Binder, List[Tuple[Binder, int]]] = {b: [] for b in table.order}
    first_path: Dict[Binder, Path] = {}
    for path, node, resolved in table.occurrences:
        _fluted_args(path, node)
        if any(b is None for b in resolved) or len(set(resolved)) != len(resolved):
            raise LaneViolation('prefix-order', path)
        for outer, inner in zip(resolved, resolved[1:]):
            # the prefix lists the binders outermost first
            if outer not in table.enclosing[inner]:  # type: ignore[index]
                raise LaneViolation('prefix-order', path)
            edges[outer].append((inner, 1))  # type: ignore[index]
            edges[inner].append((outer, -1))  # type: ignore[index]
            first_path.setdefault(inner, path)  # type: ignore[arg-type]

    labels: Dict[Binder, Tuple[int, int]] = {}
    lane = 0
    for start in table.order:
        if start in labels:
            continue
        lane += 1
        level = {start: 0}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for other, step in edges[current]:
                want = level[current] + step
                if other not in level:
                    level[other] = want
                    queue.append(other)
                elif level[other] != want:
                    raise LaneViolation('lane-levels', first_path.get(other, other.path))
        low = min(level.values())
        for binder, value in level.items():
            labels[binder] = (lane, value - low + 1)

    for binder in table.order:
        for other in table.conflicts[binder]:
            if labels[other] == labels[binder]:
                raise LaneViolation('lane-capture', binder.path)
    return LaneAssignment(SFL, labels)
