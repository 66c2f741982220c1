"""Separateness of variable sets and quantifier-prefix bookkeeping.

Two sets of variables X and Y are separated in a formula when no atom
contains variables from both. The separated fragments differ only in which
sets must be separated and in how the quantifier prefix may be arranged, so
the checks here are shared by every classifier and translation.
"""

from dataclasses import asdict, dataclass, field
from math import inf
from typing import (
    TYPE_CHECKING,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Optional,
    Set,
    Tuple,
    Union,
)

from .syntax import (
    FORALL,
    Exists,
    Forall,
    Formula,
    NotASubformula,
    Path,
    SepfragError,
    VarName,
    all_vars,
    atom_vars,
    atoms,
    free_vars,
    is_prenex,
    is_rectified,
    prefix_blocks,
    resolve,
    walk,
    walk_scoped,
)

if TYPE_CHECKING:
    from .guards import GuardAnnotation


class OverlappingSets(SepfragError):
    """The two variable sets given to a separateness check intersect."""


class NotPrenex(SepfragError):
    """A prefix-based operation received a formula that is not prenex and rectified."""


class NoGuardAnnotation(SepfragError):
    """guard_separated was called without a guard annotation."""


PrefixPosition = Tuple[Tuple[str, VarName], ...]
Index = Union[int, float]


@dataclass
class VariablePartition:
    """Certified partition of a sentence's variables.

    Attributes:
        classes: Class label to variable set, e.g. ``{'Y': {...}, 'X1': {...}}``.
        kind: Which fragment's schema the partition follows.
        auxiliary: For SAF/SGKS, U-class label to its reference variables.
    """
    classes: Dict[str, FrozenSet[VarName]]
    kind: str
    auxiliary: Dict[str, Tuple[VarName, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.classes = {label: frozenset(vs) for label, vs in self.classes.items()}
        seen: Set[VarName] = set()
        for label, names in self.classes.items():
            if seen & names:
                raise OverlappingSets(f"Partition class {label} overlaps another class")
            seen |= names

    def class_of(self, name: VarName) -> Optional[str]:
        for label, names in self.classes.items():
            if name in names:
                return label
        return None

    def covered(self) -> FrozenSet[VarName]:
        result: Set[VarName] = set()
        for names in self.classes.values():
            result |= names
        return frozenset(result)

    def get(self, label: str) -> FrozenSet[VarName]:
        return self.classes.get(label, frozenset())

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        result = asdict(self)
        result['classes'] = {k: sorted(v) for k, v in self.classes.items()}
        result['auxiliary'] = {k: list(v) for k, v in self.auxiliary.items()}
        return result

    def describe(self) -> str:
        """Compact text such as ``Y={u,y} X2={x} X3={z}``; empty classes are omitted."""
        parts = []
        for label, names in self.classes.items():
            if not names:
                continue
            text = f"{label}={{{','.join(sorted(names))}}}"
            if label in self.auxiliary:
                text += f"@{','.join(self.auxiliary[label])}"
            parts.append(text)
        return ' '.join(parts)


class DisjointSets:
    """Union-find over hashable items with path compression."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: Dict[Hashable, Hashable] = {}
        for item in items:
            self.add(item)

    def add(self, item: Hashable) -> None:
        self.parent.setdefault(item, item)

    def find(self, item: Hashable) -> Hashable:
        self.add(item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: Hashable, b: Hashable) -> Hashable:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra

    def union_all(self, items: Iterable[Hashable]) -> None:
        items = list(items)
        for item in items[1:]:
            self.union(items[0], item)

    def components(self) -> List[List[Hashable]]:
        """Components in order of first insertion, members in insertion order."""
        groups: Dict[Hashable, List[Hashable]] = {}
        for item in self.parent:
            groups.setdefault(self.find(item), []).append(item)
        return list(groups.values())


def _check_disjoint(
    x: Iterable[VarName], y: Iterable[VarName]
) -> Tuple[Set[VarName], Set[VarName]]:
    xs, ys = set(x), set(y)
    if xs & ys:
        raise OverlappingSets(f"Sets overlap on {sorted(xs & ys)}")
    return xs, ys


def touches_both(names: Set[VarName], xs: Set[VarName], ys: Set[VarName]) -> bool:
    return bool(names & xs) and bool(names & ys)


def separated(phi: Formula, x: Iterable[VarName], y: Iterable[VarName]) -> bool:
    """True iff no atom of phi contains variables from both x and y.

    Raises:
        OverlappingSets: if x and y intersect.
    """
    xs, ys = _check_disjoint(x, y)
    return not any(touches_both(atom_vars(a), xs, ys) for a in atoms(phi))


def strictly_separated(phi: Formula, x: Iterable[VarName], y: Iterable[VarName]) -> bool:
    """Separated, and no quantified subformula mentions variables from both sets."""
    xs, ys = _check_disjoint(x, y)
    if not separated(phi, xs, ys):
        return False
    for _, node in walk(phi):
        if isinstance(node, (Forall, Exists)) and touches_both(all_vars(node), xs, ys):
            return False
    return True


def guard_separated(
    phi: Formula,
    x: Iterable[VarName],
    y: Iterable[VarName],
    annotation: Optional['GuardAnnotation'],
) -> bool:
    """Separated, and no guard atom recorded in the annotation mentions both sets.

    Raises:
        NoGuardAnnotation: if annotation is None.
    """
    if annotation is None:
        raise NoGuardAnnotation("guard_separated needs the guard annotation of phi")
    xs, ys = _check_disjoint(x, y)
    if not separated(phi, xs, ys):
        return False
    for guard in annotation.guard_atoms():
        if touches_both(atom_vars(guard), xs, ys):
            return False
    return True


# ---------------------------------------------------------------------------
# Prefix bookkeeping
# ---------------------------------------------------------------------------

def _require_prenex(phi: Formula) -> None:
    if not is_prenex(phi) or not is_rectified(phi):
        raise NotPrenex("Expected a prenex, rectified formula")


def block_segments(phi: Formula) -> List[Tuple[Tuple[VarName, ...], Tuple[VarName, ...]]]:
    """Segment a prenex prefix into pairs (x_i, y_i) of universal and existential blocks.

    A leading existential block forms segment 1 with an empty universal part.
    """
    _require_prenex(phi)
    blocks, _ = prefix_blocks(phi)
    segments: List[Tuple[Tuple[VarName, ...], Tuple[VarName, ...]]] = []
    for block in blocks:
        if block.kind == FORALL:
            segments.append((block.vars, ()))
        elif segments and not segments[-1][1]:
            segments[-1] = (segments[-1][0], block.vars)
        else:
            segments.append(((), block.vars))
    return segments


def index_map(phi: Formula) -> Dict[VarName, int]:
    """var_index for every prefix variable at once."""
    result: Dict[VarName, int] = {}
    for number, (universals, existentials) in enumerate(block_segments(phi), start=1):
        for name in universals + existentials:
            result[name] = number
    return result


def var_index(phi: Formula, name: VarName) -> Index:
    """Segment number of a prefix variable; infinity for variables outside the prefix.

    Raises:
        NotPrenex: if phi is not prenex and rectified.
    """
    return index_map(phi).get(name, inf)


def phi_prefix(phi: Formula, path: Path) -> PrefixPosition:
    """Binders of the free variables of the subformula at path, outermost first.

    Raises:
        NotASubformula: if path does not address a subformula of phi.
    """
    for node_path, node, scope in walk_scoped(phi):
        if node_path != path:
            continue
        wanted = free_vars(node)
        binders = []
        for name in wanted:
            binder = resolve(scope, name)
            if binder is not None:
                binders.append(binder)
        order = {binder: i for i, binder in enumerate(scope)}
        binders.sort(key=lambda b: order[b])
        return tuple((b.kind, b.var) for b in binders)
    raise NotASubformula(f"Path {path} does not address a subformula")


def terminal_prefix(prefix: PrefixPosition) -> PrefixPosition:
    """Longest suffix starting with a universal quantifier; empty if there is none."""
    for position, (kind, _) in enumerate(prefix):
        if kind == FORALL:
            return tuple(prefix[position:])
    return ()


def co_occurrence_components(
    phi: Formula, names: Optional[Iterable[VarName]] = None
) -> List[FrozenSet[VarName]]:
    """Connected components of the graph linking variables that share an atom.

    Only variables in ``names`` (all variables by default) are considered.
    """
    scope = set(all_vars(phi)) if names is None else set(names)
    sets = DisjointSets(sorted(scope))
    for a in atoms(phi):
        sets.union_all(sorted(atom_vars(a) & scope))
    return [frozenset(c) for c in sets.components()]
