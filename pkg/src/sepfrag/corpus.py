"""Seeded random sentence generators for the fragments.

Generators build sentences in the shape of their fragment and every result is
confirmed by the membership deciders before it is handed out. Fragments
without a direct construction are sampled from a broader shape and
filtered; when sampling keeps failing the generator falls back to a member
of a contained base fragment.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .fragments import FragmentId, fragment_label, membership, parse_fragment
from .syntax import (
    EXISTS,
    FORALL,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    SepfragError,
    Term,
    Var,
    VarName,
    build_prenex,
    conj,
    disj,
)
from .witnesses import WitnessFamily, gen_witness

CORPUS_FRAGMENTS = (
    'MFO', 'BSR', 'SF', 'SBSR', 'AF', 'SAF', 'SGKS', 'GF', 'SGF', 'SFO2', 'FL', 'SFL', 'mixed',
)
DEFAULT_MAX_TRIES = 200

T = TypeVar('T')

# Predicate names per arity; a name never changes its arity across a corpus.
_PREDICATES: Dict[int, Tuple[str, ...]] = {1: ('P', 'Q', 'R'), 2: ('S', 'T'), 3: ('U',)}


class CorpusExhausted(SepfragError):
    """No member of the fragment turned up within the allowed number of tries."""


@dataclass
class CorpusEntry:
    """One generated sentence.

    Attributes:
        fragment: Label of the fragment it was generated for.
        formula: The sentence.
        tags: 'derived' for cut-down witness variants, 'fallback' when a
            contained fragment supplied the sentence.
    """
    fragment: str
    formula: Formula
    tags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        from .parser import print_formula

        return {'fragment': self.fragment, 'formula': print_formula(self.formula),
                'tags': list(self.tags)}


class CorpusGenerator:
    """Random sentences per fragment from a seeded numpy generator.

    Args:
        seed: Seed of the generator; equal seeds give equal corpora.
        max_atoms: Upper bound on the atoms of a quantifier-free matrix.
        max_arity: Largest predicate arity used.
        equality: Allow equality atoms where the fragment does.
        constants: Allow the constant c where the fragment does.
    """

    def __init__(
        self,
        seed: int = 0,
        max_atoms: int = 4,
        max_arity: int = 2,
        equality: bool = True,
        constants: bool = False,
        max_tries: int = DEFAULT_MAX_TRIES,
    ):
        self.rng = np.random.default_rng(seed)
        self.max_atoms = max_atoms
        self.max_arity = max(1, min(max_arity, max(_PREDICATES)))
        self.equality = equality
        self.constants = constants
        self.max_tries = max_tries
        self._builders: Dict[str, Callable[[], Formula]] = {
            'MFO': self._mfo,
            'BSR': self._bsr,
            'SF': self._sf,
            'SBSR': self._prenex_sample,
            'AF': self._af,
            'SAF': self._prenex_sample_plain,
            'SGKS': self._prenex_sample_plain,
            'GF': self._gf,
            'SGF': self._sgf,
            'SFO2': self._sfo2,
            'FL': self._fl,
            'SFL': self._sfl,
        }
        self._fallbacks = {'SBSR': 'SF', 'SAF': 'AF', 'SGKS': 'AF', 'SGF': 'GF', 'SFL': 'FL'}

    # -- small pieces ------------------------------------------------------

    def _pick(self, items: Sequence[T]) -> T:
        return items[int(self.rng.integers(len(items)))]

    def _coin(self, p: float = 0.5) -> bool:
        return bool(self.rng.random() < p)

    def _atom(self, pool: Sequence[VarName], max_arity: Optional[int] = None,
              equality: bool = False, constants: bool = False) -> Formula:
        terms: List[Term] = [Var(v) for v in pool] + ([Const('c')] if constants else [])
        if equality and len(terms) > 1 and self._coin(0.15):
            return Eq(self._pick(terms), self._pick(terms))
        top = min(max_arity or self.max_arity, self.max_arity)
        arity = int(self.rng.integers(1, top + 1))
        pred = self._pick(_PREDICATES[arity])
        return Atom(pred, tuple(self._pick(terms) for _ in range(arity)))

    def _combine(self, atoms: List[Formula]) -> Formula:
        """Random Boolean combination using every atom once."""
        if len(atoms) == 1:
            return Not(atoms[0]) if self._coin(0.3) else atoms[0]
        cut = int(self.rng.integers(1, len(atoms)))
        left, right = self._combine(atoms[:cut]), self._combine(atoms[cut:])
        kind = int(self.rng.integers(4))
        if kind == 0:
            return conj([left, right])
        if kind == 1:
            return disj([left, right])
        if kind == 2:
            return Implies(left, right)
        return Iff(left, right)

    def _count(self) -> int:
        return int(self.rng.integers(1, self.max_atoms + 1))

    def _matrix(self, pools: Sequence[Sequence[VarName]], max_arity: Optional[int] = None,
                equality: bool = False, constants: bool = False) -> Formula:
        """Matrix whose atoms each draw their variables from a single pool."""
        usable = [p for p in pools if p]
        atoms = [
            self._atom(self._pick(usable), max_arity, equality, constants)
            for _ in range(self._count())
        ]
        return self._combine(atoms)

    def _names(self, prefix: str, count: int) -> List[VarName]:
        return [f"{prefix}{i}" for i in range(1, count + 1)]

    # -- prenex shapes -----------------------------------------------------

    def _mfo(self) -> Formula:
        names = self._names('x', int(self.rng.integers(1, 4)))
        prefix = [(self._pick((FORALL, EXISTS)), v) for v in names]
        return build_prenex(prefix, self._matrix([names], max_arity=1))

    def _bsr(self) -> Formula:
        zs = self._names('z', int(self.rng.integers(0, 3)))
        xs = self._names('x', int(self.rng.integers(1, 3)))
        prefix = [(EXISTS, v) for v in zs] + [(FORALL, v) for v in xs]
        matrix = self._matrix([zs + xs], equality=self.equality, constants=self.constants)
        return build_prenex(prefix, matrix)

    def _interleaved(self, xs: List[VarName], ys: List[VarName]) -> List[Tuple[str, VarName]]:
        """Universals xs and existentials ys in a random order that keeps each list's order."""
        order = [0] * len(xs) + [1] * len(ys)
        self.rng.shuffle(order)
        xi, yi = iter(xs), iter(ys)
        return [(FORALL, next(xi)) if side == 0 else (EXISTS, next(yi)) for side in order]

    def _sf(self) -> Formula:
        zs = self._names('z', int(self.rng.integers(0, 2)))
        xs = self._names('x', int(self.rng.integers(1, 3)))
        ys = self._names('y', int(self.rng.integers(1, 3)))
        prefix = [(EXISTS, v) for v in zs] + self._interleaved(xs, ys)
        matrix = self._matrix([zs + xs, zs + ys], equality=self.equality,
                              constants=self.constants)
        return build_prenex(prefix, matrix)

    def _af(self) -> Formula:
        zs = self._names('z', int(self.rng.integers(0, 2)))
        ys = self._names('y', int(self.rng.integers(0, 3)))
        prefix = [(EXISTS, v) for v in zs] + [(FORALL, 'x1')] + [(EXISTS, v) for v in ys]
        return build_prenex(prefix, self._matrix([zs + ['x1'] + ys]))

    def _random_prefix(self) -> List[Tuple[str, VarName]]:
        names = self._names('v', int(self.rng.integers(2, 5)))
        return [(self._pick((FORALL, EXISTS)), v) for v in names]

    def _prenex_sample(self) -> Formula:
        prefix = self._random_prefix()
        names = [v for _, v in prefix]
        pools = [names[:i + 1] for i in range(len(names))] + [[v] for v in names]
        return build_prenex(prefix, self._matrix(pools, equality=self.equality))

    def _prenex_sample_plain(self) -> Formula:
        prefix = self._random_prefix()
        names = [v for _, v in prefix]
        pools = [names[i:i + 2] for i in range(len(names))]
        return build_prenex(prefix, self._matrix(pools))

    def _sfo2(self) -> Formula:
        prefix = self._interleaved(['x1', 'x2'], ['y1', 'y2'])
        return build_prenex(prefix, self._matrix([['x1', 'x2'], ['y1', 'y2']], max_arity=2))

    # -- guarded shapes ----------------------------------------------------

    def _guard(self, names: Sequence[VarName]) -> Atom:
        return Atom(f"G{len(names)}", tuple(Var(v) for v in names))

    def _gf_formula(self, free: List[VarName], depth: int, counter: List[int]) -> Formula:
        if depth == 0 or self._coin(0.3):
            if not free:
                return Atom('A', ())
            return self._combine([self._atom(free, equality=self.equality)
                                  for _ in range(int(self.rng.integers(1, 3)))])
        counter[0] += 1
        fresh = f"u{counter[0]}"
        kept = [v for v in free if self._coin()]
        scope = kept + [fresh]
        body = self._gf_formula(scope, depth - 1, counter)
        guard = self._guard(scope)
        if self._coin():
            quantified: Formula = Forall((fresh,), Implies(guard, body))
        else:
            quantified = Exists((fresh,), conj([guard, body]))
        if free and self._coin(0.4):
            return self._combine([quantified, self._atom(free)])
        return quantified

    def _gf(self) -> Formula:
        counter = [0]
        parts = [self._gf_formula([], 3, counter) for _ in range(int(self.rng.integers(1, 3)))]
        return self._combine(parts)

    def _sgf(self) -> Formula:
        """Alternating guarded chain over two separated lanes x and y."""
        depth = int(self.rng.integers(1, 3))
        xs, ys = self._names('x', depth), self._names('y', depth)
        body = self._matrix([xs, ys], max_arity=1)
        for j in range(1, depth + 1):
            y_guard = Atom(f"T{j}", tuple(Var(v) for v in ys[j - 1:]))
            x_guard = Atom(f"R{j}", tuple(Var(v) for v in xs[j - 1:]))
            body = Exists((f"y{j}",), conj([y_guard, body]))
            body = Forall((f"x{j}",), Implies(x_guard, body))
        return body

    # -- fluted shapes -----------------------------------------------------

    def _fluted(self, prefix: str, depth: int, top: int) -> Formula:
        """Fluted formula over prefix1..prefix{depth}; atoms take suffixes of that list."""
        atoms: List[Formula] = []
        for _ in range(int(self.rng.integers(1, 3))):
            if depth == 0:
                atoms.append(Atom('A', ()))
                continue
            arity = int(self.rng.integers(1, min(depth, self.max_arity) + 1))
            pred = _PREDICATES[arity][0] if prefix == 'x' else _PREDICATES[arity][-1]
            atoms.append(Atom(pred, tuple(Var(f"{prefix}{i}")
                                          for i in range(depth - arity + 1, depth + 1))))
        if depth < top:
            inner = self._fluted(prefix, depth + 1, top)
            name = f"{prefix}{depth + 1}"
            atoms.append(Forall((name,), inner) if self._coin() else Exists((name,), inner))
        return self._combine(atoms)

    def _fl(self) -> Formula:
        top = int(self.rng.integers(1, 4))
        inner = self._fluted('x', 1, top)
        return Forall(('x1',), inner) if self._coin() else Exists(('x1',), inner)

    def _sfl(self) -> Formula:
        x_lane = self._fl()
        inner = self._fluted('y', 1, int(self.rng.integers(1, 3)))
        y_lane = Forall(('y1',), inner) if self._coin() else Exists(('y1',), inner)
        return self._combine([x_lane, y_lane])

    # -- public ------------------------------------------------------------

    def _member(self, fragment: FragmentId, k: Optional[int], phi: Formula) -> bool:
        return membership(phi, fragment, k).verdict

    def entry(self, label: str) -> CorpusEntry:
        """One sentence of the fragment named by label.

        Raises:
            ValueError: for a label without a generator.
            CorpusExhausted: if neither sampling nor the fallback yields a member.
        """
        if label == 'mixed':
            return self.entry(self._pick(CORPUS_FRAGMENTS[:-1]))
        fragment, k = parse_fragment(label)
        name = fragment_label(fragment, k)
        if name not in self._builders:
            raise ValueError(
                f"No generator for {label}; expected one of {', '.join(CORPUS_FRAGMENTS)}"
            )
        build = self._builders[name]
        for _ in range(self.max_tries):
            phi = build()
            if self._member(fragment, k, phi):
                return CorpusEntry(name, phi)
        fallback = self._fallbacks.get(name)
        if fallback is not None:
            base = self.entry(fallback)
            if self._member(fragment, k, base.formula):
                return CorpusEntry(name, base.formula, ['fallback'])
        raise CorpusExhausted(f"No {name} sentence within {self.max_tries} tries")

    def generate(self, label: str, count: int) -> List[CorpusEntry]:
        """count sentences of the fragment named by label ('mixed' draws a fragment per entry)."""
        return [self.entry(label) for _ in range(count)]


def witness_variants(
    family: WitnessFamily, n_values: Sequence[int], arity: int
) -> List[CorpusEntry]:
    """Cut-down witness sentences, tagged as derived material."""
    from .witnesses import source_fragment

    source, k = source_fragment(family)
    return [
        CorpusEntry(fragment_label(source, k), gen_witness(family, n, arity), ['derived'])
        for n in n_values
    ]
