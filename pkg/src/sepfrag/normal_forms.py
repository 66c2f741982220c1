"""Structural DNF/CNF over basic formulas and quantifier shifting.

A basic formula is any formula that is not a conjunction or disjunction:
literals, truth constants and quantified subformulas. Regrouping works over
basics, so quantified subformulas stay indivisible units. Every regrouping is
followed by subsumption cleanup (duplicate removal, complementary literals,
absorption).
"""

from itertools import product
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

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
    Not,
    Or,
    SepfragError,
    Truth,
    VarName,
    children,
    conj,
    disj,
    free_vars,
    is_atomic,
    kind_of,
    negate,
    quantify,
    to_nnf,
    with_children,
)

Term = Tuple[Formula, ...]

DEFAULT_MAX_TERMS = 4096


class BudgetExceeded(SepfragError):
    """A regrouping or translation would exceed its size budget."""

    def __init__(self, message: str, trace: Optional[List] = None):
        super().__init__(message)
        self.trace: List = list(trace or [])


def is_basic(phi: Formula) -> bool:
    return not isinstance(phi, (And, Or))


def _complementary(a: Formula, b: Formula) -> bool:
    return (isinstance(a, Not) and a.body == b) or (isinstance(b, Not) and b.body == a)


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------

def simplify(phi: Formula) -> Formula:
    """Constant folding, flattening, duplicate and complementary-literal removal.

    Quantifiers over a truth constant fold to the constant (domains are
    nonempty) and vacuous bound variables are dropped.
    """
    if isinstance(phi, Not):
        body = simplify(phi.body)
        if isinstance(body, (Truth, Falsity)):
            return negate(body)
        return Not(body) if not isinstance(body, Not) else body.body
    if isinstance(phi, (And, Or)):
        is_and = isinstance(phi, And)
        unit, zero = (Truth, Falsity) if is_and else (Falsity, Truth)
        parts: List[Formula] = []
        for part in phi.parts:
            part = simplify(part)
            nested = part.parts if isinstance(part, type(phi)) else (part,)
            for item in nested:
                if isinstance(item, zero):
                    return item
                if isinstance(item, unit) or item in parts:
                    continue
                parts.append(item)
        for i, a in enumerate(parts):
            for b in parts[i + 1:]:
                if _complementary(a, b):
                    return FALSE if is_and else TRUE
        return conj(parts) if is_and else disj(parts)
    if isinstance(phi, (Forall, Exists)):
        body = simplify(phi.body)
        if isinstance(body, (Truth, Falsity)):
            return body
        live = free_vars(body)
        names = [name for name in phi.vars if name in live]
        return quantify(kind_of(phi), names, body)
    kids = children(phi)
    if kids:
        return with_children(phi, tuple(simplify(k) for k in kids))
    return phi


def assign_atoms(phi: Formula, values: Dict[Formula, bool]) -> Formula:
    """Replace atoms by truth constants according to values, then simplify."""
    def go(node: Formula) -> Formula:
        if is_atomic(node):
            if node in values:
                return TRUE if values[node] else FALSE
            return node
        if isinstance(node, (Forall, Exists)):
            return node
        kids = children(node)
        if not kids:
            return node
        return with_children(node, tuple(go(k) for k in kids))

    return simplify(go(phi))


# ---------------------------------------------------------------------------
# DNF / CNF over basics
# ---------------------------------------------------------------------------

def _clean(terms: List[Term], zero: type) -> List[Term]:
    """Drop terms holding the absorbing constant or a complementary pair, then absorb."""
    kept: List[Term] = []
    for term in terms:
        items: List[Formula] = []
        broken = False
        for item in term:
            if isinstance(item, zero):
                broken = True
                break
            if isinstance(item, (Truth, Falsity)) or item in items:
                continue
            if any(_complementary(item, other) for other in items):
                broken = True
                break
            items.append(item)
        if not broken:
            kept.append(tuple(items))
    unique: List[Term] = []
    seen = set()
    for term in kept:
        key = frozenset(term)
        if key not in seen:
            seen.add(key)
            unique.append(term)
    sets = [frozenset(t) for t in unique]
    # only a strictly smaller kept term can absorb; equal sizes never compare
    kept_by_size: Dict[int, List[FrozenSet[Formula]]] = {}
    minimal = set()
    for i in sorted(range(len(unique)), key=lambda j: len(sets[j])):
        current = sets[i]
        if any(other < current for size, group in kept_by_size.items()
               if size < len(current) for other in group):
            continue
        kept_by_size.setdefault(len(current), []).append(current)
        minimal.add(i)
    return [term for i, term in enumerate(unique) if i in minimal]


def _expand(phi: Formula, outer: type, max_terms: int) -> List[Term]:
    """Terms of the normal form whose top connective is `outer` (Or for DNF, And for CNF)."""
    inner = And if outer is Or else Or
    # In DNF a term is a conjunction: Falsity kills it; in CNF Truth kills a clause.
    zero = Falsity if outer is Or else Truth
    empty_outer = Falsity if outer is Or else Truth

    if isinstance(phi, empty_outer):
        return []
    if isinstance(phi, outer):
        terms: List[Term] = []
        for part in phi.parts:
            terms.extend(_expand(part, outer, max_terms))
            if len(terms) > max_terms:
                raise BudgetExceeded(f"Normal form exceeds {max_terms} terms")
        return _clean(terms, zero)
    if isinstance(phi, inner):
        acc: List[Term] = [()]
        for part in phi.parts:
            sub = _expand(part, outer, max_terms)
            if len(acc) * len(sub) > max_terms * 4:
                raise BudgetExceeded(f"Normal form exceeds {max_terms} terms")
            acc = _clean([a + b for a in acc for b in sub], zero)
            if len(acc) > max_terms:
                raise BudgetExceeded(f"Normal form exceeds {max_terms} terms")
        return acc
    return _clean([(phi,)], zero)


def dnf_terms(phi: Formula, max_terms: int = DEFAULT_MAX_TERMS) -> List[Term]:
    """Disjunction of conjunctions of basics; [] means false, [()] means true."""
    return _expand(phi, Or, max_terms)


def cnf_clauses(phi: Formula, max_terms: int = DEFAULT_MAX_TERMS) -> List[Term]:
    """Conjunction of disjunctions of basics; [] means true, [()] means false."""
    return _expand(phi, And, max_terms)


def from_dnf(terms: Iterable[Term]) -> Formula:
    return disj(conj(term) for term in terms)


def from_cnf(clauses: Iterable[Term]) -> Formula:
    return conj(disj(clause) for clause in clauses)


def to_dnf(phi: Formula, max_terms: int = DEFAULT_MAX_TERMS) -> Formula:
    return from_dnf(dnf_terms(phi, max_terms))


def to_cnf(phi: Formula, max_terms: int = DEFAULT_MAX_TERMS) -> Formula:
    return from_cnf(cnf_clauses(phi, max_terms))


def split_on(
    term: Term, predicate: Callable[[Formula], bool]
) -> Tuple[List[Formula], List[Formula]]:
    """Partition a term into (matching, rest), keeping order."""
    hit: List[Formula] = []
    rest: List[Formula] = []
    for item in term:
        (hit if predicate(item) else rest).append(item)
    return hit, rest


# ---------------------------------------------------------------------------
# Pushing a single quantifier onto the basics that mention its variable
# ---------------------------------------------------------------------------

def _literal_atoms(phi: Formula, name: VarName) -> List[Formula]:
    """Atoms containing `name` that occur as literals outside every quantifier."""
    found: List[Formula] = []

    def go(node: Formula) -> None:
        if isinstance(node, (And, Or)):
            for part in node.parts:
                go(part)
            return
        atom = node.body if isinstance(node, Not) else node
        if is_atomic(atom) and name in free_vars(atom) and atom not in found:
            found.append(atom)

    go(phi)
    return found


def push_quantifier(
    kind: str, name: VarName, body: Formula, max_terms: int = DEFAULT_MAX_TERMS
) -> Formula:
    """Move Q name inward onto the basics that contain it.

    For an existential the body is brought into DNF over basics and the
    quantifier is pushed onto each term's slice of basics mentioning the
    variable; universals use CNF dually. When the direct normal form is too
    large, the body is split on the truth values of the literal atoms
    mentioning the variable first, which keeps the result linear in the number
    of such value combinations.

    Raises:
        BudgetExceeded: if neither regrouping fits max_terms.
    """
    body = simplify(body)
    if name not in free_vars(body):
        return body
    try:
        return _push_direct(kind, name, body, max_terms)
    except BudgetExceeded:
        return _push_by_types(kind, name, body, max_terms)


def _push_direct(kind: str, name: VarName, body: Formula, max_terms: int) -> Formula:
    mentions = lambda b: name in free_vars(b)  # noqa: E731
    if kind == EXISTS:
        pieces = []
        for term in dnf_terms(body, max_terms):
            hit, rest = split_on(term, mentions)
            pieces.append(conj(rest + [quantify(EXISTS, [name], conj(hit))] if hit else rest))
        return simplify(disj(pieces))
    pieces = []
    for clause in cnf_clauses(body, max_terms):
        hit, rest = split_on(clause, mentions)
        pieces.append(disj(rest + [quantify(FORALL, [name], disj(hit))] if hit else rest))
    return simplify(conj(pieces))


def _push_by_types(kind: str, name: VarName, body: Formula, max_terms: int) -> Formula:
    literal_atoms = _literal_atoms(body, name)
    if not literal_atoms or 2 ** len(literal_atoms) > max_terms:
        raise BudgetExceeded(
            f"Cannot regroup {kind} {name}: {len(literal_atoms)} literal atoms over budget"
        )
    mentions = lambda b: name in free_vars(b)  # noqa: E731
    pieces: List[Formula] = []
    for bits in product((True, False), repeat=len(literal_atoms)):
        values = dict(zip(literal_atoms, bits))
        rest_body = assign_atoms(body, values)
        type_literals = [a if v else Not(a) for a, v in values.items()]
        if kind == EXISTS:
            if isinstance(rest_body, Falsity):
                continue
            for term in dnf_terms(rest_body, max_terms):
                hit, rest = split_on(term, mentions)
                pieces.append(conj(rest + [Exists((name,), conj(type_literals + hit))]))
        else:
            if isinstance(rest_body, Truth):
                continue
            negated_type = [negate(lit) for lit in type_literals]
            for clause in cnf_clauses(rest_body, max_terms):
                hit, rest = split_on(clause, mentions)
                pieces.append(disj(rest + [Forall((name,), disj(negated_type + hit))]))
        if len(pieces) > max_terms:
            raise BudgetExceeded(f"Regrouping {kind} {name} exceeds {max_terms} pieces")
    combined = disj(pieces) if kind == EXISTS else conj(pieces)
    return simplify(combined)


def push_block(
    kind: str, names: Sequence[VarName], body: Formula, max_terms: int = DEFAULT_MAX_TERMS
) -> Formula:
    """Push a quantifier block inward one variable at a time, innermost first."""
    result = body
    for name in reversed(list(names)):
        result = push_quantifier(kind, name, result, max_terms)
    return result


def miniscope(phi: Formula, max_terms: int = DEFAULT_MAX_TERMS) -> Formula:
    """Regroup bottom-up so every quantifier scopes only basics mentioning its variable.

    phi must be in negation normal form and rectified.
    """
    if isinstance(phi, (Forall, Exists)):
        body = miniscope(phi.body, max_terms)
        return push_block(kind_of(phi), phi.vars, body, max_terms)
    if isinstance(phi, (And, Or)):
        return simplify(with_children(phi, tuple(miniscope(p, max_terms) for p in phi.parts)))
    return phi


# ---------------------------------------------------------------------------
# Rule-based quantifier shifting
# ---------------------------------------------------------------------------

def shift_in(kind: str, name: VarName, phi: Formula) -> Formula:
    """Move one quantifier inward using only the distribution and swap rules."""
    if name not in free_vars(phi):
        return phi
    distributes = Or if kind == EXISTS else And
    if isinstance(phi, distributes):
        return disj(shift_in(kind, name, p) for p in phi.parts) if kind == EXISTS else conj(
            shift_in(kind, name, p) for p in phi.parts
        )
    if isinstance(phi, (And, Or)):
        hit = [p for p in phi.parts if name in free_vars(p)]
        rest = [p for p in phi.parts if name not in free_vars(p)]
        combine = conj if isinstance(phi, And) else disj
        if rest:
            return combine(rest + [shift_in(kind, name, combine(hit))])
        return quantify(kind, [name], phi)
    if isinstance(phi, (Forall, Exists)) and kind_of(phi) == kind:
        inner = shift_in(kind, name, phi.body)
        return shift_block_in(kind, phi.vars, inner)
    return quantify(kind, [name], phi)


def shift_block_in(kind: str, names: Sequence[VarName], body: Formula) -> Formula:
    result = body
    for name in reversed(list(names)):
        result = shift_in(kind, name, result)
    return result


def shift_quantifiers_rules(phi: Formula) -> Formula:
    """Innermost-first application of the distribution, pull-out and swap rules."""
    if isinstance(phi, (Forall, Exists)):
        body = shift_quantifiers_rules(phi.body)
        return shift_block_in(kind_of(phi), phi.vars, body)
    kids = children(phi)
    if not kids:
        return phi
    rebuilt = with_children(phi, tuple(shift_quantifiers_rules(k) for k in kids))
    if isinstance(rebuilt, And):
        return conj(rebuilt.parts)
    if isinstance(rebuilt, Or):
        return disj(rebuilt.parts)
    return rebuilt


def nnf_negate(phi: Formula) -> Formula:
    """Negation normal form of the negation of phi."""
    return to_nnf(phi, negated=True)
