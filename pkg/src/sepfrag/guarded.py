"""Separated guarded fragments into their guarded base fragments.

SLGF into LGF: a guarded quantifier whose body also talks about variables
outside its guard is distributed over a conjunction (universal) or
disjunction (existential) of its body, so that every copy only sees guard
variables. SGNFO into GNFO: existentials are pushed inward until every
subformula under a separated negation belongs to one guard's class, and the
negation is then split into one guarded negation per class.
"""

from typing import Dict, List, Optional, Sequence, Tuple

from .fragments import FragmentId, NotSGNFO, NotSLGF, membership
from .guards import SGF, SLGF, GuardInfo, guarded_nnf, guarded_split, negation_guard
from .normal_forms import cnf_clauses, dnf_terms, simplify
from .syntax import (
    EXISTS,
    FORALL,
    And,
    Exists,
    Falsity,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Path,
    VarName,
    children,
    conj,
    disj,
    free_vars,
    is_atomic,
    is_quantifier_free,
    negate,
    quantify,
    to_nnf,
    with_children,
)
from .transforms import BlowupBudget, ShapeMismatch, StepCallback, TraceEvent, Tracer, verified


# ---------------------------------------------------------------------------
# SLGF -> LGF
# ---------------------------------------------------------------------------

def _open(body: Formula) -> Formula:
    """Turn the leftover premise of a universal body into a disjunction."""
    if isinstance(body, Implies):
        return disj([to_nnf(body.left, negated=True), body.right])
    return body


def _rebuild(info: GuardInfo, body: Formula) -> Formula:
    guard = conj(info.guard)
    if info.kind == FORALL:
        if isinstance(body, Falsity):
            return quantify(FORALL, info.bound, Not(guard))
        return quantify(FORALL, info.bound, Implies(guard, body))
    return quantify(EXISTS, info.bound, conj(list(info.guard) + [body]))


def _distribute(info: GuardInfo, body: Formula, tracer: Tracer) -> Formula:
    """Guarded quantifier pushed onto the parts of its body that mention its variables."""
    bound = set(info.bound)
    mentions = lambda b: bool(free_vars(b) & bound)  # noqa: E731
    pieces: List[Formula] = []
    with tracer.regrouping():
        if info.kind == FORALL:
            for clause in cnf_clauses(body, tracer.budget.max_terms):
                hit = [b for b in clause if mentions(b)]
                rest = [b for b in clause if not mentions(b)]
                pieces.append(disj(rest + [_rebuild(info, disj(hit))]))
            return simplify(conj(pieces))
        for term in dnf_terms(body, tracer.budget.max_terms):
            hit = [b for b in term if mentions(b)]
            rest = [b for b in term if not mentions(b)]
            pieces.append(conj(rest + [_rebuild(info, conj(hit))]))
    return simplify(disj(pieces))


def _lift_guards(phi: Formula, mode: str, tracer: Tracer, path: Path = ()) -> Formula:
    if isinstance(phi, (Forall, Exists)):
        info = guarded_split(phi, mode)
        if info is None:
            raise ShapeMismatch(f"Quantifier at {list(path)} lost its guard")
        body = _lift_guards(_open(info.body), mode, tracer, path + (0,))
        if not info.outside:
            return _rebuild(info, body)
        return tracer.record('distribute-guard', path, phi, _distribute(info, body, tracer))
    kids = children(phi)
    if not kids or is_quantifier_free(phi):
        return phi
    return with_children(
        phi, tuple(_lift_guards(k, mode, tracer, path + (i,)) for i, k in enumerate(kids))
    )


def slgf_to_lgf(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent LGF sentence for an SLGF sentence; SGF inputs give GF sentences.

    LGF inputs come back unchanged.

    Raises:
        NotSLGF: if phi is not in SLGF.
        BudgetExceeded: with the step history attached.
    """
    if membership(phi, FragmentId.LGF).verdict:
        return phi
    check = membership(phi, FragmentId.SLGF)
    if not check.verdict:
        raise NotSLGF(f"Not an SLGF sentence: {check.describe()}", check)
    strict = membership(phi, FragmentId.SGF).verdict
    mode, target = (SGF, FragmentId.GF) if strict else (SLGF, FragmentId.LGF)
    tracer = Tracer(budget, on_step, history)
    normal = guarded_nnf(phi, mode)
    result = _lift_guards(normal, mode, tracer)
    tracer.record('lift', (), phi, result)
    return verified(result, target)


# ---------------------------------------------------------------------------
# SGNFO -> GNFO
# ---------------------------------------------------------------------------

def _covered(negation: Formula, atoms_: Sequence[Formula]) -> bool:
    need = free_vars(negation)
    return any(need <= free_vars(a) for a in atoms_)


def _guarded_slice(name: VarName, term: Sequence[Formula]) -> Tuple[List[Formula], List[Formula]]:
    """Basics mentioning name, plus the negations whose guards only the slice keeps."""
    hit = [b for b in term if name in free_vars(b)]
    rest = [b for b in term if name not in free_vars(b)]
    moved = True
    while moved:
        moved = False
        guards = [b for b in rest if is_atomic(b)]
        for b in list(rest):
            if isinstance(b, Not) and free_vars(b) and not _covered(b, guards):
                rest.remove(b)
                hit.append(b)
                moved = True
    return hit, rest


def _push_exists(name: VarName, body: Formula, tracer: Tracer) -> Formula:
    """exists name. body regrouped over a disjunction of conjunctions of basics.

    A negation whose guard moves under the quantifier moves with it.
    """
    body = simplify(body)
    if name not in free_vars(body):
        return body
    pieces = []
    with tracer.regrouping():
        terms = dnf_terms(body, tracer.budget.max_terms)
    for term in terms:
        hit, rest = _guarded_slice(name, term)
        pieces.append(conj(rest + ([Exists((name,), conj(hit))] if hit else [])))
    return simplify(disj(pieces))


def _classes(info: GuardInfo) -> Dict[VarName, int]:
    owner: Dict[VarName, int] = {}
    for number, (share, _) in enumerate(info.division, start=1):
        for name in share:
            owner[name] = number
    return owner


def _class_of(basic: Formula, owner: Dict[VarName, int], path: Path) -> int:
    found = {owner[v] for v in free_vars(basic) if v in owner}
    if len(found) > 1:
        raise ShapeMismatch(f"Subformula under the negation at {list(path)} spans guard classes")
    return found.pop() if found else 0


def _split_negation(
    siblings: Sequence[Formula], psi: Formula, info: GuardInfo, tracer: Tracer, path: Path
) -> Formula:
    """~psi under guards A_1..A_n as OR_i AND_k (A_k & ~eta_ik) & ~eta_i0.

    psi is regrouped into a conjunction of clauses whose disjuncts each belong
    to one class; class 0 collects the sentences. Each ~eta is pushed through
    its disjunction so that every negation ends up next to A_k.
    """
    owner = _classes(info)
    with tracer.regrouping():
        clauses = cnf_clauses(psi, tracer.budget.max_terms)
    options = []
    for clause in clauses:
        grouped: Dict[int, List[Formula]] = {}
        for basic in clause:
            grouped.setdefault(_class_of(basic, owner, path), []).append(basic)
        parts: List[Formula] = []
        for number in sorted(grouped):
            negated = [negate(b) for b in grouped[number]]
            if number == 0:
                parts.extend(negated)
            else:
                parts.extend([info.guard[number - 1]] + negated)
        options.append(conj(parts))
    return conj(list(siblings) + [disj(options)])


def _lift_negations(phi: Formula, tracer: Tracer, path: Path = ()) -> Formula:
    if is_quantifier_free(phi) and not isinstance(phi, (And, Or, Not)):
        return phi
    if isinstance(phi, Exists):
        body = _lift_negations(phi.body, tracer, path + (0,))
        for name in reversed(phi.vars):
            body = _push_exists(name, body, tracer)
        return tracer.record('shift-exists', path, phi, body)
    if isinstance(phi, Not):
        return Not(_lift_negations(phi.body, tracer, path + (0,)))
    if isinstance(phi, Or):
        return disj(_lift_negations(p, tracer, path + (i,)) for i, p in enumerate(phi.parts))
    if isinstance(phi, And):
        parts = [_lift_negations(p, tracer, path + (i,)) for i, p in enumerate(phi.parts)]
        for index, part in enumerate(parts):
            if not isinstance(part, Not) or not free_vars(part.body):
                continue
            siblings = parts[:index] + parts[index + 1:]
            if negation_guard(siblings, part.body) is not None:
                continue
            info = negation_guard(siblings, part.body, separated=True)
            if info is None:
                raise ShapeMismatch(f"Negation at {list(path + (index,))} lost its guards")
            split = _split_negation(siblings, part.body, info, tracer, path + (index,))
            before = conj(parts)
            tracer.record('split-negation', path + (index,), before, split)
            return _lift_negations(split, tracer, path)
        return conj(parts)
    raise ShapeMismatch(f"Unexpected connective at {list(path)}")


def sgnfo_to_gnfo(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent GNFO sentence for an SGNFO sentence.

    GNFO inputs come back unchanged.

    Raises:
        NotSGNFO: if phi is not in SGNFO.
        BudgetExceeded: with the step history attached.
    """
    if membership(phi, FragmentId.GNFO).verdict:
        return phi
    check = membership(phi, FragmentId.SGNFO)
    if not check.verdict:
        raise NotSGNFO(f"Not an SGNFO sentence: {check.describe()}", check)
    tracer = Tracer(budget, on_step, history)
    result = _lift_negations(phi, tracer)
    return verified(result, FragmentId.GNFO)
