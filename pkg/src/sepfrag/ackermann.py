"""SAF into Ackermann (AF) and SGKS into Goedel-Kalmar-Schuette (GKS).

Both translations go through a special form

    exists z. AND_i ( OR_j forall x_ij exists y_ij. chi_ij  OR  eta_i(z) )

obtained by shifting the prefix inward rightmost first. Universals that share
a reference group (pairs in SGKS) are shifted together, or merged behind a
guessed element when existentials separate them. A disjunction of two
or more universal cells is then turned into a single one by guessing, for
every truth assignment of its atoms, a tuple of witnesses up front.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .fragments import (
    FragmentId,
    NotSAF,
    NotSGKS,
    membership,
)
from .normal_forms import BudgetExceeded, cnf_clauses, dnf_terms, push_quantifier, simplify
from .separateness import VariablePartition
from .syntax import (
    EXISTS,
    FORALL,
    FALSE,
    And,
    Exists,
    Forall,
    Formula,
    Iff,
    NameSupply,
    Or,
    SepfragError,
    Var,
    VarName,
    all_vars,
    atoms,
    build_prenex,
    canonical_prenex,
    conj,
    constants_of,
    disj,
    free_vars,
    is_quantifier_free,
    prefix_blocks,
    prefix_signature,
    quantify,
    rectify,
    rename_free,
    substitute,
    to_prenex,
    with_children,
)
from .transforms import (
    BlowupBudget,
    ShapeMismatch,
    StepCallback,
    TraceEvent,
    Tracer,
    prefix_of,
    prefix_path,
    verified,
)

_SAF_CELL = re.compile(r'^AE*$')
_SGKS_CELL = re.compile(r'^A{1,2}E*$')


class PairCellsOverlap(SepfragError):
    """Two partner cells under one pair member can hold at the same point.

    forall x. (forall x'. A(x, x')) | (forall x'. B(x, x')) with A and B
    compatible has no known rewrite into cells over the pair alone.
    """


@dataclass
class Cell:
    """A universal cell forall xs exists ys. matrix with a quantifier-free matrix."""
    universals: Tuple[VarName, ...]
    existentials: Tuple[VarName, ...]
    matrix: Formula

    def formula(self) -> Formula:
        return quantify(FORALL, self.universals, quantify(EXISTS, self.existentials, self.matrix))


@dataclass
class SpecialClause:
    cells: List[Cell] = field(default_factory=list)
    eta: Formula = FALSE


@dataclass
class SpecialForm:
    """Existential prefix plus a conjunction of clauses of cells and a z-only remainder."""
    prefix: List[VarName]
    clauses: List[SpecialClause]

    def formula(self) -> Formula:
        body = conj(disj([c.formula() for c in clause.cells] + [clause.eta])
                    for clause in self.clauses)
        return quantify(EXISTS, self.prefix, simplify(body))


# ---------------------------------------------------------------------------
# Special form
# ---------------------------------------------------------------------------

def _reference_groups(partition: VariablePartition) -> Dict[VarName, Tuple[VarName, ...]]:
    groups: Dict[VarName, Tuple[VarName, ...]] = {}
    for members in partition.auxiliary.values():
        for name in members:
            groups[name] = tuple(members)
    return groups


def _push_group(names: Sequence[VarName], body: Formula, tracer: Tracer) -> Formula:
    """forall names. body regrouped so the block scopes only the basics mentioning it."""
    if len(names) == 1:
        with tracer.regrouping():
            return push_quantifier(FORALL, names[0], body, tracer.budget.max_terms)
    body = simplify(body)
    live = [n for n in names if n in free_vars(body)]
    if not live:
        return body
    pieces = []
    with tracer.regrouping():
        clauses = cnf_clauses(body, tracer.budget.max_terms)
    for clause in clauses:
        hit = [b for b in clause if free_vars(b) & set(live)]
        rest = [b for b in clause if b not in hit]
        pieces.append(disj(rest + ([quantify(FORALL, live, disj(hit))] if hit else [])))
    return simplify(conj(pieces))


def _exclusive(first: Formula, second: Formula, max_terms: int) -> bool:
    """True when first & second is propositionally unsatisfiable; bound names kept apart."""
    both = to_prenex(rectify(And((first, second))), existentials_first=False)
    _, matrix = prefix_blocks(both)
    return not dnf_terms(matrix, max_terms)


def _merge_partners(unit: Forall, partner: VarName, max_terms: int) -> Formula:
    """forall x. L(x) | OR_k forall x'. A_k(x, x') as one pair cell.

    With the A_k pairwise exclusive, a row x that meets some forall x'. A_k
    meets the one A_k that holds at any fixed element w0, so the unit equals

        exists w0. forall x w. L(x) | OR_k (A_k(x, w0) & A_k(x, w))

    Raises:
        PairCellsOverlap: if two of the A_k can hold together.
    """
    parts = unit.body.parts if isinstance(unit.body, Or) else (unit.body,)
    cells = [p for p in parts if isinstance(p, Forall) and p.vars == (partner,)]
    if len(cells) < 2:
        return unit
    rest = [p for p in parts if p not in cells]
    supply = NameSupply(all_vars(unit) | constants_of(unit))
    guess, column = supply.fresh(partner), supply.fresh(partner)
    bodies = [rename_free(c.body, {partner: column}) for c in cells]
    for i, first in enumerate(bodies):
        for second in bodies[i + 1:]:
            if not _exclusive(first, second, max_terms):
                raise PairCellsOverlap(
                    f"Cells under forall {unit.vars[0]} over its partner {partner} overlap"
                )
    pairs = [And((rename_free(c.body, {partner: guess}), body)) for c, body in zip(cells, bodies)]
    return Exists((guess,), quantify(FORALL, unit.vars + (column,), disj(rest + pairs)))


def _merge_partner_cells(phi: Formula, name: VarName, partner: VarName, max_terms: int) -> Formula:
    """Apply _merge_partners to every unit forall name outside all quantifiers of phi."""
    if isinstance(phi, Forall) and phi.vars == (name,):
        return _merge_partners(phi, partner, max_terms)
    if isinstance(phi, (And, Or)):
        return with_children(
            phi, tuple(_merge_partner_cells(p, name, partner, max_terms) for p in phi.parts)
        )
    return phi


def _shift_grouped(
    prenex: Formula, partition: VariablePartition, tracer: Tracer
) -> Formula:
    """Shift every quantifier inward, rightmost first, keeping reference groups together.

    The later member of a pair waits for its partner when only universals lie
    between them. Otherwise it is shifted on its own, and once the earlier
    member has been shifted as well, the partner cells under each of its units
    are merged into one pair cell.
    """
    prefix = prefix_of(prenex)
    _, body = prefix_blocks(prenex)
    groups = _reference_groups(partition)
    position = {name: i for i, (_, name) in enumerate(prefix)}
    waiting: List[VarName] = []
    for index in reversed(range(len(prefix))):
        kind, name = prefix[index]
        if kind == FORALL:
            group = groups.get(name, (name,))
            first = min(position[v] for v in group)
            if first < index and all(q == FORALL for q, _ in prefix[first:index]):
                waiting.append(name)
                continue
            block = [name] + [v for v in group if v in waiting]
            waiting = [v for v in waiting if v not in block]
            before = quantify(FORALL, block, body)
            body = tracer.record(f"shift-{kind}", prefix_path(index), before,
                                 _push_group(block, body, tracer))
            shifted = [v for v in group if position[v] > index and v not in block]
            if shifted:
                before = body
                with tracer.regrouping():
                    merged = _merge_partner_cells(body, name, shifted[0], tracer.budget.max_terms)
                body = tracer.record('merge-pair', prefix_path(index), before, merged)
        else:
            before = quantify(EXISTS, [name], body)
            with tracer.regrouping():
                shifted = push_quantifier(EXISTS, name, body, tracer.budget.max_terms)
            body = tracer.record(f"shift-{kind}", prefix_path(index), before, shifted)
    if waiting:
        raise ShapeMismatch(f"Universals {waiting} have no partner in the prefix")
    return body


def _pull_existentials(phi: Formula) -> Tuple[List[VarName], Formula]:
    """Pull existentials that are not under any universal to the front; phi rectified."""
    if isinstance(phi, Exists):
        names, body = _pull_existentials(phi.body)
        return list(phi.vars) + names, body
    if isinstance(phi, (And, Or)):
        names: List[VarName] = []
        parts = []
        for part in phi.parts:
            inner, body = _pull_existentials(part)
            names.extend(inner)
            parts.append(body)
        return names, conj(parts) if isinstance(phi, And) else disj(parts)
    return [], phi


def _cell(phi: Formula, pattern: 're.Pattern[str]') -> Cell:
    prenex = to_prenex(phi, existentials_first=False)
    signature = prefix_signature(prenex)
    if not pattern.match(signature):
        raise ShapeMismatch(f"Shifted cell has prefix {signature}, not {pattern.pattern}")
    blocks, matrix = prefix_blocks(prenex)
    universals = tuple(v for b in blocks if b.kind == FORALL for v in b.vars)
    existentials = tuple(v for b in blocks if b.kind == EXISTS for v in b.vars)
    return Cell(universals, existentials, matrix)


def _special_form(
    prenex: Formula, partition: VariablePartition, pattern: 're.Pattern[str]', tracer: Tracer
) -> SpecialForm:
    shifted = rectify(_shift_grouped(prenex, partition, tracer))
    zs, matrix = _pull_existentials(shifted)
    with tracer.regrouping():
        clauses = cnf_clauses(matrix, tracer.budget.max_terms)
    special: List[SpecialClause] = []
    for clause in clauses:
        cells = [_cell(b, pattern) for b in clause if isinstance(b, Forall)]
        rest = [b for b in clause if not isinstance(b, Forall)]
        if not all(is_quantifier_free(b) for b in rest):
            raise ShapeMismatch("Shifted clause keeps a quantifier outside its cells")
        special.append(SpecialClause(cells, disj(rest)))
    result = SpecialForm(zs, special)
    tracer.record('special-form', (), prenex, result.formula())
    return result


def _subject(phi: Formula, fragment: FragmentId) -> Tuple[Formula, VariablePartition]:
    check = membership(phi, fragment)
    if not check.verdict:
        error = NotSAF if fragment is FragmentId.SAF else NotSGKS
        raise error(f"Not an {fragment.value} sentence: {check.describe()}", check)
    assert isinstance(check.witness, VariablePartition) and check.subject is not None
    return check.subject, check.witness


def saf_special_form(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent SAF sentence in special form.

    The result is exists z. AND_i (OR_j forall x. exists y. chi_ij) OR eta_i(z),
    with every chi quantifier-free.

    Raises:
        NotSAF: if phi is not in SAF.
        ShapeMismatch: if the shifted sentence does not split into cells.
        BudgetExceeded: with the step history attached.
    """
    subject, partition = _subject(phi, FragmentId.SAF)
    tracer = Tracer(budget, on_step, history)
    return _special_form(subject, partition, _SAF_CELL, tracer).formula()


# ---------------------------------------------------------------------------
# Universal behind a disjunction
# ---------------------------------------------------------------------------

def _cells_of(psi: Formula) -> List[Cell]:
    parts = psi.parts if isinstance(psi, Or) else (psi,)
    cells: List[Cell] = []
    for part in parts:
        if not isinstance(part, Forall):
            raise ShapeMismatch("Every disjunct must start with a universal block")
        body = part.body
        ys: Tuple[VarName, ...] = ()
        if isinstance(body, Exists):
            ys, body = body.vars, body.body
        if not is_quantifier_free(body):
            raise ShapeMismatch("Disjunct matrix must be quantifier-free")
        cells.append(Cell(part.vars, ys, body))
    first = cells[0]
    for cell in cells[1:]:
        if (cell.universals, cell.existentials) != (first.universals, first.existentials):
            raise ShapeMismatch("All disjuncts must bind the same universal and existential names")
    return cells


def _distinct_atoms(cells: Sequence[Cell]) -> List[Formula]:
    found: List[Formula] = []
    for cell in cells:
        for atom in atoms(cell.matrix):
            if atom not in found:
                found.append(atom)
    return found


def forall_behind_or(
    psi: Formula, zs: Sequence[VarName], budget: Optional[BlowupBudget] = None
) -> Formula:
    """Replace OR_j forall x. exists y. chi_j by a sentence with a single universal block.

    With At the atoms of the chi_j and q = 2 ** len(At), the result is

        exists v_1..v_q y_1..y_q. (OR_j AND_k chi_j[v_k, y_k])
            AND forall x. exists y. OR_k AND_{A in At} (A <-> A[v_k, y_k])

    where every v_k has as many variables as x and every y_k as many as y.

    Raises:
        ShapeMismatch: if psi is not a disjunction of cells with identical
            prefixes or has free variables outside zs.
        BudgetExceeded: if At exceeds max_atoms_for_expansion.
    """
    budget = budget or BlowupBudget()
    cells = _cells_of(psi)
    if not free_vars(psi) <= set(zs):
        raise ShapeMismatch(f"Free variables {sorted(free_vars(psi) - set(zs))} are not in z")
    xs, ys = cells[0].universals, cells[0].existentials
    found = _distinct_atoms(cells)
    if len(found) > budget.max_atoms_for_expansion:
        raise BudgetExceeded(
            f"{len(found)} atoms exceed max_atoms_for_expansion "
            f"({budget.max_atoms_for_expansion})"
        )
    q = 2 ** len(found)
    supply = NameSupply(all_vars(psi) | set(zs) | constants_of(psi))
    copies: List[Dict[VarName, Var]] = []
    for _ in range(q):
        env = {x: Var(supply.fresh('v')) for x in xs}
        env.update({y: Var(supply.fresh(y)) for y in ys})
        copies.append(env)
    guesses = disj(conj(substitute(cell.matrix, env) for env in copies) for cell in cells)
    table = disj(conj(Iff(a, substitute(a, env)) for a in found) for env in copies)
    fresh = [t.name for env in copies for t in env.values()]
    body = quantify(FORALL, xs, quantify(EXISTS, ys, table))
    return quantify(EXISTS, fresh, And((guesses, body)))


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

@dataclass
class _Part:
    """exists outer. forall xs. exists inner. matrix"""
    outer: List[VarName]
    universals: Tuple[VarName, ...]
    inner: List[VarName]
    matrix: Formula


def _common_shape(cells: Sequence[Cell], supply: NameSupply) -> List[Cell]:
    width = max(len(c.universals) for c in cells)
    depth = max(len(c.existentials) for c in cells)
    xs = tuple(supply.fresh('x') for _ in range(width))
    ys = tuple(supply.fresh('y') for _ in range(depth))
    shaped = []
    for cell in cells:
        env = dict(zip(cell.universals, xs))
        env.update(zip(cell.existentials, ys))
        shaped.append(Cell(xs, ys, rename_free(cell.matrix, env)))
    return shaped


def _clause_part(
    clause: SpecialClause, zs: Sequence[VarName], supply: NameSupply, tracer: Tracer
) -> _Part:
    if not clause.cells:
        return _Part([], (), [], clause.eta)
    if len(clause.cells) == 1:
        cell = clause.cells[0]
        return _Part([], cell.universals, list(cell.existentials),
                     simplify(disj([cell.matrix, clause.eta])))
    shaped = _common_shape(clause.cells, supply)
    psi = Or(tuple(Forall(c.universals, Exists(c.existentials, c.matrix)) if c.existentials
                   else Forall(c.universals, c.matrix) for c in shaped))
    merged = forall_behind_or(psi, zs, tracer.budget)
    tracer.record('forall-behind-or', (), psi, merged)
    assert isinstance(merged, Exists) and isinstance(merged.body, And)
    guesses, universal = merged.body.parts
    xs = shaped[0].universals
    inner: List[VarName] = []
    table = universal.body if isinstance(universal, Forall) else universal
    if isinstance(table, Exists):
        inner, table = list(table.vars), table.body
    for name in merged.vars + tuple(xs) + tuple(inner):
        supply.reserve(name)
    return _Part(list(merged.vars), xs, inner,
                 simplify(disj([And((guesses, table)), clause.eta])))


def _assemble(special: SpecialForm, width: int, tracer: Tracer) -> Formula:
    taken = set(special.prefix)
    for clause in special.clauses:
        taken |= all_vars(disj([c.formula() for c in clause.cells] + [clause.eta]))
    supply = NameSupply(taken)
    parts = [_clause_part(c, special.prefix, supply, tracer) for c in special.clauses]
    xs = tuple(supply.fresh('x') for _ in range(width))
    outer: List[VarName] = []
    inner: List[VarName] = []
    matrices = []
    for part in parts:
        env = {}
        for name in part.outer + part.inner:
            env[name] = supply.fresh(name)
        env.update(zip(part.universals, xs))
        matrices.append(rename_free(part.matrix, env))
        outer.extend(env[n] for n in part.outer)
        inner.extend(env[n] for n in part.inner)
    used = free_vars(conj(matrices))
    prefix = ([(EXISTS, z) for z in special.prefix] + [(EXISTS, a) for a in outer]
              + [(FORALL, x) for x in xs if x in used] + [(EXISTS, b) for b in inner])
    return build_prenex(prefix, conj(matrices))


def _translate(
    phi: Formula,
    source: FragmentId,
    target: FragmentId,
    pattern: 're.Pattern[str]',
    width: int,
    tracer: Tracer,
) -> Formula:
    if membership(phi, target).verdict:
        return canonical_prenex(phi)
    subject, partition = _subject(phi, source)
    special = _special_form(subject, partition, pattern, tracer)
    result = _assemble(special, width, tracer)
    tracer.record('assemble', (), special.formula(), result)
    return verified(result, target)


def saf_to_af(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent Ackermann sentence exists* forall exists* for an SAF sentence.

    AF inputs come back as their canonical prenex form.

    Raises:
        NotSAF: if phi is not in SAF.
        BudgetExceeded: with the step history attached.
    """
    tracer = Tracer(budget, on_step, history)
    return _translate(phi, FragmentId.SAF, FragmentId.AF, _SAF_CELL, 1, tracer)


def sgks_to_gks(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent GKS sentence exists* forall forall exists* for an SGKS sentence.

    Raises:
        NotSGKS: if phi is not in SGKS.
        PairCellsOverlap: if a pair member is left with partner cells that can
            hold together; see the class.
        BudgetExceeded: with the step history attached.
    """
    tracer = Tracer(budget, on_step, history)
    return _translate(phi, FragmentId.SGKS, FragmentId.GKS, _SGKS_CELL, 2, tracer)
