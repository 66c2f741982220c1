"""Separated finite-variable and fluted sentences into FO^k and FL.

Both translations miniscope first: once every quantifier scopes only the
basics that mention its variable, each quantified subformula lives in a
single lane and lanes stop nesting into each other. Renaming then reuses the
same few variable names across lanes.
"""

from typing import List, Optional

from .fragments import FragmentId, NotSFL, NotSFOk, fragment_label, membership
from .lanes import WidthExceeded, fluted_lanes, rename_binders, rename_to_k_variables
from .normal_forms import miniscope
from .syntax import Formula, rectify, to_nnf
from .transforms import BlowupBudget, ShapeMismatch, StepCallback, TraceEvent, Tracer, verified


def _miniscoped(phi: Formula, tracer: Tracer) -> Formula:
    normal = rectify(to_nnf(phi))
    with tracer.regrouping():
        result = miniscope(normal, tracer.budget.max_terms)
    return tracer.record('miniscope', (), phi, result)


def sfok_to_fok(
    phi: Formula,
    k: int,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent sentence using at most k variable names for an SFO^k sentence.

    FO^k inputs come back unchanged.

    Raises:
        NotSFOk: if phi is not in SFO^k.
        BudgetExceeded: with the step history attached.
    """
    if membership(phi, FragmentId.FOk, k).verdict:
        return phi
    check = membership(phi, FragmentId.SFOk, k)
    if not check.verdict:
        raise NotSFOk(
            f"Not an {fragment_label(FragmentId.SFOk, k)} sentence: {check.describe()}", check
        )
    tracer = Tracer(budget, on_step, history)
    shifted = _miniscoped(phi, tracer)
    try:
        result = rename_to_k_variables(shifted, k)
    except WidthExceeded as exc:
        raise ShapeMismatch(f"Miniscoped sentence still too wide: {exc}") from exc
    tracer.record('rename', (), shifted, result)
    return verified(result, FragmentId.FOk, k)


def sfl_to_fl(
    phi: Formula,
    budget: Optional[BlowupBudget] = None,
    on_step: Optional[StepCallback] = None,
    history: Optional[List[TraceEvent]] = None,
) -> Formula:
    """Equivalent fluted sentence for an SFL sentence.

    Bound variables are renamed by depth, x1 for the outermost binder of a
    chain, x2 for the next and so on.

    FL inputs come back unchanged.

    Raises:
        NotSFL: if phi is not in SFL.
        BudgetExceeded: with the step history attached.
    """
    if membership(phi, FragmentId.FL).verdict:
        return phi
    check = membership(phi, FragmentId.SFL)
    if not check.verdict:
        raise NotSFL(f"Not an SFL sentence: {check.describe()}", check)
    tracer = Tracer(budget, on_step, history)
    shifted = _miniscoped(phi, tracer)
    depths = fluted_lanes(shifted)
    result = rename_binders(shifted, {b: f"x{slot}" for b, (_, slot) in depths.labels.items()})
    tracer.record('rename', (), shifted, result)
    return verified(result, FragmentId.FL)
