"""Format classification, satisfiability, equivalence and gap results as text, CSV or JSON."""

import csv
import json
from io import StringIO
from typing import Any, Iterable, List, Sequence

from .fragments import ClassificationReport
from .parser import print_structure
from .semantics import EquivalenceResult, SatResult
from .witnesses import GapRow

GAP_CSV_VERSION = 1
GAP_COLUMNS = ['family', 'n', 'source_len', 'target_len', 'leading_exists', 'theoretical_bound']


def format_json(payload: Any) -> str:
    """JSON text of a result object (anything with ``to_dict``) or a list of them."""
    if isinstance(payload, (list, tuple)):
        data = [_as_data(item) for item in payload]
    else:
        data = _as_data(payload)
    return json.dumps(data, indent=2, default=str)


def _as_data(item: Any) -> Any:
    return item.to_dict() if hasattr(item, 'to_dict') else item


def format_report(report: ClassificationReport) -> str:
    """One ``FRAGMENT verdict [witness|violation]`` line per fragment."""
    return '\n'.join(report.lines())


def format_sat_result(result: SatResult) -> str:
    """Verdict header, followed by the model in structure format on SAT."""
    lines = [result.header()]
    if result.model is not None:
        lines.append(print_structure(result.model))
    return '\n'.join(lines)


def format_equivalence(result: EquivalenceResult) -> str:
    """Verdict line, followed by the distinguishing structure when there is one."""
    sizes = []
    if result.exhaustive_sizes:
        sizes.append('exhaustive=' + ','.join(str(s) for s in result.exhaustive_sizes))
    if result.sampled_sizes:
        sizes.append('sampled=' + ','.join(str(s) for s in result.sampled_sizes))
    verdict = 'equivalent' if result.equivalent else 'not-equivalent'
    lines = [' '.join([verdict, f"checked={result.checked}"] + sizes + [f"seed={result.seed}"])]
    if result.counterexample is not None:
        lines.append(print_structure(result.counterexample))
    return '\n'.join(lines)


def _cell(value: Any) -> Any:
    return '' if value is None else value


def format_gap_csv(rows: Iterable[GapRow]) -> str:
    """Format gap rows as CSV.

    Returns:
        CSV string led by a ``# sepfrag gap table v1`` comment line, then the
        header family,n,source_len,target_len,leading_exists,theoretical_bound.
        Rows that did not finish leave the length columns empty.
    """
    output = StringIO()
    output.write(f"# sepfrag gap table v{GAP_CSV_VERSION}\n")
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(GAP_COLUMNS)
    for row in rows:
        writer.writerow([
            row.family.value,
            row.n,
            _cell(row.source_len),
            _cell(row.target_len),
            _cell(row.leading_exists),
            row.theoretical_bound,
        ])
    return output.getvalue()


def format_gap_table(rows: Sequence[GapRow]) -> str:
    """Aligned text table of gap rows, status column included."""
    header = GAP_COLUMNS + ['status']
    body: List[List[str]] = [
        [
            row.family.value,
            str(row.n),
            str(_cell(row.source_len)),
            str(_cell(row.target_len)),
            str(_cell(row.leading_exists)),
            str(row.theoretical_bound),
            row.status,
        ]
        for row in rows
    ]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    lines = ['  '.join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
             for line in [header] + body]
    lines.insert(1, '  '.join('-' * width for width in widths))
    return '\n'.join(lines)
