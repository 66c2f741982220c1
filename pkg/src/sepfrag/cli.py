"""Command-line interface for sepfrag."""

import sys
import traceback
from multiprocessing import Pool
from pathlib import Path
from typing import (
    Any, Callable, Dict, Iterable, List, NoReturn, Optional, Sequence, Tuple, TypeVar,
)

import click
from click_option_group import optgroup

from . import __version__
from .config import Config
from .config_loader import (
    CONFIG_SCHEMA,
    apply_environment,
    load_config,
    merge_config_with_cli_args,
    save_config,
    validate_config,
)
from .ackermann import PairCellsOverlap
from .corpus import CORPUS_FRAGMENTS, CorpusExhausted, CorpusGenerator, witness_variants
from .formatter import (
    format_equivalence,
    format_gap_csv,
    format_gap_table,
    format_json,
    format_report,
    format_sat_result,
)
from .fragments import FragmentId, NotInFragment, classify, membership
from .normal_forms import BudgetExceeded
from .parser import (
    ParseError,
    parse_formula_with_vocab,
    parse_structure,
    print_sentence,
    print_structure,
    split_sections,
)
from .semantics import SAT, UNSAT, equivalent_upto, evaluate, sat
from .syntax import Formula, SepfragError, Vocabulary
from .transforms import TraceEvent, translate
from .witnesses import (
    DEFAULT_MODEL_CAP,
    CapExceeded,
    NBelowMinimum,
    WitnessFamily,
    gap_row,
    gen_witness,
    gen_witness_model,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3

# Translation targets and the separated fragments that translate into them, in order of preference.
TARGET_SOURCES: Dict[str, Tuple[Tuple[FragmentId, Optional[int]], ...]] = {
    'bsr': ((FragmentId.SF, None), (FragmentId.SBSR, None)),
    'af': ((FragmentId.SAF, None),),
    'gks': ((FragmentId.SGKS, None),),
    'lgf': ((FragmentId.SLGF, None),),
    'gnfo': ((FragmentId.SGNFO, None),),
    'fo2': ((FragmentId.SFOk, 2),),
    'fl': ((FragmentId.SFL, None),),
}

T = TypeVar('T')
R = TypeVar('R')

Sentence = Tuple[str, int, Formula, Vocabulary]


class InputError(SepfragError):
    """An input file cannot be read or parsed; the message is a ready diagnostic."""


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _debug(ctx: click.Context, message: str) -> None:
    if ctx.obj.get('debug'):
        click.echo(message, err=True)


def _position(text: str, offset: int, first_line: int) -> Tuple[int, int]:
    line = first_line + text.count('\n', 0, offset)
    column = offset - (text.rfind('\n', 0, offset) + 1) + 1
    return line, column


def _diagnostic(path: Path, text: str, first_line: int, exc: ParseError) -> str:
    line, column = _position(text, exc.span.begin, first_line)
    return f"{path}:{line}:{column}: {type(exc).__name__}: {exc}"


def read_sentences(path: Path) -> List[Sentence]:
    """Parse every blank-line separated section of a file.

    Raises:
        InputError: on the first section that does not parse.
    """
    text = Path(path).read_text()
    sentences: List[Sentence] = []
    for first_line, section in split_sections(text):
        try:
            phi, vocab = parse_formula_with_vocab(section)
        except ParseError as exc:
            raise InputError(_diagnostic(path, section, first_line, exc)) from exc
        sentences.append((str(path), first_line, phi, vocab))
    if not sentences:
        raise InputError(f"{path}: no sentences found")
    return sentences


def _fail(ctx: click.Context, problem: object, code: int = EXIT_USAGE) -> NoReturn:
    click.echo(f"Error: {problem}", err=True)
    if ctx.obj.get('debug'):
        click.echo(traceback.format_exc(), err=True)
    sys.exit(code)


def _resolve_config(ctx: click.Context, **cli_args: Any) -> Config:
    """Defaults < config file < SEPFRAG_SEED < command-line flags."""
    settings = dict(ctx.obj['file_config'])
    for key in list(settings):
        if key not in CONFIG_SCHEMA:
            _debug(ctx, f"Ignoring unknown config key: {key}")
            del settings[key]
    settings = apply_environment(settings)
    settings = merge_config_with_cli_args(settings, dict(ctx.obj['cli_settings'], **cli_args))
    validate_config(settings)
    if 'fok_levels' in settings:
        settings['fok_levels'] = tuple(settings['fok_levels'])
    return Config.from_cli_args(config=ctx.obj.get('config_path'), debug=ctx.obj['debug'],
                                **settings)


def _config_or_exit(ctx: click.Context, **cli_args: Any) -> Config:
    try:
        return _resolve_config(ctx, **cli_args)
    except ValueError as exc:
        _fail(ctx, exc)


def _map(ctx: click.Context, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Ordered map, spread over worker processes with --jobs N."""
    jobs = ctx.obj.get('jobs') or 1
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    _debug(ctx, f"Using {jobs} worker processes")
    with Pool(processes=jobs) as pool:
        return pool.map(fn, items)


def _trace_printer(ctx: click.Context, config: Config) -> Optional[Callable[[TraceEvent], None]]:
    if not config.output.trace:
        return None

    def on_step(event: TraceEvent) -> None:
        click.echo(event.line(), err=True)

    return on_step


def _section_header(source: str, line: int) -> str:
    return f"# {source}:{line}"


# ---------------------------------------------------------------------------
# Main group
# ---------------------------------------------------------------------------

@click.group()
@click.pass_context
@click.version_option(version=__version__, prog_name='sepfrag')
@click.option(
    '--config', '-c',
    type=click.Path(exists=True, path_type=Path),
    help='Load parameters from config file (JSON or YAML)'
)
@click.option(
    '--debug',
    is_flag=True,
    help='Enable debug output'
)
@click.option(
    '--json', 'as_json',
    is_flag=True,
    help='Print results as JSON'
)
@click.option(
    '--trace',
    is_flag=True,
    default=None,
    help='Print every translation step on stderr'
)
@click.option(
    '--jobs', '-j',
    type=click.IntRange(1, None),
    default=1,
    help='Worker processes for classify and bench (default: 1)'
)
@optgroup.group(
    'Translation Budget', help='Limits that make translations refuse instead of exploding'
)
@optgroup.option(
    '--max-formula-len',
    type=click.IntRange(1, None),
    help='Largest formula a translation may build, in symbols (default: 1000000)'
)
@optgroup.option(
    '--max-atoms-for-expansion',
    type=click.IntRange(1, None),
    help='Largest atom set a type expansion may range over (default: 12)'
)
@optgroup.option(
    '--max-terms',
    type=click.IntRange(1, None),
    help='Largest DNF/CNF a single regrouping may build (default: 4096)'
)
@optgroup.option(
    '--exhaustive-limit',
    type=click.IntRange(1, None),
    help='Variables up to which partitions are searched exhaustively (default: 12)'
)
@optgroup.group('Classification', help='Fragment membership options')
@optgroup.option(
    '--levels',
    type=str,
    help='Comma-separated variable counts for FO^k and SFO^k (default: 1,2,3)'
)
@optgroup.option(
    '--constants/--no-constants', 'allow_constants',
    default=None,
    help='Accept constants in SAF and SGKS sentences (default: accept)'
)
def cli(ctx: click.Context, config: Optional[Path], debug: bool, as_json: bool,
        trace: Optional[bool], jobs: int, max_formula_len: Optional[int],
        max_atoms_for_expansion: Optional[int], max_terms: Optional[int],
        exhaustive_limit: Optional[int], levels: Optional[str],
        allow_constants: Optional[bool]) -> None:
    """sepfrag: separated fragments of first-order logic.

    Classify sentences into decidable fragments, translate separated
    sentences into their base fragments, decide or search for models,
    compare sentences on finite structures, and measure the succinctness
    gaps of the witness families.

    \b
    Input files hold one sentence per blank-line separated section,
    each optionally led by a vocabulary header:
      vocab P/1 R/2 c; forall x. exists y. (P(x) <-> R(x, y))

    \b
    EXIT CODES:
      0  success, verdict true, SAT
      1  verdict false, UNSAT
      2  UNKNOWN, budget or size cap exceeded
      3  usage or parse error
    """
    ctx.ensure_object(dict)
    ctx.obj['debug'] = debug
    ctx.obj['json'] = as_json
    ctx.obj['jobs'] = jobs
    ctx.obj['config_path'] = config
    ctx.obj['file_config'] = {}
    if config:
        try:
            ctx.obj['file_config'] = load_config(config)
        except (FileNotFoundError, ValueError) as exc:
            click.echo(f"Error loading config: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        _debug(ctx, f"Loaded configuration from: {config}")

    fok_levels = None
    if levels:
        try:
            fok_levels = [int(part) for part in levels.split(',') if part.strip()]
        except ValueError:
            click.echo(f"Error: --levels expects integers, got {levels!r}", err=True)
            sys.exit(EXIT_USAGE)
    ctx.obj['cli_settings'] = {
        'trace': trace,
        'max_formula_len': max_formula_len,
        'max_atoms_for_expansion': max_atoms_for_expansion,
        'max_terms': max_terms,
        'exhaustive_limit': exhaustive_limit,
        'fok_levels': fok_levels,
        'allow_constants': allow_constants,
    }


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _classify_one(job: Tuple[Formula, Tuple[int, ...], int, bool]) -> Tuple[str, Dict]:
    phi, levels, exhaustive_limit, allow_constants = job
    report = classify(phi, levels, exhaustive_limit, allow_constants)
    return format_report(report), report.to_dict()


@cli.command('classify')
@click.argument('file', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def classify_cmd(ctx: click.Context, file: Path) -> None:
    """Report fragment membership of every sentence in FILE.

    \b
    Each line reads FRAGMENT true|false followed by the witness
    (partition, guards or lanes) or the violated rule and its path.

    \b
    EXAMPLES:
      sepfrag classify corpus.fol
      sepfrag --json --jobs 4 classify corpus.fol
    """
    config = _config_or_exit(ctx)
    try:
        sentences = read_sentences(file)
    except InputError as exc:
        _fail(ctx, exc)
    jobs = [
        (phi, config.search.fok_levels, config.budget.exhaustive_limit,
         config.search.allow_constants)
        for _, _, phi, _ in sentences
    ]
    try:
        results = _map(ctx, _classify_one, jobs)
    except SepfragError as exc:
        _fail(ctx, exc)

    if ctx.obj['json']:
        payload = [
            dict(source=source, line=line, **data)
            for (source, line, _, _), (_, data) in zip(sentences, results)
        ]
        click.echo(format_json(payload))
        return
    blocks = [
        f"{_section_header(source, line)}\n{text}"
        for (source, line, _, _), (text, _) in zip(sentences, results)
    ]
    click.echo('\n\n'.join(blocks))


# ---------------------------------------------------------------------------
# translate
# ---------------------------------------------------------------------------

@cli.command('translate')
@click.option(
    '--target', '-t',
    type=click.Choice(sorted(TARGET_SOURCES), case_sensitive=False),
    required=True,
    help='Base fragment to translate into'
)
@click.argument('file', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def translate_cmd(ctx: click.Context, target: str, file: Path) -> None:
    """Translate every sentence in FILE into the base fragment TARGET.

    The separated fragment the sentence is translated out of is picked by
    classification: bsr accepts SF and SBSR, af SAF, gks SGKS, lgf SLGF,
    gnfo SGNFO, fo2 SFO^2 and fl SFL. Every result is checked for
    membership in the target before it is printed.

    \b
    EXAMPLES:
      sepfrag translate --target bsr example_sbsr.fol
      sepfrag --trace translate --target af saf.fol
    """
    config = _config_or_exit(ctx)
    try:
        sentences = read_sentences(file)
    except InputError as exc:
        _fail(ctx, exc)

    on_step = _trace_printer(ctx, config)
    code = EXIT_OK
    outputs: List[Any] = []
    for source_file, line, phi, vocab in sentences:
        source = next(
            ((fragment, k) for fragment, k in TARGET_SOURCES[target.lower()]
             if membership(phi, fragment, k, config.budget.exhaustive_limit,
                           config.search.allow_constants).verdict),
            None,
        )
        if source is None:
            names = ' or '.join(
                f.value if k is None else f"SFO{k}" for f, k in TARGET_SOURCES[target.lower()]
            )
            click.echo(f"{source_file}:{line}: not in {names}", err=True)
            code = max(code, EXIT_FALSE)
            continue
        fragment, k = source
        _debug(ctx, f"{source_file}:{line}: translating out of {fragment.value}")
        try:
            result = translate(phi, fragment, k, config.budget.blowup(), on_step)
        except BudgetExceeded as exc:
            click.echo(f"{source_file}:{line}: {exc} after {len(exc.trace)} steps", err=True)
            code = max(code, EXIT_UNKNOWN)
            continue
        except PairCellsOverlap as exc:
            click.echo(f"{source_file}:{line}: {exc}", err=True)
            code = max(code, EXIT_UNKNOWN)
            continue
        except NotInFragment as exc:
            click.echo(f"{source_file}:{line}: {exc}", err=True)
            code = max(code, EXIT_FALSE)
            continue
        except SepfragError as exc:
            _fail(ctx, exc)
        if ctx.obj['json']:
            outputs.append(dict(source=source_file, line=line, **result.to_dict()))
        else:
            outputs.append('\n'.join([
                _section_header(source_file, line), print_sentence(result.target, vocab)
            ]))

    if ctx.obj['json']:
        click.echo(format_json(outputs))
    elif outputs:
        click.echo('\n\n'.join(outputs))
    sys.exit(code)


# ---------------------------------------------------------------------------
# sat
# ---------------------------------------------------------------------------

_SAT_CODES = {SAT: EXIT_OK, UNSAT: EXIT_FALSE}


@cli.command('sat')
@click.option(
    '--max-model-size',
    type=click.IntRange(1, None),
    help='Domain bound for sentences outside the BSR-decidable fragments (default: 4)'
)
@click.option(
    '--budget',
    type=click.IntRange(1, None),
    help='Structures to try before answering UNKNOWN (default: 1000000)'
)
@click.argument('file', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def sat_cmd(ctx: click.Context, max_model_size: Optional[int], budget: Optional[int],
            file: Path) -> None:
    """Decide or search satisfiability of every sentence in FILE.

    BSR, SF and SBSR sentences are decided through the BSR small-model
    bound. Other sentences get a bounded model search that answers SAT or
    UNKNOWN. A model is printed in structure format on SAT.
    """
    config = _config_or_exit(ctx, max_model_size=max_model_size, budget=budget)
    try:
        sentences = read_sentences(file)
    except InputError as exc:
        _fail(ctx, exc)

    def on_size(size: int, count: int) -> None:
        _debug(ctx, f"  size {size}: {count} structures")

    code = EXIT_OK
    outputs: List[Any] = []
    for source_file, line, phi, _ in sentences:
        try:
            result = sat(phi, config.search.max_model_size, config.oracle.budget,
                         config.budget.blowup(), on_size)
        except BudgetExceeded as exc:
            click.echo(f"{source_file}:{line}: UNKNOWN ({exc})", err=True)
            code = max(code, EXIT_UNKNOWN)
            continue
        except SepfragError as exc:
            _fail(ctx, exc)
        code = max(code, _SAT_CODES.get(result.verdict, EXIT_UNKNOWN))
        if ctx.obj['json']:
            outputs.append(dict(source=source_file, line=line, **result.to_dict()))
        else:
            outputs.append('\n'.join([_section_header(source_file, line),
                                      format_sat_result(result)]))

    if ctx.obj['json']:
        click.echo(format_json(outputs))
    elif outputs:
        click.echo('\n\n'.join(outputs))
    sys.exit(code)


# ---------------------------------------------------------------------------
# equiv
# ---------------------------------------------------------------------------

@cli.command('equiv')
@click.argument('file1', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument('file2', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@optgroup.group('Oracle Options', help='Bounded equivalence check')
@optgroup.option(
    '--max-size',
    type=click.IntRange(1, None),
    help='Largest domain size checked (default: 3)'
)
@optgroup.option(
    '--budget',
    type=click.IntRange(1, None),
    help='Structures enumerated before switching to sampling (default: 1000000)'
)
@optgroup.option(
    '--samples',
    type=click.IntRange(1, None),
    help='Random structures per sampled size (default: 10000)'
)
@optgroup.option(
    '--seed',
    type=click.IntRange(0, None),
    help='Sampling seed (default: 0, or SEPFRAG_SEED)'
)
@click.pass_context
def equiv_cmd(ctx: click.Context, file1: Path, file2: Path, max_size: Optional[int],
              budget: Optional[int], samples: Optional[int], seed: Optional[int]) -> None:
    """Compare the sentences of FILE1 and FILE2 pairwise on finite structures.

    Sizes are enumerated exhaustively while the structure budget lasts and
    sampled after that. A distinguishing structure is printed on a false
    verdict. A true verdict means none was found, not a proof.

    \b
    EXAMPLES:
      sepfrag equiv phi.fol psi.fol --max-size 3
      sepfrag equiv phi.fol psi.fol --budget 1000 --samples 500 --seed 7
    """
    config = _config_or_exit(ctx, max_size=max_size, budget=budget, samples=samples, seed=seed)
    try:
        left = read_sentences(file1)
        right = read_sentences(file2)
    except InputError as exc:
        _fail(ctx, exc)
    if len(left) != len(right):
        _fail(ctx, ValueError(
            f"{file1} has {len(left)} sentences but {file2} has {len(right)}"
        ))

    def on_size(size: int, mode: str, count: int) -> None:
        _debug(ctx, f"  size {size}: {mode} {count}")

    oracle = config.oracle
    code = EXIT_OK
    outputs: List[Any] = []
    for (source_file, line, phi, _), (_, _, psi, _) in zip(left, right):
        try:
            result = equivalent_upto(phi, psi, oracle.max_size, oracle.budget, oracle.samples,
                                     oracle.seed, on_size)
        except SepfragError as exc:
            _fail(ctx, exc)
        if not result.equivalent:
            code = EXIT_FALSE
        if ctx.obj['json']:
            outputs.append(dict(source=source_file, line=line, **result.to_dict()))
        else:
            outputs.append('\n'.join([_section_header(source_file, line),
                                      format_equivalence(result)]))

    click.echo(format_json(outputs) if ctx.obj['json'] else '\n\n'.join(outputs))
    sys.exit(code)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

@cli.command('eval')
@click.option(
    '--model', '-m', 'model_file',
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help='Structure file: "domain N; P = {(0),(1)}; c = 0"'
)
@click.argument('file', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def eval_cmd(ctx: click.Context, model_file: Path, file: Path) -> None:
    """Evaluate every sentence in FILE in the structure of MODEL_FILE.

    The structure is read against the vocabulary of each sentence; its
    predicates and constants must be declared there.
    """
    _config_or_exit(ctx)
    try:
        sentences = read_sentences(file)
    except InputError as exc:
        _fail(ctx, exc)
    model_text = model_file.read_text()

    code = EXIT_OK
    outputs: List[Any] = []
    for source_file, line, phi, vocab in sentences:
        try:
            structure = parse_structure(model_text, vocab)
        except ParseError as exc:
            _fail(ctx, _diagnostic(model_file, model_text, 1, exc))
        try:
            value = evaluate(structure, phi)
        except SepfragError as exc:
            _fail(ctx, exc)
        if not value:
            code = EXIT_FALSE
        if ctx.obj['json']:
            outputs.append({'source': source_file, 'line': line, 'value': value})
        else:
            outputs.append(f"{_section_header(source_file, line)}\n{str(value).lower()}")

    click.echo(format_json(outputs) if ctx.obj['json'] else '\n\n'.join(outputs))
    sys.exit(code)


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

_FAMILIES = [family.value for family in WitnessFamily]


@cli.command('witness')
@click.option(
    '--family', '-f',
    type=click.Choice(_FAMILIES, case_sensitive=False),
    required=True,
    help='Witness family'
)
@click.option(
    '--n', 'n',
    type=click.IntRange(1, None),
    required=True,
    help='Family parameter'
)
@click.option(
    '--arity',
    type=click.IntRange(1, None),
    help='Cut every atom down to its first ARITY arguments (derived variant)'
)
@click.option(
    '--model',
    is_flag=True,
    help='Also build and print the explicit model'
)
@click.option(
    '--cap',
    type=click.IntRange(1, None),
    default=DEFAULT_MODEL_CAP,
    help=f'Largest model domain to build (default: {DEFAULT_MODEL_CAP})'
)
@click.pass_context
def witness_cmd(ctx: click.Context, family: str, n: int, arity: Optional[int], model: bool,
                cap: int) -> None:
    """Print the n-th sentence of a witness family, and optionally its model.

    \b
    EXAMPLES:
      sepfrag witness --family sf_bsr --n 1 --model
      sepfrag witness --family sgf_lgf --n 1 --arity 1
    """
    chosen = WitnessFamily(family.lower())
    try:
        phi = gen_witness(chosen, n, arity)
    except NBelowMinimum as exc:
        _fail(ctx, exc)
    payload: Dict[str, Any] = {'family': chosen.value, 'n': n, 'formula': print_sentence(phi)}
    lines = [print_sentence(phi)]
    code = EXIT_OK
    if model:
        try:
            built = gen_witness_model(chosen, n, cap)
        except CapExceeded as exc:
            click.echo(f"Model not built: {exc} (needs at least {exc.required} elements)",
                       err=True)
            payload['model_required'] = exc.required
            code = EXIT_UNKNOWN
        except SepfragError as exc:
            _fail(ctx, exc)
        else:
            lines.append(print_structure(built.structure))
            payload['model'] = built.to_dict()

    click.echo(format_json(payload) if ctx.obj['json'] else '\n\n'.join(lines))
    sys.exit(code)


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _parse_range(text: str) -> List[int]:
    """'A..B' or a single integer."""
    low, sep, high = text.partition('..')
    try:
        start = int(low)
        stop = int(high) if sep else start
    except ValueError:
        raise click.BadParameter(f"expected A..B, got {text!r}", param_hint='--n-range')
    if start < 1 or stop < start:
        raise click.BadParameter(f"empty or non-positive range {text!r}",
                                 param_hint='--n-range')
    return list(range(start, stop + 1))


@cli.command('bench')
@click.option(
    '--family', '-f',
    type=click.Choice(_FAMILIES, case_sensitive=False),
    required=True,
    help='Witness family'
)
@click.option(
    '--n-range', 'n_range',
    type=str,
    required=True,
    help='Parameters to measure, e.g. 1..3'
)
@click.option(
    '--format', 'format',
    type=click.Choice(['csv', 'text', 'json'], case_sensitive=False),
    help='Output format (default: csv)'
)
@click.pass_context
def bench_cmd(ctx: click.Context, family: str, n_range: str, format: Optional[str]) -> None:
    """Translate the witnesses of a family and print the gap table.

    Rows that exceed the translation budget are kept with empty length
    columns, so the table always has one row per n.

    \b
    EXAMPLES:
      sepfrag bench --family mfo_bsr --n-range 1..3
      sepfrag --jobs 3 bench --family sf_bsr --n-range 1..4 --format text
    """
    n_values = _parse_range(n_range)
    config = _config_or_exit(ctx, format='json' if ctx.obj['json'] else format)
    chosen = WitnessFamily(family.lower())
    budget = config.budget.blowup()

    rows = _map(ctx, _BenchJob(chosen, budget), n_values)
    for row in rows:
        _debug(ctx, f"  n={row.n}: {row.status}, {row.steps} steps")

    fmt = config.output.format
    if fmt == 'json':
        click.echo(format_json(rows))
    elif fmt == 'text':
        click.echo(format_gap_table(rows))
    else:
        click.echo(format_gap_csv(rows), nl=False)


class _BenchJob:
    """Picklable gap_row call for the worker pool."""

    def __init__(self, family: WitnessFamily, budget: Any):
        self.family = family
        self.budget = budget

    def __call__(self, n: int) -> Any:
        return gap_row(self.family, n, self.budget)


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

@cli.command('corpus')
@click.option(
    '--fragment', '-f',
    type=click.Choice(list(CORPUS_FRAGMENTS), case_sensitive=False),
    help='Fragment to generate sentences for'
)
@click.option(
    '--family',
    type=click.Choice(_FAMILIES, case_sensitive=False),
    help='Emit arity-truncated witness variants instead'
)
@click.option(
    '--arity',
    type=click.IntRange(1, None),
    default=1,
    help='Arity of the witness variants (default: 1)'
)
@click.option(
    '--count', '-n',
    type=click.IntRange(1, None),
    default=10,
    help='Number of sentences, or largest n for --family (default: 10)'
)
@click.option(
    '--seed',
    type=click.IntRange(0, None),
    help='Generator seed (default: 0, or SEPFRAG_SEED)'
)
@click.pass_context
def corpus_cmd(ctx: click.Context, fragment: Optional[str], family: Optional[str], arity: int,
               count: int, seed: Optional[int]) -> None:
    """Print generated sentences in input-file format.

    \b
    EXAMPLES:
      sepfrag corpus --fragment SBSR --count 20 --seed 3 > sbsr.fol
      sepfrag corpus --family sgf_lgf --arity 1 --count 3
    """
    if (fragment is None) == (family is None):
        _fail(ctx, ValueError("give exactly one of --fragment and --family"))
    config = _config_or_exit(ctx, seed=seed)
    try:
        if family is not None:
            entries = witness_variants(WitnessFamily(family.lower()), range(1, count + 1), arity)
        else:
            label = str(fragment)
            generator = CorpusGenerator(config.oracle.seed,
                                        constants=config.search.allow_constants)
            entries = generator.generate(label, count)
    except CorpusExhausted as exc:
        _fail(ctx, exc, EXIT_UNKNOWN)
    except SepfragError as exc:
        _fail(ctx, exc)

    if ctx.obj['json']:
        click.echo(format_json(entries))
        return
    blocks = []
    for entry in entries:
        tags = f" [{', '.join(entry.tags)}]" if entry.tags else ''
        blocks.append(f"# {entry.fragment}{tags}\n{print_sentence(entry.formula)}")
    click.echo('\n\n'.join(blocks))


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

@cli.command('config')
@click.option(
    '--save', 'save_path',
    type=click.Path(dir_okay=False, path_type=Path),
    help='Write the effective configuration as a commented YAML (or JSON) file'
)
@click.option(
    '--show',
    is_flag=True,
    help='Print the effective configuration'
)
@click.option(
    '--include-defaults',
    is_flag=True,
    help='Also write settings that match their defaults'
)
@click.pass_context
def config_cmd(ctx: click.Context, save_path: Optional[Path], show: bool,
               include_defaults: bool) -> None:
    """Show or save the effective configuration.

    \b
    EXAMPLES:
      sepfrag config --show
      sepfrag --max-terms 512 config --save sepfrag.yaml --include-defaults
    """
    config = _config_or_exit(ctx)
    if save_path is not None:
        flat: Dict[str, Any] = {}
        for category in ('oracle', 'budget', 'search', 'output'):
            flat.update(config.to_dict()[category])
        try:
            save_config(save_path, flat, include_defaults=include_defaults)
        except (OSError, ValueError) as exc:
            _fail(ctx, exc)
        click.echo(f"Configuration saved to: {save_path}", err=True)
    if show or save_path is None:
        click.echo(format_json(config.to_dict()))


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def run(argv: Optional[Iterable[str]] = None) -> int:
    """Run the command line on argv and return the exit code.

    Usage errors, which click reports with code 2, come back as 3 so that 2
    stays reserved for UNKNOWN verdicts and exceeded budgets.
    """
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name='sepfrag',
                 standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except SystemExit as exc:
        if exc.code is None:
            return EXIT_OK
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return EXIT_OK


def main() -> None:
    """Console script entry point."""
    sys.exit(run())


if __name__ == '__main__':
    main()
