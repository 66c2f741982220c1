"""Text syntax for formulas, vocabularies and finite structures.

Formula grammar (loosest to tightest)::

    <->   left associative
    ->    right associative
    |     n-ary
    &     n-ary
    ~     prefix
    forall x y. F / exists x. F   scope extends as far right as possible

Atoms are ``P(t1, ..., tn)`` or a bare ``P`` for nullary predicates,
equalities ``s = t``, and the constants ``true`` / ``false``. A formula may be
preceded by an inline vocabulary header ``vocab P/1 R/2 c;`` where a bare
name declares a constant. ``#`` starts a comment that runs to the end of the
line.

Structure format::

    domain 3; P = {(0),(2)}; R = {(0,1)}; c = 1
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Set, Tuple

from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken

from .syntax import (
    And,
    Atom,
    Const,
    Eq,
    Exists,
    Falsity,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    SepfragError,
    Term,
    Truth,
    Var,
    Vocabulary,
)


FORMULA_GRAMMAR = r"""
    start: header? formula

    header: "vocab" decl* ";"
    decl: NAME "/" INT     -> pred_decl
        | NAME             -> const_decl

    ?formula: iff
    ?iff: imp
        | iff "<->" imp    -> iff
    ?imp: disj
        | disj "->" imp    -> implies
    ?disj: conj
         | conj ("|" conj)+  -> or_
    ?conj: unary
         | unary ("&" unary)+ -> and_
    ?unary: "~" unary      -> not_
          | quant
          | primary
    quant: QUANT NAME+ "." formula
    ?primary: "(" formula ")"
            | "true"        -> truth
            | "false"       -> falsity
            | term "=" term -> eq
            | NAME "(" [term ("," term)*] ")" -> atom
            | NAME          -> nullary
    term: NAME

    QUANT.2: /(forall|exists)\b/
    NAME: /[A-Za-z][A-Za-z0-9_]*/
    COMMENT: /#[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

STRUCTURE_GRAMMAR = r"""
    start: "domain" INT (";" entry)* ";"?
    entry: NAME "=" "{" [tuple ("," tuple)*] "}" -> relation
         | NAME "=" INT                           -> constant
    tuple: "(" [INT ("," INT)*] ")"

    NAME: /[A-Za-z][A-Za-z0-9_]*/
    COMMENT: /#[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets into the parsed text."""
    begin: int
    end: int

    def __post_init__(self) -> None:
        if self.begin > self.end:
            raise ValueError("SourceSpan begin must not exceed end")


class ParseError(SepfragError):
    """Base class for parse failures; carries the offending span."""

    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at bytes {span.begin}-{span.end}")
        self.span = span


class FormulaSyntaxError(ParseError):
    """Text does not match the grammar."""


class ArityMismatch(ParseError):
    """Predicate applied to the wrong number of arguments."""


class UndeclaredSymbol(ParseError):
    """Identifier is neither bound, nor a declared constant, nor a declared predicate."""


class OutOfDomainTuple(ParseError):
    """A relation tuple mentions an element outside the domain or has the wrong arity."""


class MissingConstantInterpretation(ParseError):
    """A declared constant has no element assigned."""


@lru_cache(maxsize=None)
def _formula_parser() -> Lark:
    return Lark(FORMULA_GRAMMAR, parser='lalr', propagate_positions=True)


@lru_cache(maxsize=None)
def _structure_parser() -> Lark:
    return Lark(STRUCTURE_GRAMMAR, parser='lalr', propagate_positions=True)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode('utf-8'))


def _span(text: str, begin: int, end: int) -> SourceSpan:
    return SourceSpan(_byte_offset(text, begin), _byte_offset(text, end))


def _token_span(text: str, token: Token) -> SourceSpan:
    begin = token.start_pos or 0
    return _span(text, begin, begin + len(token))


def _syntax_error(text: str, err: UnexpectedInput) -> FormulaSyntaxError:
    token = getattr(err, 'token', None)
    if isinstance(err, UnexpectedToken) and token is not None and token.type == '$END':
        span = _span(text, len(text), len(text))
        return FormulaSyntaxError("Unexpected end of input", span)
    if isinstance(err, UnexpectedCharacters):
        pos = err.pos_in_stream
        return FormulaSyntaxError(f"Unexpected character {text[pos]!r}", _span(text, pos, pos + 1))
    if token is not None and token.start_pos is not None:
        return FormulaSyntaxError(f"Unexpected token {str(token)!r}", _token_span(text, token))
    pos = getattr(err, 'pos_in_stream', None) or len(text)
    return FormulaSyntaxError("Syntax error", _span(text, pos, pos))


def parse_formula(
    text: str,
    vocab: Optional[Vocabulary] = None,
    allow_free: bool = False,
) -> Formula:
    """Parse a formula against a vocabulary.

    Args:
        text: Formula text, optionally with an inline ``vocab ...;`` header.
        vocab: Declared symbols. The header, if present, is merged in. When
            neither is given, predicate arities are inferred from first use.
        allow_free: Treat unbound, undeclared identifiers as free variables
            instead of rejecting them.

    Returns:
        The parsed Formula.

    Raises:
        FormulaSyntaxError, ArityMismatch, UndeclaredSymbol
    """
    formula, _ = parse_formula_with_vocab(text, vocab, allow_free)
    return formula


def parse_formula_with_vocab(
    text: str,
    vocab: Optional[Vocabulary] = None,
    allow_free: bool = False,
) -> Tuple[Formula, Vocabulary]:
    """Like parse_formula but also returns the effective vocabulary."""
    try:
        tree = _formula_parser().parse(text)
    except UnexpectedInput as err:
        raise _syntax_error(text, err) from None

    body = tree.children[-1]
    declared = vocab
    if len(tree.children) == 2:
        header = _read_header(text, tree.children[0])
        declared = header if declared is None else declared.merge(header)
    builder = _FormulaBuilder(text, declared, allow_free)
    formula = builder.build(body, frozenset())
    return formula, builder.vocabulary()


def _read_header(text: str, header: Tree) -> Vocabulary:
    predicates: Dict[str, int] = {}
    constants: Set[str] = set()
    for decl in header.children:
        name = decl.children[0]
        if decl.data == 'pred_decl':
            predicates[str(name)] = int(decl.children[1])
        else:
            constants.add(str(name))
    return Vocabulary(predicates, frozenset(constants))


class _FormulaBuilder:
    """Top-down conversion of the parse tree with scope-aware identifier resolution."""

    def __init__(self, text: str, vocab: Optional[Vocabulary], allow_free: bool):
        self.text = text
        self.declared = vocab
        self.allow_free = allow_free
        self.inferred: Dict[str, int] = {}

    def vocabulary(self) -> Vocabulary:
        if self.declared is not None:
            return self.declared
        return Vocabulary(dict(self.inferred), frozenset())

    def _tree_span(self, tree: Tree) -> SourceSpan:
        meta = tree.meta
        if getattr(meta, 'empty', True):
            return SourceSpan(0, 0)
        return _span(self.text, meta.start_pos, meta.end_pos)

    def build(self, tree: Tree, scope: frozenset) -> Formula:
        rule = tree.data
        kids = tree.children
        if rule == 'iff':
            return Iff(self.build(kids[0], scope), self.build(kids[1], scope))
        if rule == 'implies':
            return Implies(self.build(kids[0], scope), self.build(kids[1], scope))
        if rule == 'or_':
            return Or(tuple(self.build(kid, scope) for kid in kids))
        if rule == 'and_':
            return And(tuple(self.build(kid, scope) for kid in kids))
        if rule == 'not_':
            return Not(self.build(kids[0], scope))
        if rule == 'quant':
            kind = str(kids[0])
            names = [str(tok) for tok in kids[1:-1]]
            if len(set(names)) != len(names):
                raise FormulaSyntaxError(
                    "Quantifier block binds a variable twice", self._tree_span(tree)
                )
            for tok in kids[1:-1]:
                self._check_not_symbol(tok)
            body = self.build(kids[-1], scope | frozenset(names))
            if kind == 'forall':
                return Forall(tuple(names), body)
            return Exists(tuple(names), body)
        if rule == 'truth':
            return Truth()
        if rule == 'falsity':
            return Falsity()
        if rule == 'eq':
            return Eq(self.term(kids[0], scope), self.term(kids[1], scope))
        if rule == 'atom':
            name = kids[0]
            args = tuple(self.term(kid, scope) for kid in kids[1:] if kid is not None)
            self._check_predicate(name, len(args), tree)
            return Atom(str(name), args)
        if rule == 'nullary':
            name = kids[0]
            self._check_predicate(name, 0, tree)
            return Atom(str(name), ())
        raise FormulaSyntaxError(f"Unexpected construct {rule}", self._tree_span(tree))

    def _check_not_symbol(self, token: Token) -> None:
        vocab = self.declared
        if vocab is not None and (str(token) in vocab.predicates or str(token) in vocab.constants):
            raise FormulaSyntaxError(
                f"Cannot bind declared symbol {token}", _token_span(self.text, token)
            )

    def _check_predicate(self, name: Token, arity: int, tree: Tree) -> None:
        key = str(name)
        if self.declared is not None:
            if key not in self.declared.predicates:
                raise UndeclaredSymbol(
                    f"Undeclared predicate {key}", _token_span(self.text, name)
                )
            expected = self.declared.predicates[key]
        else:
            expected = self.inferred.setdefault(key, arity)
        if expected != arity:
            raise ArityMismatch(
                f"Predicate {key} expects {expected} arguments, got {arity}",
                self._tree_span(tree),
            )

    def term(self, tree: Tree, scope: frozenset) -> Term:
        token = tree.children[0]
        name = str(token)
        if name in scope:
            return Var(name)
        if self.declared is not None and name in self.declared.constants:
            return Const(name)
        if self.allow_free:
            return Var(name)
        raise UndeclaredSymbol(
            f"Identifier {name} is neither bound nor a declared constant",
            _token_span(self.text, token),
        )


def split_sections(text: str) -> Iterator[Tuple[int, str]]:
    """Split a corpus file into blank-line separated sections.

    Yields (line number of the first line, section text). Sections consisting
    only of comments are skipped.
    """
    lines = text.splitlines()
    start = 0
    chunk: List[str] = []
    for number, line in enumerate(lines, start=1):
        if line.strip():
            if not chunk:
                start = number
            chunk.append(line)
            continue
        if chunk:
            yield from _emit(start, chunk)
            chunk = []
    if chunk:
        yield from _emit(start, chunk)


def _emit(start: int, chunk: List[str]) -> Iterator[Tuple[int, str]]:
    if all(line.lstrip().startswith('#') for line in chunk):
        return
    yield start, '\n'.join(chunk)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_IFF = 1
_PREC_IMP = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_UNARY = 5


def print_term(term: Term) -> str:
    return term.name


def print_formula(phi: Formula) -> str:
    """Canonical text with minimal parentheses; parse(print(phi)) == phi."""
    return _show(phi, 0, True)


def _show(phi: Formula, need: int, open_right: bool) -> str:
    if isinstance(phi, (Forall, Exists)):
        keyword = 'forall' if isinstance(phi, Forall) else 'exists'
        text = f"{keyword} {' '.join(phi.vars)}. {_show(phi.body, 0, True)}"
        return text if open_right else f"({text})"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.pred
        return f"{phi.pred}({', '.join(print_term(t) for t in phi.args)})"
    if isinstance(phi, Eq):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if isinstance(phi, Truth):
        return 'true'
    if isinstance(phi, Falsity):
        return 'false'
    if isinstance(phi, Not):
        return '~' + _show(phi.body, _PREC_UNARY, open_right)

    if isinstance(phi, Iff):
        prec = _PREC_IFF
        inner_open = open_right or need > prec
        text = (
            f"{_show(phi.left, _PREC_IFF, False)} <-> "
            f"{_show(phi.right, _PREC_IMP, inner_open)}"
        )
    elif isinstance(phi, Implies):
        prec = _PREC_IMP
        inner_open = open_right or need > prec
        text = (
            f"{_show(phi.left, _PREC_OR, False)} -> "
            f"{_show(phi.right, _PREC_IMP, inner_open)}"
        )
    elif isinstance(phi, (And, Or)):
        prec = _PREC_AND if isinstance(phi, And) else _PREC_OR
        symbol = ' & ' if isinstance(phi, And) else ' | '
        inner_open = open_right or need > prec
        last = len(phi.parts) - 1
        text = symbol.join(
            _show(part, prec + 1, inner_open and i == last) for i, part in enumerate(phi.parts)
        )
    else:
        raise TypeError(f"Not a formula: {phi!r}")
    return text if need <= prec else f"({text})"


def print_vocabulary(vocab: Vocabulary) -> str:
    decls = [f"{name}/{arity}" for name, arity in sorted(vocab.predicates.items())]
    decls.extend(sorted(vocab.constants))
    return f"vocab {' '.join(decls)};"


def print_sentence(phi: Formula, vocab: Optional[Vocabulary] = None) -> str:
    """Self-contained corpus entry: vocabulary header followed by the formula."""
    vocab = vocab or Vocabulary.of(phi)
    return f"{print_vocabulary(vocab)} {print_formula(phi)}"


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------

def parse_structure(text: str, vocab: Vocabulary) -> 'FiniteStructure':
    """Parse the line-oriented structure format.

    Predicates missing from the text are interpreted as empty relations.

    Raises:
        FormulaSyntaxError, UndeclaredSymbol, OutOfDomainTuple,
        MissingConstantInterpretation
    """
    from .semantics import FiniteStructure

    try:
        tree = _structure_parser().parse(text)
    except UnexpectedInput as err:
        raise _syntax_error(text, err) from None

    size_token = tree.children[0]
    size = int(size_token)
    if size < 1:
        raise FormulaSyntaxError("Domain size must be positive", _token_span(text, size_token))

    relations: Dict[str, Set[Tuple[int, ...]]] = {p: set() for p in vocab.predicates}
    constant_map: Dict[str, int] = {}
    for entry in tree.children[1:]:
        name = entry.children[0]
        key = str(name)
        if entry.data == 'constant':
            if key not in vocab.constants:
                raise UndeclaredSymbol(f"Undeclared constant {key}", _token_span(text, name))
            value = entry.children[1]
            if int(value) >= size:
                raise OutOfDomainTuple(
                    f"Constant {key} mapped outside the domain", _token_span(text, value)
                )
            constant_map[key] = int(value)
            continue
        if key not in vocab.predicates:
            raise UndeclaredSymbol(f"Undeclared predicate {key}", _token_span(text, name))
        arity = vocab.predicates[key]
        for tup in entry.children[1:]:
            if tup is None:
                continue
            values = tuple(int(tok) for tok in tup.children if tok is not None)
            if len(values) != arity or any(v >= size for v in values):
                meta = tup.meta
                raise OutOfDomainTuple(
                    f"Tuple {values} does not fit {key}/{arity} over domain {size}",
                    _span(text, meta.start_pos, meta.end_pos),
                )
            relations[key].add(values)

    missing = sorted(vocab.constants - set(constant_map))
    if missing:
        raise MissingConstantInterpretation(
            f"No interpretation for constants {missing}", _span(text, len(text), len(text))
        )
    return FiniteStructure(
        size,
        {name: frozenset(tuples) for name, tuples in relations.items()},
        constant_map,
        dict(vocab.predicates),
    )


def print_structure(structure: 'FiniteStructure') -> str:
    """Canonical structure text with sorted predicates and tuples."""
    parts = [f"domain {structure.domain_size}"]
    for name in sorted(structure.relations):
        tuples = sorted(structure.relations[name])
        body = ','.join('(' + ','.join(str(v) for v in t) + ')' for t in tuples)
        parts.append(f"{name} = {{{body}}}")
    for name in sorted(structure.constant_map):
        parts.append(f"{name} = {structure.constant_map[name]}")
    return '; '.join(parts)
