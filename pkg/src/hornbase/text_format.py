"""Reader and writer for ``.ddb`` databases and update requests.

A database has ``#IDB``, ``#EDB`` and ``#IC`` sections::

    #IDB
    staff_chair(X,Y) :- staff_group(X,Z), group_chair(Z,Y).
    #EDB
    group_chair(infor1,matthias).
    #IC
    :- group_chair(G,C1), group_chair(G,C2), C1 != C2.

``%`` starts a comment running to the end of the line.  Requests hold one
``+ atom.`` or ``- atom.`` per line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .core import Atom, HornClause, KnowledgeBase
from .errors import HornbaseError, ParseError, WellFormednessError

SECTIONS = ("#IDB", "#EDB", "#IC")

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<section>\#[A-Za-z]+)
  | (?P<implies>:-)
  | (?P<neq>!=)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int


@dataclass
class SourceClause:
    text: str
    line: int
    column: int
    start: int
    end: int


@dataclass
class SourceProgram:
    """Raw clause text per section, with spans into the original file."""

    idb_section: list[SourceClause] = field(default_factory=list)
    edb_section: list[SourceClause] = field(default_factory=list)
    ic_section: list[SourceClause] = field(default_factory=list)
    # (section name, start offset of header, end offset of section body)
    section_spans: list[tuple[str, int, int]] = field(default_factory=list)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1, pos))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], text: str):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message, tok=None) -> ParseError:
        tok = tok or self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.column + len(last.text) if last else 1
            return ParseError(f"{message} (at end of input)", line, col)
        return ParseError(f"{message}, got {tok.text!r}", tok.line, tok.column)

    def expect(self, kind, text=None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (text is not None and tok.text != text):
            raise self.error(f"expected {text or kind}")
        self.i += 1
        return tok

    def accept(self, kind, text=None) -> Token | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None

    def term(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind not in ("ident", "var"):
            raise self.error("expected a term")
        self.i += 1
        return tok.text

    def atom(self) -> Atom:
        name = self.expect("ident").text
        args = []
        if self.accept("punct", "("):
            args.append(self.term())
            while self.accept("punct", ","):
                args.append(self.term())
            self.expect("punct", ")")
        return Atom(name, tuple(args))

    def body_item(self, atoms, guards):
        tok = self.peek()
        if tok is not None and tok.kind in ("ident", "var"):
            nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
            if nxt is not None and nxt.kind == "neq":
                left = self.term()
                self.expect("neq")
                guards.append((left, self.term()))
                return
        atoms.append(self.atom())

    def clause(self) -> HornClause:
        head = None
        if not self.accept("implies"):
            head = self.atom()
            if self.accept("punct", "."):
                return HornClause(head)
            self.expect("implies")
        atoms: list[Atom] = []
        guards: list[tuple[str, str]] = []
        self.body_item(atoms, guards)
        while self.accept("punct", ","):
            self.body_item(atoms, guards)
        self.expect("punct", ".")
        return HornClause(head, tuple(atoms), tuple(guards))


def scan_program(text: str) -> tuple[SourceProgram, list[tuple[str, HornClause, Token]]]:
    tokens = tokenize(text)
    p = _Parser(tokens, text)
    source = SourceProgram()
    parsed = []
    section = None
    section_start = 0
    while p.peek() is not None:
        tok = p.peek()
        if tok.kind == "section":
            if tok.text not in SECTIONS:
                raise ParseError(f"unknown section {tok.text}", tok.line, tok.column)
            if section is not None:
                source.section_spans.append((section, section_start, tok.offset))
            section, section_start = tok.text, tok.offset
            p.i += 1
            continue
        if section is None:
            raise p.error("expected a section header (#IDB, #EDB or #IC)")
        start = p.i
        clause = p.clause()
        end_tok = tokens[p.i - 1]
        end = end_tok.offset + len(end_tok.text)
        sc = SourceClause(text[tok.offset:end], tok.line, tok.column, tok.offset, end)
        {"#IDB": source.idb_section, "#EDB": source.edb_section,
         "#IC": source.ic_section}[section].append(sc)
        parsed.append((section, clause, tokens[start]))
    if section is not None:
        source.section_spans.append((section, section_start, len(text)))
    return source, parsed


def parse_program(text: str, path: str | None = None) -> KnowledgeBase:
    """Parse and validate a ``.ddb`` program."""
    try:
        _, parsed = scan_program(text)
    except ParseError as e:
        raise ParseError(e.message, e.line, e.column, path) from None
    rules, facts, constraints = [], [], []
    for section, clause, tok in parsed:
        def fail(msg):
            return WellFormednessError(msg, tok.line, tok.column, path)

        if section == "#EDB":
            if clause.head is None or clause.body or clause.guards:
                raise fail(f"EDB section admits only facts: {clause}")
            if not clause.head.is_ground:
                raise fail(f"non-ground EDB fact {clause.head}")
            facts.append(clause.head)
        elif section == "#IDB":
            if clause.head is None:
                raise fail(f"IDB clause needs a head: {clause}")
            if not clause.body:
                raise fail(f"unit clause in IDB: {clause}")
            rules.append(clause)
        else:
            if clause.head is not None:
                raise fail(f"IC section admits only denials ':- body.': {clause}")
            constraints.append(clause)
        try:
            KnowledgeBase.build([clause] if section == "#IDB" else [],
                                [], [clause] if section == "#IC" else [])
        except WellFormednessError as e:
            raise fail(e.message) from None
    kb = KnowledgeBase(frozenset(rules), frozenset(facts), frozenset(constraints))
    try:
        kb.validate()
    except WellFormednessError as e:
        line = col = None
        for section, clause, tok in parsed:
            if any(a.pred in str(e) for a in clause.atoms()):
                line, col = tok.line, tok.column
                break
        raise WellFormednessError(e.message, line, col, path) from None
    return kb


def parse_atom(text: str) -> Atom:
    tokens = tokenize(text.strip().rstrip("."))
    p = _Parser(tokens, text)
    atom = p.atom()
    if p.peek() is not None:
        raise p.error("trailing input after atom")
    return atom


def serialize_program(kb: KnowledgeBase) -> str:
    lines = ["#IDB"]
    lines += sorted(str(c) for c in kb.kb_i)
    lines.append("#EDB")
    lines += sorted(f"{a}." for a in kb.kb_u)
    lines.append("#IC")
    lines += sorted(str(c) for c in kb.kb_ic)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# update requests


@dataclass(frozen=True)
class UpdateRequest:
    insertions: frozenset[Atom] = frozenset()
    deletions: frozenset[Atom] = frozenset()

    def __post_init__(self):
        overlap = self.insertions & self.deletions
        if overlap:
            raise ParseError(
                "atoms both inserted and deleted: " + ", ".join(map(str, sorted(overlap))))

    @property
    def atoms(self) -> frozenset[Atom]:
        return self.insertions | self.deletions

    def __bool__(self):
        return bool(self.insertions or self.deletions)


def parse_request(text: str, kb: KnowledgeBase | None = None) -> UpdateRequest:
    ins: dict[Atom, int] = {}
    dels: dict[Atom, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        sign, rest = line[0], line[1:].strip()
        if sign not in "+-":
            raise ParseError("request lines start with '+' or '-'", lineno, 1)
        if not rest.endswith("."):
            raise ParseError("request atom must end with '.'", lineno, len(raw))
        try:
            atom = parse_atom(rest)
        except ParseError as e:
            raise ParseError(e.message, lineno, 2) from None
        if not atom.is_ground:
            raise ParseError(f"non-ground request atom {atom}", lineno, 2)
        if kb is not None and atom.pred not in kb.view_predicates:
            raise ParseError(f"unknown view predicate {atom.pred}", lineno, 2)
        if kb is not None and kb.arities.get(atom.pred) != atom.arity:
            raise ParseError(f"arity mismatch for {atom.pred}", lineno, 2)
        (ins if sign == "+" else dels)[atom] = lineno
    overlap = set(ins) & set(dels)
    if overlap:
        a = min(overlap)
        raise ParseError(f"atom {a} is both inserted and deleted", max(ins[a], dels[a]), 1)
    return UpdateRequest(frozenset(ins), frozenset(dels))


def serialize_request(request: UpdateRequest) -> str:
    lines = [f"+ {a}." for a in sorted(request.insertions)]
    lines += [f"- {a}." for a in sorted(request.deletions)]
    return "\n".join(lines) + ("\n" if lines else "")


def replace_edb_section(text: str, facts: Iterable[Atom]) -> str:
    """Swap the EDB section of ``text`` for ``facts``; other bytes stay put."""
    source, _ = scan_program(text)
    body = "".join(f"{a}.\n" for a in sorted(facts))
    edb_spans = [(s, e) for name, s, e in source.section_spans if name == "#EDB"]
    if not edb_spans:
        sep = "" if text.endswith("\n") or not text else "\n"
        return f"{text}{sep}#EDB\n{body}"
    out = []
    cursor = 0
    for k, (s, e) in enumerate(edb_spans):
        out.append(text[cursor:s])
        if k == 0:
            out.append("#EDB\n" + body)
        cursor = e
    out.append(text[cursor:])
    return "".join(out)


def read_program(path: str) -> KnowledgeBase:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise HornbaseError(f"{path}: {e.strerror}") from None
    return parse_program(text, path)

