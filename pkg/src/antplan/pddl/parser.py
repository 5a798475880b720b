"""Recursive-descent parser for typed STRIPS PDDL with negative preconditions and costs.

The text is first lexed into s-expressions that remember their source position;
the domain and problem readers then walk those lists and report problems with
line/column information.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    ROOT_TYPE,
    ActionSchema,
    Atom,
    DomainAst,
    Literal,
    PredicateDef,
    ProblemAst,
    TypedName,
)
from .errors import (
    GoalUsesUnknownObject,
    LexError,
    ParseError,
    PddlTypeError,
    UnsupportedFeature,
)

SUPPORTED_REQUIREMENTS = {
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":action-costs",
}

UNSUPPORTED_CONNECTIVES = {
    "or": "disjunction",
    "forall": "universal quantification",
    "exists": "existential quantification",
    "when": "conditional effects",
    "imply": "implication",
    "=": "equality",
}

_NAME = re.compile(r"[A-Za-z?][A-Za-z0-9_\-?]*$")


@dataclass
class Token:
    value: str
    line: int
    column: int

    def __repr__(self) -> str:
        return self.value


@dataclass
class SList:
    items: list
    line: int
    column: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Token):
            return self.items[0].value
        return None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append(Token(ch, line, col))
            i += 1
            col += 1
            continue
        start, start_col = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        word = text[start:i]
        if any(c in word for c in "\"'`{}[]|\\"):
            raise LexError(f"unexpected character in {word!r}", line, start_col)
        tokens.append(Token(word.lower(), line, start_col))
    return tokens


def read_sexpr(text: str) -> SList:
    """Lex ``text`` and return its single top-level list."""
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty input", 1, 1)
    stack: list[SList] = []
    top: SList | None = None
    for tok in tokens:
        if tok.value == "(":
            stack.append(SList([], tok.line, tok.column))
        elif tok.value == ")":
            if not stack:
                raise ParseError("unbalanced ')'", tok.line, tok.column)
            done = stack.pop()
            if stack:
                stack[-1].items.append(done)
            elif top is None:
                top = done
            else:
                raise ParseError("more than one top-level expression", done.line, done.column)
        else:
            if not stack:
                raise ParseError(f"unexpected token {tok.value!r} outside parentheses", tok.line, tok.column)
            stack[-1].items.append(tok)
    if stack:
        raise ParseError("unbalanced '(' (missing ')')", stack[-1].line, stack[-1].column)
    assert top is not None
    return top


def _pos(node) -> tuple[int, int]:
    return node.line, node.column


def _expect_list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise ParseError(f"expected {what}, got {node.value!r}", *_pos(node))
    return node


def _expect_name(node, what: str) -> str:
    if not isinstance(node, Token):
        raise ParseError(f"expected {what}, got a list", *_pos(node))
    if not _NAME.match(node.value):
        raise ParseError(f"invalid {what} {node.value!r}", *_pos(node))
    return node.value


def _typed_list(items: list, variables: bool) -> list[tuple[TypedName, Token]]:
    """Parse ``a b - t c - u d`` into typed names (untyped ones default to ``object``)."""
    out: list[tuple[TypedName, Token]] = []
    pending: list[Token] = []
    i = 0
    while i < len(items):
        item = items[i]
        if isinstance(item, SList):
            if item.head() == "either":
                raise UnsupportedFeature("'either' types are not supported", *_pos(item))
            raise ParseError("unexpected list in typed list", *_pos(item))
        if item.value == "-":
            if not pending:
                raise ParseError("type annotation without names", *_pos(item))
            if i + 1 >= len(items):
                raise ParseError("missing type after '-'", *_pos(item))
            ty = items[i + 1]
            if isinstance(ty, SList) and ty.head() == "either":
                raise UnsupportedFeature("'either' types are not supported", *_pos(ty))
            type_name = _expect_name(ty, "type name")
            out.extend((TypedName(t.value, type_name), t) for t in pending)
            pending = []
            i += 2
            continue
        name = _expect_name(item, "name")
        if variables != name.startswith("?"):
            kind = "variable" if variables else "name"
            raise ParseError(f"expected a {kind}, got {name!r}", *_pos(item))
        pending.append(item)
        i += 1
    out.extend((TypedName(t.value, ROOT_TYPE), t) for t in pending)
    return out


class _DomainReader:
    def __init__(self, root: SList):
        self.root = root
        self.requirements: list[str] = []
        self.types: list[TypedName] = []
        self.declared_types: set[str] = {ROOT_TYPE}
        self.constants: list[TypedName] = []
        self.predicates: dict[str, PredicateDef] = {}
        self.actions: list[ActionSchema] = []
        self.has_total_cost = False
        self.has_types_section = False

    def read(self) -> DomainAst:
        root = self.root
        if root.head() != "define" or len(root) < 2:
            raise ParseError("expected (define (domain NAME) ...)", *_pos(root))
        hdr = _expect_list(root[1], "(domain NAME)")
        if hdr.head() != "domain" or len(hdr) != 2:
            raise ParseError("expected (domain NAME)", *_pos(hdr))
        name = _expect_name(hdr[1], "domain name")
        sections = [_expect_list(s, "domain section") for s in root.items[2:]]
        # types and predicates must be known before constants and actions are checked
        order = {":requirements": 0, ":types": 1, ":constants": 2, ":predicates": 3, ":functions": 4}
        for sec in sorted(sections, key=lambda s: order.get(s.head() or "", 5)):
            self._section(sec)
        return DomainAst(
            name=name,
            requirements=tuple(self.requirements),
            types=tuple(self.types),
            constants=tuple(self.constants),
            predicates=tuple(self.predicates.values()),
            actions=tuple(self.actions),
            has_total_cost=self.has_total_cost,
        )

    def _section(self, sec: SList) -> None:
        kind = sec.head()
        if kind == ":requirements":
            for tok in sec.items[1:]:
                req = _expect_name(tok, "requirement") if not tok.value.startswith(":") else tok.value
                if req not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(f"requirement {req} is outside the supported subset", *_pos(tok))
                self.requirements.append(req)
        elif kind == ":types":
            self.has_types_section = True
            for tn, tok in _typed_list(sec.items[1:], variables=False):
                if tn.name == ROOT_TYPE:
                    continue
                self.types.append(tn)
                self.declared_types.add(tn.name)
            for tn in self.types:
                if tn.type not in self.declared_types:
                    # a parent mentioned only as a supertype is implicitly declared
                    self.declared_types.add(tn.type)
                    self.types.append(TypedName(tn.type, ROOT_TYPE))
        elif kind == ":constants":
            for tn, tok in _typed_list(sec.items[1:], variables=False):
                self._check_type(tn.type, tok)
                self.constants.append(tn)
        elif kind == ":predicates":
            for p in sec.items[1:]:
                p = _expect_list(p, "predicate declaration")
                pname = _expect_name(p[0], "predicate name")
                if pname in self.predicates:
                    raise PddlTypeError(f"predicate {pname} declared twice", *_pos(p))
                params = []
                for tn, tok in _typed_list(p.items[1:], variables=True):
                    self._check_type(tn.type, tok)
                    params.append(tn)
                self.predicates[pname] = PredicateDef(pname, tuple(params))
        elif kind == ":functions":
            for item in sec.items[1:]:
                if isinstance(item, SList):
                    if item.head() != "total-cost" or len(item) != 1:
                        raise UnsupportedFeature("only the (total-cost) function is supported", *_pos(item))
                    self.has_total_cost = True
                elif item.value not in ("-", "number"):
                    raise UnsupportedFeature(f"unexpected function item {item.value!r}", *_pos(item))
        elif kind == ":action":
            self.actions.append(self._action(sec))
        elif kind in (":durative-action", ":derived", ":process", ":event"):
            raise UnsupportedFeature(f"{kind} is outside the supported subset", *_pos(sec))
        else:
            raise ParseError(f"unknown domain section {kind!r}", *_pos(sec))

    def _check_type(self, type_name: str, tok) -> None:
        if type_name not in self.declared_types:
            raise PddlTypeError(f"undeclared type {type_name!r}", *_pos(tok))

    def _action(self, sec: SList) -> ActionSchema:
        if len(sec) < 2:
            raise ParseError("action without a name", *_pos(sec))
        name = _expect_name(sec[1], "action name")
        fields: dict[str, object] = {}
        items = sec.items[2:]
        if len(items) % 2:
            raise ParseError(f"action {name}: keyword without value", *_pos(sec))
        for key, val in zip(items[::2], items[1::2]):
            if not isinstance(key, Token) or key.value not in (":parameters", ":precondition", ":effect"):
                raise ParseError(f"action {name}: unexpected {key!r}", *_pos(key))
            fields[key.value] = val
        params: list[TypedName] = []
        if ":parameters" in fields:
            plist = _expect_list(fields[":parameters"], "parameter list")
            for tn, tok in _typed_list(plist.items, variables=True):
                self._check_type(tn.type, tok)
                params.append(tn)
        scope = {p.name: p.type for p in params}
        scope.update({c.name: c.type for c in self.constants})

        pre_pos: list[Atom] = []
        pre_neg: list[Atom] = []
        if ":precondition" in fields:
            for lit in self._conjunction(fields[":precondition"], scope, allow_cost=False)[0]:
                (pre_pos if lit.positive else pre_neg).append(lit.atom)
        add: list[Atom] = []
        delete: list[Atom] = []
        cost, explicit = 1, False
        if ":effect" in fields:
            lits, cost_val = self._conjunction(fields[":effect"], scope, allow_cost=True)
            for lit in lits:
                (add if lit.positive else delete).append(lit.atom)
            if cost_val is not None:
                cost, explicit = cost_val, True
        return ActionSchema(name, tuple(params), tuple(pre_pos), tuple(pre_neg),
                            tuple(add), tuple(delete), cost, explicit)

    def _conjunction(self, node, scope: dict[str, str], allow_cost: bool):
        node = _expect_list(node, "formula")
        parts = node.items[1:] if node.head() == "and" else [node]
        if not node.items:
            parts = []
        lits: list[Literal] = []
        cost: int | None = None
        for part in parts:
            part = _expect_list(part, "literal")
            head = part.head()
            if head == "increase":
                if not allow_cost:
                    raise UnsupportedFeature("numeric expressions are only allowed as cost effects", *_pos(part))
                if cost is not None:
                    raise ParseError("more than one cost effect", *_pos(part))
                cost = self._cost(part)
                continue
            if head in ("decrease", "assign", "scale-up", "scale-down"):
                raise UnsupportedFeature(f"numeric effect {head!r} is not supported", *_pos(part))
            lits.append(_literal(part, self.predicates, scope, self._check_arg_types))
        return lits, cost

    def _cost(self, part: SList) -> int:
        if len(part) != 3 or not isinstance(part[1], SList) or part[1].head() != "total-cost":
            raise UnsupportedFeature("only (increase (total-cost) N) is supported", *_pos(part))
        val = part[2]
        if not isinstance(val, Token) or not val.value.isdigit():
            raise UnsupportedFeature("action costs must be non-negative integer constants", *_pos(part))
        return int(val.value)

    def _check_arg_types(self, pred: PredicateDef, atom_node: SList, arg_types: list[str]) -> None:
        for tn, ty, tok in zip(pred.params, arg_types, atom_node.items[1:]):
            if not (self._subtype(ty, tn.type) or self._subtype(tn.type, ty)):
                raise PddlTypeError(
                    f"argument {tok.value!r} of type {ty} does not fit parameter of type {tn.type} in {pred.name}",
                    *_pos(tok))

    def _subtype(self, sub: str, sup: str) -> bool:
        parents = {t.name: t.type for t in self.types}
        seen = set()
        while sub not in seen:
            if sub == sup:
                return True
            seen.add(sub)
            sub = parents.get(sub, ROOT_TYPE)
        return sup == ROOT_TYPE


def _literal(node: SList, predicates: dict[str, PredicateDef], scope: dict[str, str], check_types) -> Literal:
    head = node.head()
    if head is None:
        raise ParseError("expected a predicate name", *_pos(node))
    if head in UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(f"{UNSUPPORTED_CONNECTIVES[head]} ({head}) is outside the supported subset", *_pos(node))
    if head == "and":
        raise UnsupportedFeature("nested conjunctions are not supported", *_pos(node))
    if head == "not":
        if len(node) != 2:
            raise ParseError("(not ...) takes exactly one atom", *_pos(node))
        inner = _expect_list(node[1], "atom")
        if inner.head() in ("not", "and") or inner.head() in UNSUPPORTED_CONNECTIVES:
            raise UnsupportedFeature("only negated atoms are supported", *_pos(inner))
        return Literal(_atom(inner, predicates, scope, check_types), positive=False)
    return Literal(_atom(node, predicates, scope, check_types), positive=True)


def _atom(node: SList, predicates: dict[str, PredicateDef], scope: dict[str, str], check_types,
          unknown_error=PddlTypeError) -> Atom:
    name = _expect_name(node[0], "predicate name")
    pred = predicates.get(name)
    if pred is None:
        raise PddlTypeError(f"undeclared predicate {name!r}", *_pos(node))
    args = []
    types = []
    for tok in node.items[1:]:
        arg = _expect_name(tok, "argument")
        if arg not in scope:
            what = "unbound variable" if arg.startswith("?") else "unknown object"
            raise unknown_error(f"{what} {arg!r} in {name}", *_pos(tok))
        args.append(arg)
        types.append(scope[arg])
    if len(args) != pred.arity:
        raise PddlTypeError(f"predicate {name} expects {pred.arity} arguments, got {len(args)}", *_pos(node))
    check_types(pred, node, types)
    return Atom(name, tuple(args))


def parse_domain(text: str) -> DomainAst:
    """Parse domain text into a :class:`DomainAst`."""
    return _DomainReader(read_sexpr(text)).read()


def parse_problem(text: str, domain: DomainAst) -> ProblemAst:
    """Parse problem text against ``domain`` into a :class:`ProblemAst`."""
    root = read_sexpr(text)
    if root.head() != "define" or len(root) < 2:
        raise ParseError("expected (define (problem NAME) ...)", *_pos(root))
    hdr = _expect_list(root[1], "(problem NAME)")
    if hdr.head() != "problem" or len(hdr) != 2:
        raise ParseError("expected (problem NAME)", *_pos(hdr))
    name = _expect_name(hdr[1], "problem name")

    reader = _DomainReader(SList([], 0, 0))
    reader.types = list(domain.types)
    predicates = {p.name: p for p in domain.predicates}

    def check_types(pred: PredicateDef, node: SList, arg_types: list[str]) -> None:
        for tn, ty, tok in zip(pred.params, arg_types, node.items[1:]):
            if not domain.is_subtype(ty, tn.type):
                raise PddlTypeError(f"object {tok.value!r} of type {ty} is not a {tn.type} in {pred.name}",
                                    *_pos(tok))

    declared = {ROOT_TYPE} | {t.name for t in domain.types} | {t.type for t in domain.types}
    domain_name = None
    objects: list[TypedName] = []
    init: list[Atom] = []
    goal: list[Literal] = []
    hints: list[Atom] = []
    metric = False
    scope = {c.name: c.type for c in domain.constants}
    sections = [_expect_list(s, "problem section") for s in root.items[2:]]
    order = {":domain": 0, ":objects": 1}
    for sec in sorted(sections, key=lambda s: order.get(s.head() or "", 2)):
        kind = sec.head()
        if kind == ":domain":
            domain_name = _expect_name(sec[1], "domain name")
            if domain_name != domain.name:
                raise ParseError(f"problem is for domain {domain_name!r}, not {domain.name!r}", *_pos(sec))
        elif kind == ":requirements":
            continue
        elif kind == ":objects":
            for tn, tok in _typed_list(sec.items[1:], variables=False):
                if tn.type not in declared:
                    raise PddlTypeError(f"undeclared type {tn.type!r}", *_pos(tok))
                if tn.name in scope:
                    raise PddlTypeError(f"object {tn.name!r} declared twice", *_pos(tok))
                objects.append(tn)
                scope[tn.name] = tn.type
        elif kind == ":init":
            for item in sec.items[1:]:
                item = _expect_list(item, "initial fact")
                if item.head() == "=":
                    if (len(item) == 3 and isinstance(item[1], SList) and item[1].head() == "total-cost"
                            and isinstance(item[2], Token) and item[2].value == "0"):
                        continue
                    raise UnsupportedFeature("only (= (total-cost) 0) is supported among numeric facts", *_pos(item))
                if item.head() == "not":
                    raise ParseError("negative literals are not allowed in :init", *_pos(item))
                init.append(_atom(item, predicates, scope, check_types))
        elif kind == ":goal":
            if len(sec) != 2:
                raise ParseError("(:goal ...) takes exactly one formula", *_pos(sec))
            g = _expect_list(sec[1], "goal formula")
            parts = g.items[1:] if g.head() == "and" else ([g] if g.items else [])
            for part in parts:
                part = _expect_list(part, "goal literal")
                goal.append(_goal_literal(part, predicates, scope, check_types))
        elif kind == ":metric":
            if (len(sec) != 3 or not isinstance(sec[1], Token) or sec[1].value != "minimize"
                    or not isinstance(sec[2], SList) or sec[2].head() != "total-cost"):
                raise UnsupportedFeature("only (:metric minimize (total-cost)) is supported", *_pos(sec))
            metric = True
        elif kind == ":hints":
            for item in sec.items[1:]:
                item = _expect_list(item, "hint")
                hints.append(Atom(_expect_name(item[0], "hint name"),
                                  tuple(_expect_name(t, "hint argument") for t in item.items[1:])))
        else:
            raise ParseError(f"unknown problem section {kind!r}", *_pos(sec))
    if domain_name is None:
        raise ParseError("problem lacks a (:domain NAME) section", *_pos(root))
    return ProblemAst(name, domain_name, tuple(objects), tuple(init), tuple(goal), metric, tuple(hints))


def _goal_literal(node: SList, predicates, scope, check_types) -> Literal:
    head = node.head()
    if head in UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(f"{UNSUPPORTED_CONNECTIVES[head]} in goals is not supported", *_pos(node))
    if head == "not":
        if len(node) != 2:
            raise ParseError("(not ...) takes exactly one atom", *_pos(node))
        inner = _expect_list(node[1], "atom")
        return Literal(_atom(inner, predicates, scope, check_types, GoalUsesUnknownObject), False)
    return Literal(_atom(node, predicates, scope, check_types, GoalUsesUnknownObject), True)
