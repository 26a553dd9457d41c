"""Text front end: domains (.dom), rule programs (.lp) and scenarios (.scn)."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    AGENT, BASIC, DEFINED, EXOGENOUS, ActionDecl, Atom, AttributeRule, CausalLaw,
    Comparison, Const, ExecutabilityCondition, FluentDecl, History, Hpd, InitialDefault,
    LangError, Literal, Obs, Program, Rule, Scenario, ScriptEvent, Signature,
    SortHierarchy, StateConstraint, SystemDescription, Var, body_vars, term_vars,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<meta>%@[^\n]*)
  | (?P<comment>%[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>:-|\+-|!=|[(),.:|=\-])
  | (?P<neg>¬)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>\#?[a-z0-9][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LangError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "neg":
                kind, chunk = "op", "-"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Stream:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "name") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            self.error(f"expected '{text}' but found '{t.text or 'end of input'}'")
        return self.next()

    def name(self) -> str:
        t = self.peek()
        if t.kind != "name" or t.text.startswith("#"):
            self.error(f"expected a name but found '{t.text or 'end of input'}'")
        return self.next().text

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise LangError(msg, tok.line, tok.col)

    # -- terms and literals

    def term(self):
        t = self.peek()
        if t.kind == "var":
            self.next()
            sort = None
            if self.at(":") and self.peek(1).kind == "name":
                self.next()
                sort = self.name()
            return Var(t.text, sort)
        if t.kind == "name" and not t.text.startswith("#"):
            return self.atom_or_const()
        self.error(f"expected a term but found '{t.text or 'end of input'}'")

    def atom_or_const(self):
        name = self.name()
        if self.accept("("):
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
            return Atom(name, tuple(args))
        return Const(name)

    def atom(self) -> Atom:
        tok = self.peek()
        if tok.kind != "name" or tok.text[0].isdigit():
            self.error(f"expected an atom but found '{tok.text or 'end of input'}'")
        t = self.atom_or_const()
        return t if isinstance(t, Atom) else Atom(t.name)

    def literal(self) -> Literal:
        neg = self.accept("-")
        return Literal(self.atom(), neg)

    def body_item(self):
        """Returns (item, naf)."""
        if self.at("not") and self.peek(1).kind in ("name", "op"):
            self.next()
            return self.literal(), True
        if self.at("-"):
            return self.literal(), False
        start = self.i
        left = self.term()
        if self.at("!=") or self.at("="):
            op = self.next().text
            return Comparison(op, left, self.term()), False
        if isinstance(left, Var):
            self.i = start
            self.error("a variable cannot stand alone as a literal")
        if isinstance(left, Const):
            if left.name[0].isdigit():
                self.i = start
                self.error("a number cannot stand alone as a literal")
            left = Atom(left.name)
        return Literal(left, False), False

    def body(self, allow_naf: bool) -> tuple[list, list, list]:
        pos, neg, cmps = [], [], []
        while True:
            tok = self.peek()
            item, naf = self.body_item()
            if isinstance(item, Comparison):
                cmps.append(item)
            elif naf:
                if not allow_naf:
                    self.error("default negation is not allowed here", tok)
                neg.append(item)
            else:
                pos.append(item)
            if not self.accept(","):
                return pos, neg, cmps

    def signature(self) -> Signature:
        name = self.name()
        params = []
        if self.accept("("):
            params.append(self.name())
            while self.accept(","):
                params.append(self.name())
            self.expect(")")
        return Signature(name, tuple(params))

    def names(self) -> list[str]:
        out = [self.name()]
        while self.accept(","):
            out.append(self.name())
        return out

    def integer(self) -> int:
        t = self.peek()
        neg = self.accept("-")
        t = self.next()
        if t.kind != "name" or not t.text.isdigit():
            self.error(f"expected an integer but found '{t.text}'", t)
        return -int(t.text) if neg else int(t.text)


# ---------------------------------------------------------------- domains

_SCENE_BUILTINS = {
    "member": ("percept", "class"),
    "is_a": ("percept", "class"),
    "subclass": ("class", "class"),
}


def parse_domain(text: str) -> SystemDescription:
    """Parse and validate a domain description."""
    s = _Stream(text)
    sd = SystemDescription()
    pending = []  # (kind, payload, token) validated once all declarations are known
    while s.peek().kind != "eof":
        tok = s.peek()
        if tok.kind == "meta":
            s.next()
            continue
        word = tok.text
        if word == "#sort":
            s.next()
            for n in s.names():
                sd.sorts.add_sort(n)
            s.expect(".")
        elif word == "#subsort":
            s.next()
            child, parent = s.name(), s.name()
            s.expect(".")
            try:
                # a subsort declaration also declares both sorts
                sd.sorts.add_sort(child)
                sd.sorts.add_sort(parent)
                sd.sorts.add_subsort(child, parent)
            except LangError as e:
                s.error(e.message, tok)
        elif word == "#instance":
            s.next()
            objs = s.names()
            s.expect(":")
            sort = s.name()
            s.expect(".")
            try:
                for o in objs:
                    sd.sorts.add_instance(o, sort)
            except LangError as e:
                s.error(e.message, tok)
        elif word in ("#fluent", "#action"):
            s.next()
            kind = s.name()
            allowed = (BASIC, DEFINED) if word == "#fluent" else (AGENT, EXOGENOUS)
            if kind not in allowed:
                s.error(f"kind must be one of {allowed}, got '{kind}'", tok)
            sig = s.signature()
            s.expect(".")
            _check_new_symbol(sd, sig.name, s, tok)
            if word == "#fluent":
                sd.fluents[sig.name] = FluentDecl(sig, kind)
            else:
                sd.actions[sig.name] = ActionDecl(sig, kind)
            pending.append(("sig", sig, tok))
        elif word in ("#static", "#attribute"):
            s.next()
            sig = s.signature()
            s.expect(".")
            _check_new_symbol(sd, sig.name, s, tok)
            (sd.static_decls if word == "#static" else sd.attributes)[sig.name] = sig
            pending.append(("sig", sig, tok))
        elif word == "impossible":
            s.next()
            acts = [s.atom()]
            while s.accept(","):
                acts.append(s.atom())
            body = _opt_body(s)
            s.expect(".")
            pending.append(("law", ExecutabilityCondition(tuple(acts), body), tok))
        elif word in ("default", "attribute") and s.peek(1).kind == "name" and s.peek(2).text == ":":
            s.next()
            ident = s.name()
            s.expect(":")
            head = s.literal()
            body = _opt_body(s)
            prio = 1
            if word == "default" and s.accept("priority"):
                prio = s.integer()
            s.expect(".")
            if word == "default":
                pending.append(("default", InitialDefault(ident, head, body, prio), tok))
            else:
                pending.append(("attr", AttributeRule(ident, head, body), tok))
        elif word.startswith("#"):
            s.error(f"unknown directive '{word}'")
        else:
            lit = s.literal()
            if s.accept("causes"):
                if lit.neg:
                    s.error("an action cannot be negated", tok)
                head = s.literal()
                body = _opt_body(s)
                s.expect(".")
                pending.append(("law", CausalLaw(lit.atom, head, body), tok))
            elif s.accept("if"):
                pos, neg, cmps = s.body(allow_naf=False)
                s.expect(".")
                pending.append(("law", StateConstraint(lit, tuple(pos + cmps)), tok))
            else:
                s.expect(".")
                pending.append(("fact", lit, tok))
    for kind, payload, tok in pending:
        try:
            if kind == "sig":
                for p in payload.params:
                    if p not in sd.sorts.parents:
                        raise LangError(f"undeclared sort '{p}' in signature of '{payload.name}'")
            elif kind == "law":
                sd.laws.append(_check_law(sd, payload))
            elif kind == "default":
                sd.defaults.append(_check_default(sd, payload))
            elif kind == "attr":
                sd.attribute_rules.append(_check_attribute_rule(sd, payload))
            elif kind == "fact":
                sd.statics.append(_check_static_fact(sd, payload))
        except LangError as e:
            if e.line is not None:
                raise
            raise LangError(e.message, tok.line, tok.col) from None
    check_default_conflicts(sd.defaults)
    return sd


def _opt_body(s: _Stream) -> tuple:
    if s.accept("if"):
        pos, _, cmps = s.body(allow_naf=False)
        return tuple(pos + cmps)
    return ()


def _check_new_symbol(sd: SystemDescription, name: str, s: _Stream, tok: Token) -> None:
    if sd.signature(name) is not None or name in _SCENE_BUILTINS:
        s.error(f"symbol '{name}' declared twice", tok)


def scene_signature(sd: SystemDescription, name: str) -> Signature | None:
    sig = sd.signature(name)
    if sig is None and name in _SCENE_BUILTINS:
        return Signature(name, _SCENE_BUILTINS[name])
    return sig


class _SortResolver:
    """Infers one sort per variable from the argument positions it occupies."""

    def __init__(self, sd: SystemDescription, lookup=None):
        self.sd = sd
        self.lookup = lookup or sd.signature
        self.sorts: dict[str, str] = {}

    def visit_atom(self, a: Atom, kinds: tuple[str, ...]) -> None:
        sig = self.lookup(a.pred)
        if sig is None:
            raise LangError(f"undeclared predicate '{a.pred}'")
        if not self._kind_ok(a.pred, kinds):
            raise LangError(f"'{a.pred}' cannot be used here")
        if len(a.args) != len(sig.params):
            raise LangError(f"arity mismatch for '{a.pred}': expected {len(sig.params)}, got {len(a.args)}")
        for arg, sort in zip(a.args, sig.params):
            if isinstance(arg, Var):
                self._bind(arg, sort)
            elif isinstance(arg, Const):
                if not self.sd.sorts.is_instance(arg.name, sort):
                    raise LangError(f"'{arg.name}' is not an instance of sort '{sort}' in '{a}'")
            else:
                raise LangError(f"nested term not allowed in '{a}'")

    def _kind_ok(self, pred: str, kinds: tuple[str, ...]) -> bool:
        sd = self.sd
        if pred in sd.fluents:
            return "fluent" in kinds or sd.fluents[pred].kind in kinds
        if pred in sd.actions:
            return "action" in kinds
        if pred in sd.static_decls:
            return "static" in kinds
        if pred in sd.attributes or pred in _SCENE_BUILTINS:
            return "attribute" in kinds
        return False

    def _bind(self, v: Var, sort: str) -> None:
        if v.sort is not None:
            if v.sort not in self.sd.sorts.parents:
                raise LangError(f"undeclared sort '{v.sort}'")
            narrowed = self.sd.sorts.narrower(v.sort, sort)
            if narrowed is None:
                raise LangError(f"variable {v.name}:{v.sort} incompatible with sort '{sort}'")
            sort = narrowed
        old = self.sorts.get(v.name)
        if old is None:
            self.sorts[v.name] = sort
            return
        narrowed = self.sd.sorts.narrower(old, sort)
        if narrowed is None:
            raise LangError(f"variable {v.name} used with incompatible sorts '{old}' and '{sort}'")
        self.sorts[v.name] = narrowed

    def visit_annotations(self, items) -> None:
        # explicit annotations narrow the position-derived sort
        for v in body_vars(items):
            if v.sort is not None:
                self._bind(v, v.sort)

    def resolve_atom(self, a: Atom) -> Atom:
        return Atom(a.pred, tuple(self.resolve_term(t) for t in a.args))

    def resolve_term(self, t):
        if isinstance(t, Var):
            if t.name not in self.sorts:
                raise LangError(f"variable {t.name} has no sort (it occurs only in comparisons)")
            return Var(t.name, self.sorts[t.name])
        if isinstance(t, Atom):
            return self.resolve_atom(t)
        return t

    def resolve_item(self, it):
        if isinstance(it, Literal):
            return Literal(self.resolve_atom(it.atom), it.neg)
        return Comparison(it.op, self.resolve_term(it.left), self.resolve_term(it.right))


_DOMAIN_LIT = ("fluent", "static")


def _check_law(sd: SystemDescription, law):
    r = _SortResolver(sd)
    if isinstance(law, CausalLaw):
        r.visit_atom(law.action, ("action",))
        r.visit_atom(law.head.atom, ("fluent",))
        if sd.fluent_kind(law.head.atom.pred) != BASIC:
            raise LangError("defined fluent in causal-law head")
    elif isinstance(law, StateConstraint):
        r.visit_atom(law.head.atom, ("fluent",))
    else:
        for a in law.actions:
            r.visit_atom(a, ("action",))
    for it in law.body:
        if isinstance(it, Literal):
            r.visit_atom(it.atom, _DOMAIN_LIT)
    extra = [law.head] if not isinstance(law, ExecutabilityCondition) else []
    r.visit_annotations(list(law.body) + extra)
    if isinstance(law, CausalLaw):
        r.visit_annotations([Literal(law.action)])
        return CausalLaw(r.resolve_atom(law.action), r.resolve_item(law.head),
                         tuple(r.resolve_item(i) for i in law.body))
    if isinstance(law, StateConstraint):
        return StateConstraint(r.resolve_item(law.head), tuple(r.resolve_item(i) for i in law.body))
    r.visit_annotations([Literal(a) for a in law.actions])
    return ExecutabilityCondition(tuple(r.resolve_atom(a) for a in law.actions),
                                  tuple(r.resolve_item(i) for i in law.body))


def _check_default(sd: SystemDescription, d: InitialDefault) -> InitialDefault:
    r = _SortResolver(sd)
    r.visit_atom(d.head.atom, ("fluent",))
    if sd.fluent_kind(d.head.atom.pred) != BASIC:
        raise LangError(f"default '{d.id}' must conclude a basic fluent literal")
    for it in d.body:
        if isinstance(it, Literal):
            r.visit_atom(it.atom, _DOMAIN_LIT)
    r.visit_annotations(list(d.body) + [d.head])
    return InitialDefault(d.id, r.resolve_item(d.head), tuple(r.resolve_item(i) for i in d.body),
                          d.priority)


def _check_attribute_rule(sd: SystemDescription, ar: AttributeRule) -> AttributeRule:
    r = _SortResolver(sd, lambda n: scene_signature(sd, n))
    r.visit_atom(ar.head.atom, ("attribute",))
    for it in ar.body:
        if isinstance(it, Literal):
            r.visit_atom(it.atom, ("attribute", "fluent", "static"))
    r.visit_annotations(list(ar.body) + [ar.head])
    return AttributeRule(ar.id, r.resolve_item(ar.head), tuple(r.resolve_item(i) for i in ar.body))


def _check_static_fact(sd: SystemDescription, lit: Literal) -> Atom:
    if lit.neg:
        raise LangError("static facts cannot be negated (statics are closed-world)")
    a = lit.atom
    if a.pred not in sd.static_decls:
        if a.pred in sd.fluents:
            raise LangError(f"'{a.pred}' is a fluent; initial values belong in a scenario")
        raise LangError(f"undeclared static '{a.pred}'")
    if not a.is_ground():
        raise LangError(f"static fact '{a}' is not ground")
    _SortResolver(sd).visit_atom(a, ("static",))
    return a


def check_default_conflicts(defaults) -> None:
    """Equal-priority defaults with complementary conclusions are rejected."""
    seen: dict[tuple, InitialDefault] = {}
    for d in defaults:
        key = (d.head.atom.pred, d.head.neg, d.priority)
        for other_key, other in seen.items():
            if (other_key[0] == key[0] and other_key[1] != key[1] and other_key[2] == key[2]
                    and _unifiable(d.head.atom, other.head.atom)):
                raise LangError(f"defaults '{other.id}' and '{d.id}' conflict at equal priority {d.priority}")
        seen.setdefault(key + (d.id,), d)


def _unifiable(a: Atom, b: Atom) -> bool:
    if a.pred != b.pred or len(a.args) != len(b.args):
        return False
    return all(isinstance(x, Var) or isinstance(y, Var) or x == y for x, y in zip(a.args, b.args))


# ---------------------------------------------------------------- programs

def parse_program(text: str) -> Program:
    """Parse a rule program. Sort declarations (#sort, #subsort, #instance)
    and ``#horizon N.`` may be interleaved with rules."""
    s = _Stream(text)
    prog = Program()
    while s.peek().kind != "eof":
        tok = s.peek()
        word = tok.text
        if tok.kind == "meta":
            s.error("rule annotation without a rule")
        if word == "#sort":
            s.next()
            for n in s.names():
                prog.sorts.add_sort(n)
            s.expect(".")
            continue
        if word == "#subsort":
            s.next()
            c, p = s.name(), s.name()
            s.expect(".")
            try:
                prog.sorts.add_sort(c)
                prog.sorts.add_sort(p)
                prog.sorts.add_subsort(c, p)
            except LangError as e:
                s.error(e.message, tok)
            continue
        if word == "#instance":
            s.next()
            objs = s.names()
            s.expect(":")
            sort = s.name()
            s.expect(".")
            try:
                for o in objs:
                    prog.sorts.add_instance(o, sort)
            except LangError as e:
                s.error(e.message, tok)
            continue
        if word == "#horizon":
            s.next()
            prog.horizon = s.integer()
            if prog.horizon < 0:
                s.error("horizon must be non-negative", tok)
            s.expect(".")
            continue
        if word.startswith("#"):
            s.error(f"unknown directive '{word}'")
        prog.rules.append(_parse_rule(s, prog.sorts))
    return prog


def _parse_rule(s: _Stream, sorts: SortHierarchy) -> Rule:
    tok = s.peek()
    head: list[Literal] = []
    if not s.at(":-"):
        head.append(s.literal())
        while s.accept("|"):
            head.append(s.literal())
    cr = False
    pos, neg, cmps = [], [], []
    if s.accept("+-"):
        cr = True
        if not s.at("."):
            pos, neg, cmps = s.body(allow_naf=True)
    elif s.accept(":-"):
        if not s.at("."):
            pos, neg, cmps = s.body(allow_naf=True)
    s.expect(".")
    tag, prio = "", 0
    if s.peek().kind == "meta" and s.peek().line == s.toks[s.i - 1].line:
        for part in s.next().text[2:].split():
            k, _, v = part.partition("=")
            if k == "tag":
                tag = v
            elif k == "priority":
                prio = int(v)
    if len(head) > 2:
        s.error("disjunction is restricted to a literal and its complement", tok)
    if cr and len(head) != 1:
        s.error("a CR rule needs exactly one head literal", tok)
    rule = Rule(tuple(head), tuple(pos), tuple(neg), tuple(cmps), cr, prio, tag)
    try:
        rule = check_safety(rule, sorts)
    except LangError as e:
        raise LangError(e.message, tok.line, tok.col) from None
    if len(rule.head) == 2 and rule.head[0].complement() != rule.head[1]:
        s.error("disjunctive head must be a literal and its classical complement", tok)
    return rule


def check_safety(rule: Rule, sorts: SortHierarchy | None = None) -> Rule:
    """Propagate sort annotations to all occurrences of a variable and reject
    variables that are neither sorted nor bound by the positive body."""
    annotated: dict[str, str] = {}
    for v in rule.variables():
        if v.sort is not None:
            old = annotated.setdefault(v.name, v.sort)
            if old != v.sort:
                raise LangError(f"variable {v.name} annotated with both '{old}' and '{v.sort}'")
            if sorts is not None and v.sort not in sorts.parents:
                raise LangError(f"undeclared sort '{v.sort}'")
    bound = {v.name for lit in rule.pos for v in lit.atom.variables()}
    for v in rule.variables():
        if v.name not in bound and v.name not in annotated:
            raise LangError(f"unsafe variable {v.name}")
    if not annotated:
        return rule

    def fix_term(t):
        if isinstance(t, Var):
            return Var(t.name, annotated.get(t.name))
        if isinstance(t, Atom):
            return Atom(t.pred, tuple(fix_term(a) for a in t.args))
        return t

    def fix_lit(l: Literal) -> Literal:
        return Literal(fix_term(l.atom), l.neg)

    return Rule(tuple(map(fix_lit, rule.head)), tuple(map(fix_lit, rule.pos)),
                tuple(map(fix_lit, rule.neg)),
                tuple(Comparison(c.op, fix_term(c.left), fix_term(c.right)) for c in rule.cmps),
                rule.cr, rule.priority, rule.tag)


# ---------------------------------------------------------------- scenarios

def parse_scenario(text: str, sd: SystemDescription | None = None) -> Scenario:
    """Parse a scenario; with ``sd`` given, every symbol is checked against it."""
    s = _Stream(text)
    sc = Scenario()
    while s.peek().kind != "eof":
        tok = s.peek()
        word = tok.text
        if word == "obs" and s.peek(1).text == "(":
            s.next()
            s.expect("(")
            fl = s.atom()
            s.expect(",")
            val = s.name()
            if val not in ("true", "false"):
                s.error("observation value must be true or false")
            s.expect(",")
            step = s.integer()
            s.expect(")")
            s.expect(".")
            _ground(fl, s, tok)
            _step(step, s, tok)
            sc.history.obs.append(Obs(fl, val == "true", step))
        elif word == "hpd" and s.peek(1).text == "(":
            s.next()
            s.expect("(")
            act = s.atom()
            s.expect(",")
            step = s.integer()
            s.expect(")")
            s.expect(".")
            _ground(act, s, tok)
            _step(step, s, tok)
            sc.history.hpd.append(Hpd(act, step))
        elif word == "goal":
            s.next()
            lit = s.literal()
            s.expect(".")
            _ground(lit.atom, s, tok)
            sc.goal.append(lit)
        elif word == "script":
            s.next()
            act = s.atom()
            _ground(act, s, tok)
            if s.accept("at"):
                step = s.integer()
                _step(step, s, tok)
                sc.script.append(ScriptEvent(act, step))
            else:
                s.expect("on")
                s.expect("help")
                sc.script.append(ScriptEvent(act, None))
            s.expect(".")
        elif word == "truth":
            s.next()
            lit = s.literal()
            s.expect(".")
            _ground(lit.atom, s, tok)
            sc.truth.append(lit)
        elif word == "noise":
            s.next()
            t = s.next()
            if t.kind != "string":
                s.error("noise expects a quoted file name", t)
            sc.noise = t.text[1:-1]
            s.expect(".")
        elif word == "default" and s.peek(2).text == ":":
            s.next()
            ident = s.name()
            s.expect(":")
            head = s.literal()
            body = _opt_body(s)
            prio = 1
            if s.accept("priority"):
                prio = s.integer()
            s.expect(".")
            sc.history.defaults.append(InitialDefault(ident, head, body, prio))
        else:
            s.error(f"unexpected '{word or 'end of input'}' in scenario")
    if sd is not None:
        check_scenario(sc, sd)
    return sc


def _ground(a: Atom, s: _Stream, tok: Token) -> None:
    if not a.is_ground():
        s.error(f"record '{a}' is not ground", tok)


def _step(step: int, s: _Stream, tok: Token) -> None:
    if step < 0:
        s.error("negative step", tok)


def check_scenario(sc: Scenario, sd: SystemDescription) -> None:
    def fluent_or_attr(a: Atom) -> None:
        sig = scene_signature(sd, a.pred)
        if sig is None or (a.pred not in sd.fluents and a.pred not in sd.attributes):
            raise LangError(f"unknown fluent '{a.pred}'")
        _check_ground_args(sd, a, sig)

    for o in sc.history.obs:
        fluent_or_attr(o.fluent)
    for h in sc.history.hpd:
        _check_action(sd, h.action)
    for e in sc.script:
        _check_action(sd, e.action)
        if sd.actions[e.action.pred].kind != EXOGENOUS:
            raise LangError(f"scripted event '{e.action}' is not an exogenous action")
    for lit in sc.goal + sc.truth:
        if lit.atom.pred not in sd.fluents:
            raise LangError(f"unknown fluent '{lit.atom.pred}'")
        _check_ground_args(sd, lit.atom, sd.fluents[lit.atom.pred].sig)
    sc.history.defaults = [_check_default(sd, d) for d in sc.history.defaults]
    check_default_conflicts(sd.defaults + sc.history.defaults)


def _check_action(sd: SystemDescription, a: Atom) -> None:
    if a.pred not in sd.actions:
        raise LangError(f"unknown action '{a.pred}'")
    _check_ground_args(sd, a, sd.actions[a.pred].sig)


def _check_ground_args(sd: SystemDescription, a: Atom, sig: Signature) -> None:
    if len(a.args) != len(sig.params):
        raise LangError(f"arity mismatch for '{a.pred}'")
    for arg, sort in zip(a.args, sig.params):
        if not isinstance(arg, Const) or not sd.sorts.is_instance(arg.name, sort):
            raise LangError(f"unknown symbol '{arg}' for sort '{sort}' in '{a}'")


def parse_literal(text: str) -> Literal:
    s = _Stream(text)
    lit = s.literal()
    if s.peek().kind != "eof":
        s.error("trailing input after literal")
    return lit


def parse_atom(text: str) -> Atom:
    s = _Stream(text)
    a = s.atom()
    if s.peek().kind != "eof":
        s.error("trailing input after atom")
    return a
