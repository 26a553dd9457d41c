"""Pretty printers; output re-parses to a structurally identical value."""

from __future__ import annotations

from .syntax import (
    AttributeRule, CausalLaw, ExecutabilityCondition, InitialDefault, Literal, Program,
    Scenario, SortHierarchy, StateConstraint, SystemDescription,
)


def _items(body, annotate=True) -> str:
    return ", ".join(b.show(annotate) for b in body)


def sorts_to_text(h: SortHierarchy) -> list[str]:
    lines = [f"#sort {s}." for s in h.sorts]
    for child in h.sorts:
        for parent in h.parents[child]:
            lines.append(f"#subsort {child} {parent}.")
    for s in h.sorts:
        if h.instances[s]:
            lines.append(f"#instance {', '.join(h.instances[s])} : {s}.")
    return lines


def law_to_text(law) -> str:
    if isinstance(law, CausalLaw):
        text = f"{_lit(Literal(law.action))} causes {law.head.show(True)}"
    elif isinstance(law, StateConstraint):
        text = law.head.show(True)
        return f"{text} if {_items(law.body)}."
    else:
        text = "impossible " + ", ".join(_lit(Literal(a)) for a in law.actions)
    if law.body:
        text += f" if {_items(law.body)}"
    return text + "."


def _lit(l: Literal) -> str:
    return l.show(True)


def default_to_text(d: InitialDefault) -> str:
    text = f"default {d.id}: {d.head.show(True)}"
    if d.body:
        text += f" if {_items(d.body)}"
    return text + f" priority {d.priority}."


def attribute_rule_to_text(r: AttributeRule) -> str:
    text = f"attribute {r.id}: {r.head.show(True)}"
    if r.body:
        text += f" if {_items(r.body)}"
    return text + "."


def domain_to_text(sd: SystemDescription) -> str:
    lines = sorts_to_text(sd.sorts)
    for d in sd.fluents.values():
        lines.append(f"#fluent {d.kind} {d.sig.show()}.")
    for d in sd.actions.values():
        lines.append(f"#action {d.kind} {d.sig.show()}.")
    for sig in sd.static_decls.values():
        lines.append(f"#static {sig.show()}.")
    for sig in sd.attributes.values():
        lines.append(f"#attribute {sig.show()}.")
    lines += [f"{a}." for a in sd.statics]
    lines += [law_to_text(l) for l in sd.laws]
    lines += [default_to_text(d) for d in sd.defaults]
    lines += [attribute_rule_to_text(r) for r in sd.attribute_rules]
    return "\n".join(lines) + "\n"


def program_to_text(p: Program, with_sorts: bool = True) -> str:
    lines = sorts_to_text(p.sorts) if with_sorts else []
    lines.append(f"#horizon {p.horizon}.")
    lines += [r.show() for r in p.rules]
    return "\n".join(lines) + "\n"


def scenario_to_text(sc: Scenario) -> str:
    lines = [str(o) + "." for o in sc.history.obs]
    lines += [str(h) + "." for h in sc.history.hpd]
    lines += [default_to_text(d) for d in sc.history.defaults]
    lines += [f"goal {g}." for g in sc.goal]
    for e in sc.script:
        lines.append(f"script {e.action} on help." if e.on_help else f"script {e.action} at {e.step}.")
    lines += [f"truth {t}." for t in sc.truth]
    if sc.noise:
        lines.append(f'noise "{sc.noise}".')
    return "\n".join(lines) + "\n"
