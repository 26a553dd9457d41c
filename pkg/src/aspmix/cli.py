"""Command-line interface.

Exit codes: 0 success or consistent, 1 no plan / inconsistent / failed run,
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .belief import ExecutionPolicy, parse_noise
from .ground import GroundingError, dump_ground, ground, load_ground
from .lang.parser import parse_domain, parse_program, parse_scenario
from .lang.pretty import program_to_text
from .lang.syntax import LangError, Literal
from .reason import (
    DEFAULT_MAX_HORIZON, ReasonError, check_consistency, diagnose, explain_scene, plan,
)
from .solve.asp import CONSISTENT, answer_sets, solve_with_cr
from .solve.sat import ResourceLimit
from .translate import ALL, MINIMAL, TranslationConfig, translate

DEFAULT_SEED = 2024
GROUND_HEADER = "% aspmix ground program"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def data_path(name: str) -> Path:
    return Path(str(resources.files("aspmix") / "data" / name))


def _resolve(path: str) -> Path:
    """The given path, or a shipped data file with the same name."""
    p = Path(path)
    if p.exists():
        return p
    shipped = data_path(p.name)
    if shipped.exists():
        return shipped
    raise InputError(f"no such file: {path}")


def _read(path: str) -> tuple[str, Path]:
    p = _resolve(path)
    return p.read_text(), p


def _load(domain: str, scenario: str | None = None):
    sd = parse_domain(_read(domain)[0])
    if scenario is None:
        return sd, None, None
    text, sp = _read(scenario)
    return sd, parse_scenario(text, sd), sp


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------- commands

def cmd_plan(args) -> int:
    sd, sc, _ = _load(args.domain, args.scenario)
    if args.dump_program or args.dump_ground:
        h = sc.history.last_step() + args.horizon
        p = translate(sd, sc.history, TranslationConfig(horizon=h))
        if args.dump_program:
            Path(args.dump_program).write_text(program_to_text(p))
        if args.dump_ground:
            Path(args.dump_ground).write_text(dump_ground(ground(p)))
    try:
        pl = plan(sd, sc.history, sc.goal, args.horizon)
    except ReasonError as e:
        _emit(args, {"command": "plan", "status": e.kind, "steps": []}, f"no plan: {e.kind}")
        return 1
    payload = {"command": "plan", "status": "ok", **pl.to_json()}
    lines = [f"occurs({a}, {i})" for a, i in pl.steps] or ["(empty plan: goal already holds)"]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_diagnose(args) -> int:
    sd, sc, _ = _load(args.domain, args.scenario)
    if check_consistency(sd, sc.history, strict=True) is not None:
        _emit(args, {"command": "diagnose", "status": "consistent", "mode": args.mode,
                     "explanations": []}, "consistent: no explanation needed")
        return 0
    try:
        expls = diagnose(sd, sc.history, args.mode, limit=args.limit)
    except ReasonError as e:
        _emit(args, {"command": "diagnose", "status": e.kind, "mode": args.mode,
                     "explanations": []}, f"inconsistent: {e.kind}")
        return 1
    payload = {"command": "diagnose", "status": "explained", "mode": args.mode,
               "explanations": [e.to_json()["expl"] for e in expls]}
    _emit(args, payload, "\n".join(str(e) for e in expls) or "consistent after dropping defaults")
    return 0


def cmd_explain_scene(args) -> int:
    sd, sc, _ = _load(args.domain, args.scenario)
    obs = [o for o in sc.history.obs if o.fluent.pred in sd.attributes]
    if not obs:
        raise InputError("scenario has no attribute observations")
    objects = sorted({o.fluent.args[0].name for o in obs})
    stages = []
    text = []
    for t in sorted({o.step for o in obs}):
        seen = [Literal(o.fluent, not o.value) for o in obs if o.step <= t]
        lab = explain_scene(sd, seen, objects)
        stages.append({"step": t, "observations": [str(l) for l in seen], **lab.to_json()})
        for o in objects:
            cands = lab.candidates.get(o, [])
            if o in lab.unexplainable and not cands:
                text.append(f"step {t}: {o}: unexplainable")
            else:
                alts = " | ".join(f"is_a({o}, {c})" for c in cands)
                text.append(f"step {t}: {o}: {alts}")
    final = stages[-1]
    _emit(args, {"command": "explain-scene", "stages": stages}, "\n".join(text))
    return 1 if final["unexplainable"] else 0


def cmd_solve(args) -> int:
    text, _ = _read(args.program)
    if text.startswith(GROUND_HEADER):
        gp = load_ground(text)
    else:
        gp = ground(parse_program(text))
    has_cr = bool(gp.cr_rules)
    fn = solve_with_cr if has_cr else answer_sets
    res = fn(gp, limit=args.models)
    models = [sorted(str(l) for l in m.literals) for m in res.models]
    models.sort()
    payload = {"command": "solve", "status": res.status, "count": len(models), "models": models}
    lines = []
    for k, m in enumerate(models, 1):
        lines.append(f"Answer {k}: {{{', '.join(m)}}}")
    lines.append("SATISFIABLE" if res.status == CONSISTENT else res.status.upper())
    _emit(args, payload, "\n".join(lines))
    return 0 if res.status == CONSISTENT else 1


def _bench_inputs(args):
    sd = parse_domain(_read(args.domain)[0])
    noise = parse_noise(_read(args.noise)[0]) if args.noise else \
        parse_noise(data_path("noise.cfg").read_text())
    return sd, noise


def cmd_run(args) -> int:
    from .sim.bench import ARCH_ALIASES, MIXED, run_benchmark

    sd, noise = _bench_inputs(args)
    archs = [ARCH_ALIASES[args.arch]]
    if args.paired and MIXED not in archs:
        archs = [MIXED] + archs
    s = run_benchmark(sd, args.trials, archs, args.seed, noise,
                      ExecutionPolicy(theta=args.theta, seed=args.seed))
    if args.out:
        from .report import write_report
        write_report(s, args.out)
    _emit(args, {"command": "run", **s.to_json()}, s.table())
    return 0 if all(t.success for t in s.trials) else 1


def cmd_bench(args) -> int:
    from .report import write_report
    from .sim.bench import ARCHITECTURES, run_benchmark

    sd, noise = _bench_inputs(args)
    s = run_benchmark(sd, args.trials, ARCHITECTURES, args.seed, noise,
                      ExecutionPolicy(theta=args.theta, seed=args.seed))
    files = write_report(s, args.out)
    _emit(args, {"command": "bench", "files": files, **s.to_json()},
          s.table() + "\n" + "\n".join(f"wrote {v}" for v in files.values()))
    return 0


# ---------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="aspmix", description="Logic-based planning and diagnosis with "
                 "probabilistic action execution.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("plan", help="compute a shortest plan")
    p.add_argument("domain")
    p.add_argument("scenario")
    p.add_argument("--horizon", type=_nonneg, default=DEFAULT_MAX_HORIZON,
                   help="maximum plan length")
    p.add_argument("--dump-program", metavar="FILE")
    p.add_argument("--dump-ground", metavar="FILE")
    common(p)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("diagnose", help="explain unexpected observations")
    p.add_argument("domain")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=(ALL, MINIMAL), default=MINIMAL)
    p.add_argument("--limit", type=_nonneg, default=1000, help="0 means no cap")
    common(p)
    p.set_defaults(fn=cmd_diagnose)

    p = sub.add_parser("explain-scene", help="label unknown objects from attributes")
    p.add_argument("domain")
    p.add_argument("scenario")
    common(p)
    p.set_defaults(fn=cmd_explain_scene)

    p = sub.add_parser("solve", help="answer sets of a logic program")
    p.add_argument("program")
    p.add_argument("--models", type=_nonneg, default=1, help="0 means all")
    common(p)
    p.set_defaults(fn=cmd_solve)

    for name, fn, helptext in (("run", cmd_run, "simulated trials for one architecture"),
                               ("bench", cmd_bench, "paired benchmark of all architectures")):
        p = sub.add_parser(name, help=helptext)
        if name == "run":
            p.add_argument("--arch", choices=("mixed", "asp", "prob"), default="mixed")
            p.add_argument("--paired", action="store_true",
                           help="also run the mixed architecture on the same trials")
        p.add_argument("--trials", type=_positive, default=10)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--theta", type=float, default=0.85)
        p.add_argument("--domain", default="restaurant.dom")
        p.add_argument("--noise", default=None)
        p.add_argument("--out", default="bench_out" if name == "bench" else None,
                       help="directory for the JSON, table and figures")
        common(p)
        p.set_defaults(fn=fn)
    return ap


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (InputError, LangError, OSError) as e:
        print(f"aspmix: error: {e}", file=sys.stderr)
        return 2
    except (GroundingError, ResourceLimit) as e:
        print(f"aspmix: resource limit: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
