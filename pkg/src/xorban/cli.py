"""Command-line interface.

Exit status: 0 success, 1 analysis failure, 2 usage error. Every failure
prints exactly one line on stderr and nothing on stdout.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from . import verify
from .attractors import attractor_report_json, attractor_report_text, find_attractors, orbit
from .dynamics import (
    ASYNCHRONOUS,
    DETERMINISTIC,
    DIFFER,
    ESCAPE,
    GENERAL,
    UpdateSchedule,
    apply_schedule,
    apply_update,
    build_transition_graph,
    sensitivity_scan,
    to_dot,
)
from .errors import BanError, ParseError
from .funcparse import format_function, format_network, load_network, network_monotone
from .netcore import Configuration, code_to_bitstring, interaction_graph
from .xorcirculant import (
    CirculantSpec,
    circuit_decomposition,
    enumerate_circulants,
    space_time,
    verify_power_two_suite,
)

PROG = "xorban"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input helpers ------------------------------------------------------------


def _read_source(args) -> str:
    if getattr(args, "spec", None):
        return args.spec.replace(";", "\n")
    if getattr(args, "input", None):
        with open(args.input, encoding="utf-8") as fh:
            return fh.read()
    raise UsageError("an input file or --spec is required")


def _network(args):
    return load_network(_read_source(args))


def _circulant(args) -> CirculantSpec:
    text = _read_source(args)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if len(lines) != 1:
        raise ParseError("expected a single 'circulant n=<n> coeffs=<...>' line")
    return CirculantSpec.parse(lines[0])


def parse_seed(text: str, n: int) -> Configuration:
    """Bitstring with automaton 0 leftmost, or ``unit:<i>``."""
    if text.startswith("unit:"):
        try:
            i = int(text[5:])
        except ValueError:
            raise ParseError(f"bad unit seed {text!r}") from None
        return Configuration.unit(i, n)
    x = Configuration.from_string(text)
    if x.n != n:
        raise ParseError(f"seed {text!r} has length {x.n}, network size is {n}")
    return x


def _schedule(args, n) -> UpdateSchedule:
    return UpdateSchedule.parse(args.schedule, n)


# -- subcommands --------------------------------------------------------------


def cmd_show(args, out):
    N = _network(args)
    out.write(format_network(N))
    arcs = sorted(interaction_graph(N).arcs)
    out.write("interaction graph: " + " ".join(f"{j}->{i}" for j, i in arcs) + "\n")
    out.write(network_monotone(N).render() + "\n")


def cmd_step(args, out):
    N = _network(args)
    x = parse_seed(args.seed, N.n)
    if args.update is not None:
        try:
            W = {int(v) for v in args.update.split(",") if v.strip()}
        except ValueError:
            raise UsageError(f"malformed update set {args.update!r}") from None
        y = apply_update(N, x, W)
    else:
        y = apply_schedule(N, _schedule(args, N.n), x)
    out.write(f"{y}\n")


def cmd_orbit(args, out):
    N = _network(args)
    o = orbit(N, _schedule(args, N.n), parse_seed(args.seed, N.n))
    out.write(f"start: {o.start}\ntransient: {o.transient}\nperiod: {o.period}\n")
    out.write("cycle: " + " ".join(map(str, o.cycle)) + "\n")


def _graph(args):
    N = _network(args)
    schedule = _schedule(args, N.n) if args.mode == DETERMINISTIC else None
    return build_transition_graph(N, args.mode, schedule)


def cmd_graph(args, out):
    g = _graph(args)
    rec = {c for a in find_attractors(g) for c in a.members} if args.highlight else ()
    out.write(to_dot(g, rec))


def cmd_attractors(args, out):
    g = _graph(args)
    atts = find_attractors(g)
    mode = g.mode if g.schedule is None else f"{g.mode} {g.schedule}"
    out.write(attractor_report_json(atts, mode) if args.format == "json" else attractor_report_text(atts, mode))


def cmd_spacetime(args, out):
    spec = _circulant(args)
    diagram = space_time(spec, parse_seed(args.seed, spec.n), args.steps)
    out.write(diagram.to_pbm() if args.format == "pbm" else diagram.to_text())


def cmd_circulant(args, out):
    if args.action == "enum":
        if args.n is None or args.k is None:
            raise UsageError("circulant enum needs --n and --k")
        for spec in enumerate_circulants(args.n, args.k):
            out.write(f"{spec}\n")
    elif args.action == "step":
        spec = _circulant(args)
        if args.seed is None:
            raise UsageError("circulant step needs --seed")
        d = space_time(spec, parse_seed(args.seed, spec.n), args.steps)
        out.write(f"{d.configurations()[-1]}\n")
    elif args.action == "info":
        spec = _circulant(args)
        out.write(f"{spec}\nk={spec.k} canonical={spec.canonical}\n")
        for j, count, length in circuit_decomposition(spec):
            out.write(f"coefficient {j}: {count} circuit(s) of length {length}\n")
    else:  # verify
        report = verify_power_two_suite(args.p, args.s)
        out.write(report.render())
        return 0 if report.passed else 1
    return 0


def cmd_scan(args, out):
    found = sensitivity_scan(args.size, jobs=args.jobs, criterion=args.criterion)
    out.write(f"size: {args.size}\ncriterion: {args.criterion}\nsensitive networks: {len(found)}\n")
    for N, ev in found:
        verdict = network_monotone(N).verdict
        funcs = "; ".join(f"f{i} = {format_function(f)}" for i, f in enumerate(N.functions))
        out.write(f"- {funcs}\n")
        out.write(f"  verdict: {verdict}\n")
        W = "{" + ",".join(map(str, sorted(ev.W))) + "}"
        out.write(f"  non-sequentialisable: {code_to_bitstring(ev.x, N.n)} -{W}-> {code_to_bitstring(ev.image, N.n)}\n")
        out.write("  asynchronous recurrent: " + " ".join(code_to_bitstring(c, N.n) for c in sorted(ev.async_recurrent)) + "\n")
        out.write("  general recurrent: " + " ".join(code_to_bitstring(c, N.n) for c in sorted(ev.general_recurrent)) + "\n")
    return 0


def cmd_verify(args, out):
    results = verify.run_all(jobs=args.jobs)
    for r in results:
        out.write(r.line() + "\n")
    passed = sum(r.passed for r in results)
    out.write(json.dumps({"passed": passed, "failed": len(results) - passed, "total": len(results)},
                         sort_keys=True) + "\n")
    return 0 if passed == len(results) else 1


# -- parser -------------------------------------------------------------------


def _add_input(p):
    p.add_argument("input", nargs="?", help=".ban or circulant-spec file")
    p.add_argument("--spec", help="inline network text (';' separates lines) or circulant spec")


def _add_schedule(p):
    p.add_argument("--schedule", default="parallel",
                   help="block-sequential schedule: '{0}{1,2}', 'parallel' or 'sequential'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Boolean automata network analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("show", help="canonical form, interaction graph, monotonicity")
    _add_input(p)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("step", help="apply a schedule (or one update set) once")
    _add_input(p)
    _add_schedule(p)
    p.add_argument("--seed", required=True)
    p.add_argument("--update", help="single update set W, e.g. '0,1'")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("orbit", help="transient and period of a start configuration")
    _add_input(p)
    _add_schedule(p)
    p.add_argument("--seed", required=True)
    p.set_defaults(func=cmd_orbit)

    for name, func, text in (("graph", cmd_graph, "DOT export of a transition graph"),
                             ("attractors", cmd_attractors, "attractors of a transition graph")):
        p = sub.add_parser(name, help=text)
        _add_input(p)
        _add_schedule(p)
        p.add_argument("--mode", choices=[GENERAL, ASYNCHRONOUS, DETERMINISTIC], default=DETERMINISTIC)
        if name == "graph":
            p.add_argument("--highlight", action="store_true", help="fill recurrent configurations grey")
        else:
            p.add_argument("--format", choices=["text", "json"], default="text")
        p.set_defaults(func=func)

    p = sub.add_parser("spacetime", help="space-time diagram of a circulant network")
    _add_input(p)
    p.add_argument("--seed", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--format", choices=["text", "pbm"], default="text")
    p.set_defaults(func=cmd_spacetime)

    p = sub.add_parser("circulant", help="XOR circulant utilities")
    p.add_argument("action", choices=["enum", "step", "info", "verify"])
    _add_input(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--p", type=int, default=3, help="verify: size 2^p")
    p.add_argument("--s", type=int, default=0, help="verify: interaction-step")
    p.set_defaults(func=cmd_circulant)

    p = sub.add_parser("scan-sensitivity", help="brute-force search for synchronism-sensitive networks")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--criterion", choices=[ESCAPE, DIFFER], default=ESCAPE)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("target", choices=["all"])
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    buf = io.StringIO()
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        if getattr(args, "steps", 0) is not None and getattr(args, "steps", 0) < 0:
            raise UsageError("--steps must be >= 0")
        status = args.func(args, buf)
    except UsageError as exc:
        err.write(f"{PROG}: usage error: {exc}\n")
        return 2
    except (BanError, OSError) as exc:
        err.write(f"{PROG}: error: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}\n")
        return 1
    out.write(buf.getvalue())
    if status:
        err.write(f"{PROG}: error: verification failed\n")
    return status or 0


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))
