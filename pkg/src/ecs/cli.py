"""``ecs`` command line.

Results go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 a check failed, 2 unreadable input or a script error, 3 an execution
error, 4 a location the adversary cannot serve.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import dsl
from .adversary import (
    UNIVERSAL_NOTE,
    ForbiddenPoint,
    ForbiddenUnitDistance,
    adversary_run,
    hilbert_x_provider,
    origin_x_provider,
    random_program,
    unit_x_provider,
)
from .closure import PointSet, audit_provenance, e_closure, h_closure
from .constructions import ALIASES, BUILTINS, arc_histogram, builtin, y_set_point
from .errors import (
    ConstructionError,
    DegenerateDenominator,
    GeometryError,
    LocationUnreachable,
    MapError,
    NotExpressible,
    ParseError,
    SizeLimit,
    UnsupportedLocation,
)
from .geometry import Circle, Point, Tolerance, get_tolerance, set_tolerance
from .maps import UNDEFINED, parse_map
from .model import GENERAL, STRAIGHTEDGE, Sampler, check_constructs, execute, type_audit
from .tracejson import encode, fmt_float, trace_to_dict

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EXEC, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


class _Usage(Exception):
    pass


def _err(msg: str) -> None:
    print(f"ecs: {msg}", file=sys.stderr)


def _apply_tolerance(args) -> None:
    eps = getattr(args, "eps", None)
    if eps is None and os.environ.get("ECS_TOLERANCE"):
        try:
            eps = float(os.environ["ECS_TOLERANCE"])
        except ValueError:
            raise _Usage(f"ECS_TOLERANCE must be a number, got {os.environ['ECS_TOLERANCE']!r}")
    if eps is not None:
        set_tolerance(Tolerance(eps_abs=eps, eps_rel=get_tolerance().eps_rel))


def _load_program(args):
    if args.builtin and args.script:
        raise _Usage("give a script or --builtin, not both")
    if args.builtin:
        try:
            return builtin(args.builtin)
        except KeyError as e:
            raise _Usage(e.args[0])
    if not args.script:
        raise _Usage("a script path or --builtin NAME is required")
    try:
        return dsl.parse_file(args.script)
    except OSError as e:
        raise _Usage(f"cannot read {args.script}: {e.strerror}")


def _emit(doc: dict, fmt: str, text_lines: Sequence[str]) -> None:
    if fmt == "json":
        sys.stdout.write(encode(doc, indent=2) + "\n")
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# run


def cmd_run(args) -> int:
    program = _load_program(args)
    if args.samples < 1:
        raise _Usage("--samples must be positive")
    samples, lines = [], []
    passed, exec_error = 0, False
    for i in range(args.samples):
        entry: dict = {"index": i}
        try:
            trace = execute(program, Sampler([args.seed, i]))
        except (ConstructionError, GeometryError) as e:
            exec_error = True
            entry.update(passed=False, error=f"{type(e).__name__}: {e}")
            lines.append(f"sample {i}: error {type(e).__name__}: {e}")
            samples.append(entry)
            continue
        ok = True if program.target is None else check_constructs(trace, program.target)
        ok = ok and type_audit(trace).ok
        passed += ok
        entry.update(passed=ok, trace=trace_to_dict(trace))
        lines.append(f"sample {i}: {'pass' if ok else 'FAIL'} ({len(trace.word)} letters)")
        samples.append(entry)
    summary = f"passed {passed}/{args.samples}"
    doc = {
        "command": "run",
        "program": program.name or (args.script or ""),
        "seed": args.seed,
        "target": None if program.target is None else repr(program.target),
        "samples": samples,
        "summary": summary,
    }
    _emit(doc, args.format, lines + [summary])
    if exec_error:
        return EXIT_EXEC
    return EXIT_OK if passed == args.samples else EXIT_FAIL


# ---------------------------------------------------------------------------
# adversary


def _provider(kind: str, program, depth: Optional[int], seed: int):
    if kind == "center":
        k = next((x for x in program.root if isinstance(x, Circle)), None)
        if k is None:
            raise _Usage("--forbidden center needs a circle among the given letters")
        return hilbert_x_provider(k, depth=2 if depth is None else depth, seed=seed), ForbiddenPoint(k.center, label="center")
    if kind == "unit":
        return unit_x_provider(depth=1 if depth is None else depth, seed=seed), ForbiddenUnitDistance()
    return origin_x_provider(depth=1 if depth is None else depth, seed=seed), ForbiddenPoint(Point(0.0, 0.0), label="origin")


def _random_root(kind: str) -> tuple:
    return (Circle(Point(0.0, 0.0), 1.0),) if kind == "center" else ()


def cmd_adversary(args) -> int:
    if args.random:
        programs = [
            random_program(
                args.seed * 100_003 + i,
                STRAIGHTEDGE if args.forbidden == "center" else GENERAL,
                root=_random_root(args.forbidden),
                max_letters=args.max_letters,
            )
            for i in range(args.random)
        ]
    else:
        programs = [_load_program(args)]
    runs, lines, avoided = [], [], 0
    for i, program in enumerate(programs):
        provider, forbidden = _provider(args.forbidden, program, args.depth, args.seed + i)
        try:
            rep = adversary_run(program, forbidden, provider)
        except UnsupportedLocation as e:
            _err(f"{e}; the provider draws from a dense set in open discs and cannot honour this location")
            return EXIT_UNSUPPORTED
        except (ConstructionError, GeometryError, LocationUnreachable) as e:
            _err(f"execution failed: {type(e).__name__}: {e}")
            return EXIT_EXEC
        avoided += rep.avoided
        stats = {k: v for k, v in sorted(rep.provider_stats.items())}
        runs.append(
            {
                "index": i,
                "avoided": rep.avoided,
                "witness": None if rep.witness is None else repr(rep.witness),
                "letters": len(rep.trace.word),
                "provider_stats": stats,
            }
        )
        lines.append(f"run {i}: {rep.summary()} letters={len(rep.trace.word)} provider={rep.provider} {stats}")
    lines.append(f"provider: {provider.description}")
    lines.append(f"note: {UNIVERSAL_NOTE}")
    summary = f"avoided {avoided}/{len(programs)}"
    lines.append(summary)
    all_ok = avoided == len(programs)
    doc = {
        "command": "adversary",
        "forbidden": args.forbidden,
        "seed": args.seed,
        "avoided": all_ok,
        "runs": runs,
        "provider": provider.description,
        "note": UNIVERSAL_NOTE,
        "summary": summary,
    }
    _emit(doc, args.format, [f"avoided={'true' if all_ok else 'false'}"] + lines)
    return EXIT_OK if all_ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# gen-y


def _alpha(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise _Usage(f"not a rational number: {text!r}")


def cmd_gen_y(args) -> int:
    alphas: list[Fraction] = [_alpha(a) for a in args.alpha or []]
    if args.alpha_list:
        try:
            with open(args.alpha_list, encoding="utf-8") as fh:
                alphas += [_alpha(x) for x in fh.read().split("#")[0].split() if x]
        except OSError as e:
            raise _Usage(f"cannot read {args.alpha_list}: {e.strerror}")
    if args.range:
        lo, hi, step = (_alpha(x) for x in args.range)
        if step <= 0:
            raise _Usage("--range step must be positive")
        a = lo
        while a <= hi:
            alphas.append(a)
            a += step
    if not alphas:
        raise _Usage("give --alpha, --alpha-list or --range")
    out = []
    for a in alphas:
        try:
            p = y_set_point(a, method=args.method)
        except DegenerateDenominator as e:
            _err(f"alpha {a}: {e}")
            continue
        out.append(f"{a} {fmt_float(p.x)} {fmt_float(p.y)}")
    if args.histogram:
        edges, counts = arc_histogram(alphas, bucket=args.histogram)
        out += [f"# arc [{fmt_float(lo)}, {fmt_float(hi)}) {c}" for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    print("\n".join(out))
    return EXIT_OK


# ---------------------------------------------------------------------------
# closure


def _circle_arg(text: str) -> Circle:
    try:
        cx, cy, r = (float(v) for v in text.split(","))
        return Circle(Point(cx, cy), r)
    except (ValueError, GeometryError):
        raise _Usage(f"--circle expects cx,cy,r with r > 0, got {text!r}")


def cmd_closure(args) -> int:
    try:
        with open(args.seed, encoding="utf-8") if args.seed != "-" else sys.stdin as fh:
            seed = PointSet.from_text(fh.read())
    except OSError as e:
        raise _Usage(f"cannot read {args.seed}: {e.strerror}")
    except ValueError as e:
        raise _Usage(str(e))
    if args.depth == 0:
        sys.stdout.write(seed.to_text())
        return EXIT_OK
    try:
        if args.kind == "e":
            ps = e_closure(seed, args.depth, cap=args.cap)
        else:
            if not args.circle:
                raise _Usage("--kind h needs --circle cx,cy,r")
            ps = h_closure(seed, _circle_arg(args.circle), args.depth, cap=args.cap)
    except SizeLimit as e:
        _err(str(e))
        return EXIT_EXEC
    except ValueError as e:
        raise _Usage(str(e))
    sys.stdout.write(ps.to_text())
    if args.audit:
        bad = audit_provenance(ps)
        _err(f"provenance audit: {len(ps) - len(bad)}/{len(ps)} sound")
        return EXIT_OK if not bad else EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# proj-check, fmt, map


def cmd_proj_check(args) -> int:
    from .projective import run_battery

    rows = run_battery(seed=args.seed, n=args.samples)
    width = max(len(name) for name, _, _ in rows)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    good = sum(ok for _, ok, _ in rows)
    print(f"passed {good}/{len(rows)}")
    return EXIT_OK if good == len(rows) else EXIT_FAIL


def cmd_fmt(args) -> int:
    status = EXIT_OK
    for path in args.scripts:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise _Usage(f"cannot read {path}: {e.strerror}")
        try:
            out = dsl.format(dsl.parse(text))
        except ParseError as e:
            _err(f"{path}:{e}")
            return EXIT_USAGE
        except NotExpressible as e:
            _err(f"{path}: {e}")
            return EXIT_EXEC
        if args.check:
            if out != text:
                _err(f"{path} would be reformatted")
                status = EXIT_FAIL
        elif args.in_place:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    return status


def cmd_map(args) -> int:
    try:
        m = parse_map(args.map)
    except (ValueError, MapError, GeometryError) as e:
        raise _Usage(str(e))
    q = m.apply_point(Point(args.x, args.y))
    if q is UNDEFINED:
        print("undefined")
        return EXIT_EXEC
    print(f"{fmt_float(q.x)} {fmt_float(q.y)}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    names = sorted(set(BUILTINS) | set(ALIASES))
    ap = argparse.ArgumentParser(prog="ecs", description="Euclidean constructions with arbitrary points.")
    ap.add_argument("--eps", type=float, help="absolute tolerance (overrides ECS_TOLERANCE)")
    sub = ap.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("script", nargs="?", help=".ecs script")
        p.add_argument("--builtin", choices=names, help="built-in construction instead of a script")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("run", help="execute a construction and check its target")
    source(p)
    p.add_argument("--samples", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("adversary", help="execute with adversarially chosen points")
    source(p)
    p.add_argument("--forbidden", choices=("center", "origin", "unit"), required=True)
    p.add_argument("--depth", type=int, help="closure depth of the provider")
    p.add_argument("--random", type=int, default=0, metavar="N", help="run N random scripts instead")
    p.add_argument("--max-letters", type=int, default=30)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("gen-y", help="points of the set Y")
    p.add_argument("--alpha", action="append", help="rational parameter (repeatable)")
    p.add_argument("--alpha-list", help="file of rational parameters")
    p.add_argument("--range", nargs=3, metavar=("LO", "HI", "STEP"))
    p.add_argument("--method", choices=("direct", "composed"), default="direct")
    p.add_argument("--histogram", type=float, metavar="BUCKET", help="append an arc histogram")
    p.set_defaults(func=cmd_gen_y)

    p = sub.add_parser("closure", help="E- or H-closure of a point file")
    p.add_argument("--kind", choices=("e", "h"), default="e")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--seed", required=True, help="file of 'x y' lines, or - for stdin")
    p.add_argument("--circle", help="fixed circle cx,cy,r for --kind h")
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--audit", action="store_true", help="check provenance, report on stderr")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("proj-check", help="projective invariant battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_proj_check)

    p = sub.add_parser("fmt", help="format .ecs scripts")
    p.add_argument("scripts", nargs="+")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--check", action="store_true")
    g.add_argument("-i", "--in-place", action="store_true")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("map", help="apply a named plane map to a point")
    p.add_argument("map", help="e.g. strommer:1.5 or rotate:0,0,1")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.set_defaults(func=cmd_map)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:  # argparse already printed the message
        return int(e.code or 0)
    saved = get_tolerance()
    try:
        _apply_tolerance(args)
        return args.func(args)
    except ParseError as e:
        src = getattr(args, "script", None)
        _err(f"{src}:{e}" if src else str(e))
        return EXIT_USAGE
    except _Usage as e:
        _err(str(e))
        return EXIT_USAGE
    finally:
        set_tolerance(saved)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
