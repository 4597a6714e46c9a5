"""Command-line interface for cone-surface volume computations.

Subcommands:

    volume      exact volume polynomial (or numeric value) for one signature
    table       all stable signatures within caps, with their polynomials
    cusp-limit  a volume polynomial with one cone angle sent to zero
    verify      numerical certification suites (mcshane, kernel, identity,
                recursion)

Exit codes: 0 on success, 1 when an internal invariant or a verification
fails, 2 on invalid input (the message names the violated constraint).

Caps and tolerances come from defaults, an optional key=value config file
(--config), the WPCONE_MAX_GENUS environment variable, and command-line
flags, in increasing order of precedence.

Heavy numeric dependencies load lazily, so polynomial-only invocations
stay fast.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from typing import Dict, Optional

_CONFIG_KEYS = {
    "max_genus": int,
    "max_slots": int,
    "max_moment_k": int,
    "quad_tol": float,
}

_ANGLE_FORM = re.compile(r"(\d+(?:\.\d+)?)?\*?pi(?:/(\d+(?:\.\d+)?))?")


def _parse_angle(text: str, degrees: bool = False) -> float:
    """Angle in radians from a decimal or a pi-literal like 'pi' or 'pi/2'."""
    s = text.strip().lower().replace(" ", "")
    if "pi" in s:
        match = _ANGLE_FORM.fullmatch(s)
        if match is None:
            raise ValueError(
                "cannot parse angle %r; use a number or a form like "
                "'pi', 'pi/2', '3pi/4'" % text
            )
        num = float(match.group(1)) if match.group(1) else 1.0
        den = float(match.group(2)) if match.group(2) else 1.0
        return num * math.pi / den
    try:
        value = float(s)
    except ValueError:
        raise ValueError(
            "cannot parse angle %r; use a number or a form like 'pi', "
            "'pi/2', '3pi/4'" % text
        ) from None
    return math.radians(value) if degrees else value


def _read_config(path: str) -> Dict[str, object]:
    values: Dict[str, object] = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ValueError("cannot read config file %s: %s" % (path, exc))
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(
                "%s:%d: expected key=value, got %r" % (path, lineno, line)
            )
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(
                "%s:%d: unknown config key %r (known: %s)"
                % (path, lineno, key, ", ".join(sorted(_CONFIG_KEYS)))
            )
        try:
            values[key] = _CONFIG_KEYS[key](text.strip())
        except ValueError:
            raise ValueError(
                "%s:%d: cannot parse %r as %s"
                % (path, lineno, text.strip(), _CONFIG_KEYS[key].__name__)
            ) from None
    return values


def _settings(args: argparse.Namespace) -> Dict[str, object]:
    """Effective caps: defaults, then config file, then env, then flags."""
    from wpcone.kernels import DEFAULT_MAX_MOMENT_K
    from wpcone.recursion import DEFAULT_MAX_GENUS, DEFAULT_MAX_SLOTS

    values: Dict[str, object] = {
        "max_genus": DEFAULT_MAX_GENUS,
        "max_slots": DEFAULT_MAX_SLOTS,
        "max_moment_k": DEFAULT_MAX_MOMENT_K,
        "quad_tol": 1e-10,
    }
    config_path = getattr(args, "config", None)
    if config_path:
        values.update(_read_config(config_path))
    env_genus = os.environ.get("WPCONE_MAX_GENUS")
    if env_genus is not None:
        try:
            values["max_genus"] = int(env_genus)
        except ValueError:
            raise ValueError(
                "WPCONE_MAX_GENUS=%r is not an integer" % env_genus
            ) from None
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _poly_text(poly, kinds, fmt: str) -> str:
    from wpcone.polyalg import to_json, to_latex, to_text

    if fmt == "latex":
        return to_latex(poly, kinds=kinds)
    if fmt == "text":
        return to_text(poly, kinds=kinds)
    return to_json(poly)


def _signature(args: argparse.Namespace):
    from wpcone.recursion import SurfaceSignature

    return SurfaceSignature(args.g, args.boundaries, args.cones)


def _cmd_volume(args: argparse.Namespace) -> int:
    from wpcone.conepoints import ConeSurfaceSpec, volume_value
    from wpcone.recursion import compute_volume

    settings = _settings(args)
    sig = _signature(args)
    have_lengths = args.lengths is not None
    have_angles = args.angles is not None
    caps = dict(
        threads=args.threads,
        max_moment_k=settings["max_moment_k"],
        max_genus=settings["max_genus"],
        max_slots=settings["max_slots"],
    )
    if not have_lengths and not have_angles:
        poly = compute_volume(sig, **caps)
        kinds = ("length",) * sig.boundaries + ("angle",) * sig.cones
        print(_poly_text(poly, kinds, args.format))
        return 0
    if (sig.boundaries > 0) != have_lengths or (sig.cones > 0) != have_angles:
        raise ValueError(
            "numeric evaluation needs --lengths for every boundary and "
            "--angles for every cone point (or neither, for the polynomial)"
        )
    angles = tuple(
        _parse_angle(a, degrees=args.degrees) for a in (args.angles or ())
    )
    spec = ConeSurfaceSpec(
        sig, angles, tuple(args.lengths) if have_lengths else None
    )
    value = volume_value(spec, **caps)
    if args.format == "json":
        print(json.dumps({"value": value}, separators=(",", ":")))
    else:
        print(repr(value))
    return 0


def _stable_signatures(g_max: int, slot_max: int):
    for g in range(g_max + 1):
        for total in range(slot_max + 1):
            if 2 * g - 2 + total <= 0:
                continue
            for n in range(total + 1):
                yield g, total - n, n


def _cmd_table(args: argparse.Namespace) -> int:
    from wpcone.polyalg import to_json, to_latex, to_text
    from wpcone.recursion import SurfaceSignature, compute_volume

    settings = _settings(args)
    if args.g_max > settings["max_genus"]:
        raise ValueError(
            "--g-max %d exceeds max_genus=%d; raise the max_genus "
            "configuration knob" % (args.g_max, settings["max_genus"])
        )
    if args.slot_max > settings["max_slots"]:
        raise ValueError(
            "--slot-max %d exceeds max_slots=%d; raise the max_slots "
            "configuration knob" % (args.slot_max, settings["max_slots"])
        )
    rows = []
    for g, m, n in _stable_signatures(args.g_max, args.slot_max):
        sig = SurfaceSignature(g, m, n)
        poly = compute_volume(
            sig,
            threads=args.threads,
            max_moment_k=settings["max_moment_k"],
            max_genus=settings["max_genus"],
            max_slots=settings["max_slots"],
        )
        rows.append((g, m, n, poly))
    if args.format == "json":
        doc = {
            "volumes": [
                {
                    "genus": g,
                    "boundaries": m,
                    "cones": n,
                    "polynomial": json.loads(to_json(poly)),
                }
                for g, m, n, poly in rows
            ]
        }
        print(json.dumps(doc, separators=(",", ":")))
        return 0
    lines = []
    for g, m, n, poly in rows:
        kinds = ("length",) * m + ("angle",) * n
        if args.format == "latex":
            lines.append(
                "V_{%d,%d,%d} = %s" % (g, m, n, to_latex(poly, kinds=kinds))
            )
        elif args.format == "csv":
            lines.append("%d,%d,%d,%s" % (g, m, n, to_text(poly, kinds=kinds)))
        else:
            lines.append(
                "V(g=%d,m=%d,n=%d) = %s" % (g, m, n, to_text(poly, kinds=kinds))
            )
    if args.format == "csv":
        lines.insert(0, "g,m,n,polynomial")
    print("\n".join(lines))
    return 0


def _cmd_cusp_limit(args: argparse.Namespace) -> int:
    from wpcone.conepoints import cusp_limit

    settings = _settings(args)
    sig = _signature(args)
    poly = cusp_limit(
        sig,
        args.slot,
        threads=args.threads,
        max_moment_k=settings["max_moment_k"],
        max_genus=settings["max_genus"],
        max_slots=settings["max_slots"],
    )
    kinds = ("length",) * sig.boundaries + ("angle",) * (sig.cones - 1)
    print(_poly_text(poly, kinds, args.format))
    return 0


def _cmd_verify_mcshane(args: argparse.Namespace) -> int:
    from wpcone.kernels import cone, cusp, geodesic
    from wpcone.mcshane import kappa_for, mcshane_sum, root_triple

    chosen = [
        name
        for name, flag in (
            ("--theta", args.theta is not None),
            ("--length", args.length is not None),
            ("--cusp", args.cusp),
        )
        if flag
    ]
    if len(chosen) != 1:
        raise ValueError(
            "choose exactly one of --theta, --length, --cusp (got %s)"
            % (", ".join(chosen) or "none")
        )
    if args.cusp:
        label = cusp()
    elif args.theta is not None:
        label = cone(_parse_angle(args.theta, degrees=args.degrees))
    else:
        label = geodesic(args.length)
    root = root_triple(kappa_for(label), symmetric_start=not args.asymmetric)
    report = mcshane_sum(
        root, label, length_cutoff=args.cutoff, threads=args.threads
    )
    ok = report.final_residual < args.tol
    if args.format == "json":
        print(report.to_json())
    elif args.format == "csv":
        print(report.to_csv())
    else:
        print(report.to_text())
        print(
            "result: %s (final residual %.3e, tolerance %.1e)"
            % ("pass" if ok else "FAIL", report.final_residual, args.tol)
        )
    return 0 if ok else 1


def _cmd_verify_kernel(args: argparse.Namespace) -> int:
    import random

    from wpcone.kernels import (
        integrate_decaying,
        moment_integral,
        pairing_kernel,
    )
    from wpcone.polyalg import eval_numeric

    settings = _settings(args)
    tol = args.tol
    quad_tol = min(float(settings["quad_tol"]), tol / 10.0)
    failures = 0
    for theta in (0.1, 0.5, 1.0, 2.0, math.pi):
        got = integrate_decaying(
            lambda x: x * pairing_kernel(2.0 * x, complex(0.0, theta)).real,
            tol=quad_tol,
        )
        want = math.pi ** 2 / 6.0 - theta ** 2 / 8.0
        err = abs(got - want)
        ok = err <= tol
        failures += 0 if ok else 1
        print(
            "pair moment theta=%-8.5f err=%.3e %s"
            % (theta, err, "ok" if ok else "FAIL")
        )
    rng = random.Random(args.seed)
    for k in range(args.max_k + 1):
        poly = moment_integral(k)
        worst = 0.0
        for _ in range(args.samples):
            t = rng.uniform(0.05, 6.0)
            exact = eval_numeric(poly, [t])
            quad = integrate_decaying(
                lambda x: x ** (2 * k + 1) * pairing_kernel(x, t).real,
                tol=quad_tol,
            )
            worst = max(worst, abs(quad - exact) / max(1.0, abs(exact)))
        ok = worst <= tol
        failures += 0 if ok else 1
        print(
            "moment k=%d: %d samples, worst err=%.3e %s"
            % (k, args.samples, worst, "ok" if ok else "FAIL")
        )
    print("kernel verification: %s" % ("pass" if failures == 0 else "FAIL"))
    return 0 if failures == 0 else 1


def _cmd_verify_identity(args: argparse.Namespace) -> int:
    from wpcone.mcshane import integrate_volume_identity
    from wpcone.polyalg import eval_numeric
    from wpcone.recursion import SurfaceSignature, compute_volume

    poly = compute_volume(SurfaceSignature(1, 0, 1))
    worst = 0.0
    for k in range(1, args.grid + 1):
        theta = k * math.pi / args.grid
        got = integrate_volume_identity(theta, tail_cutoff=args.cutoff)
        want = eval_numeric(poly, [theta])
        worst = max(worst, abs(got - want))
    ok = worst <= args.tol
    print(
        "volume identity on %d angles: worst err=%.3e %s"
        % (args.grid, worst, "pass" if ok else "FAIL")
    )
    return 0 if ok else 1


def _cmd_verify_recursion(args: argparse.Namespace) -> int:
    import random

    from wpcone.polyalg import eval_numeric
    from wpcone.recursion import (
        SurfaceSignature,
        compute_volume,
        cone_volume_direct,
        numeric_volume_value,
    )

    settings = _settings(args)
    g_max = min(args.g_max, int(settings["max_genus"]))
    slot_max = min(args.slot_max, int(settings["max_slots"]))
    failures = 0
    checked = 0
    for g, m, n in _stable_signatures(g_max, slot_max):
        if n == 0:
            continue
        direct = cone_volume_direct(g, m, n, threads=args.threads)
        substituted = compute_volume(SurfaceSignature(g, m, n))
        ok = direct == substituted
        failures += 0 if ok else 1
        checked += 1
        print(
            "cone recursion (%d,%d,%d): %s" % (g, m, n, "ok" if ok else "FAIL")
        )
    rng = random.Random(args.seed)
    for g, m, n in [(0, 4, 0), (1, 2, 0), (1, 1, 1), (2, 1, 0)]:
        if g > g_max or m + n > slot_max:
            continue
        poly = compute_volume(SurfaceSignature(g, m, n))
        worst = 0.0
        for _ in range(args.samples):
            lengths = [rng.uniform(0.3, 4.0) for _ in range(m)]
            angles = [rng.uniform(0.1, math.pi) for _ in range(n)]
            sym = eval_numeric(poly, lengths + angles)
            num = numeric_volume_value(g, m, n, lengths, angles)
            worst = max(worst, abs(sym - num) / max(1.0, abs(sym)))
        ok = worst <= args.tol
        failures += 0 if ok else 1
        print(
            "numeric oracle (%d,%d,%d): %d samples, worst rel err=%.3e %s"
            % (g, m, n, args.samples, worst, "ok" if ok else "FAIL")
        )
    print(
        "recursion verification (%d cone signatures): %s"
        % (checked, "pass" if failures == 0 else "FAIL")
    )
    return 0 if failures == 0 else 1


def _add_caps(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value file for caps/tolerances")
    parser.add_argument("--max-genus", type=int, help="genus cap override")
    parser.add_argument("--max-slots", type=int, help="slot-count cap override")
    parser.add_argument(
        "--max-moment-k", type=int, help="moment-index cap override"
    )
    parser.add_argument(
        "--quad-tol", type=float, help="quadrature tolerance override"
    )
    parser.add_argument(
        "--threads", type=int, default=1, help="worker threads (default 1)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpcone",
        description=(
            "Volumes of moduli spaces of hyperbolic surfaces with geodesic "
            "boundaries and cone points, as exact polynomials in boundary "
            "lengths and cone angles."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    vol = sub.add_parser(
        "volume", help="volume polynomial or value for one signature"
    )
    vol.add_argument("--g", type=int, required=True, help="genus")
    vol.add_argument(
        "--boundaries", type=int, default=0, help="geodesic boundary count"
    )
    vol.add_argument("--cones", type=int, default=0, help="cone point count")
    vol.add_argument(
        "--lengths", type=float, nargs="+", help="numeric boundary lengths"
    )
    vol.add_argument(
        "--angles",
        nargs="+",
        help="numeric cone angles (radians; 'pi', 'pi/2' literals allowed)",
    )
    vol.add_argument(
        "--degrees",
        action="store_true",
        help="interpret plain numeric angles as degrees",
    )
    vol.add_argument(
        "--format",
        choices=("latex", "text", "json"),
        default="latex",
        help="output format (default latex)",
    )
    _add_caps(vol)
    vol.set_defaults(func=_cmd_volume)

    table = sub.add_parser(
        "table",
        help="volumes of all stable signatures within the given bounds",
        epilog=(
            "Signatures with more boundary-plus-cone slots than --slot-max "
            "are omitted; with --slot-max 1 that excludes the three-slot "
            "genus-zero base cases, leaving only the one-slot tori."
        ),
    )
    table.add_argument("--g-max", type=int, default=1, help="largest genus")
    table.add_argument(
        "--slot-max", type=int, default=3, help="largest boundary+cone count"
    )
    table.add_argument(
        "--format",
        choices=("latex", "text", "json", "csv"),
        default="text",
        help="output format (default text)",
    )
    _add_caps(table)
    table.set_defaults(func=_cmd_table)

    cusp_cmd = sub.add_parser(
        "cusp-limit", help="volume polynomial with one cone angle sent to 0"
    )
    cusp_cmd.add_argument("--g", type=int, required=True, help="genus")
    cusp_cmd.add_argument(
        "--boundaries", type=int, default=0, help="geodesic boundary count"
    )
    cusp_cmd.add_argument(
        "--cones", type=int, default=1, help="cone point count"
    )
    cusp_cmd.add_argument(
        "--slot", type=int, default=0, help="cone index to degenerate"
    )
    cusp_cmd.add_argument(
        "--format", choices=("latex", "text", "json"), default="latex"
    )
    _add_caps(cusp_cmd)
    cusp_cmd.set_defaults(func=_cmd_cusp_limit)

    verify = sub.add_parser("verify", help="numerical certification suites")
    vsub = verify.add_subparsers(dest="target", required=True)

    vm = vsub.add_parser(
        "mcshane", help="identity sums over simple closed geodesics"
    )
    vm.add_argument("--theta", help="cone angle ('pi' literals allowed)")
    vm.add_argument("--length", type=float, help="boundary length")
    vm.add_argument("--cusp", action="store_true", help="cusped torus")
    vm.add_argument(
        "--degrees", action="store_true", help="plain numbers are degrees"
    )
    vm.add_argument("--cutoff", type=float, default=40.0)
    vm.add_argument("--tol", type=float, default=1e-6)
    vm.add_argument(
        "--asymmetric",
        action="store_true",
        help="start from an asymmetric marking",
    )
    vm.add_argument(
        "--format", choices=("text", "json", "csv"), default="text"
    )
    _add_caps(vm)
    vm.set_defaults(func=_cmd_verify_mcshane)

    vk = vsub.add_parser(
        "kernel", help="moment integrals against adaptive quadrature"
    )
    vk.add_argument("--max-k", type=int, default=6)
    vk.add_argument("--samples", type=int, default=20)
    vk.add_argument("--tol", type=float, default=1e-9)
    vk.add_argument("--seed", type=int, default=20260817)
    _add_caps(vk)
    vk.set_defaults(func=_cmd_verify_kernel)

    vi = vsub.add_parser(
        "identity", help="torus volume from the gap-kernel moment"
    )
    vi.add_argument("--grid", type=int, default=20)
    vi.add_argument("--tol", type=float, default=1e-8)
    vi.add_argument("--cutoff", type=float, default=40.0)
    _add_caps(vi)
    vi.set_defaults(func=_cmd_verify_identity)

    vr = vsub.add_parser(
        "recursion", help="cone recursion vs substitution and quadrature"
    )
    vr.add_argument("--g-max", type=int, default=2)
    vr.add_argument("--slot-max", type=int, default=4)
    vr.add_argument("--samples", type=int, default=5)
    vr.add_argument("--tol", type=float, default=1e-8)
    vr.add_argument("--seed", type=int, default=20260817)
    _add_caps(vr)
    vr.set_defaults(func=_cmd_verify_recursion)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print("internal error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
