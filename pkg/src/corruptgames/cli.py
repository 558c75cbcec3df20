"""Command-line front end.

Subcommands: payoff (single profile evaluation), sweep (payoff vs corruption
rate), crossings (critical corruption rates), ne (equilibrium family search),
and reproduce (regenerate the reference tables and figure datasets together
with a machine-checkable assertions file).

Exit codes: 0 success, 2 flag/usage errors, 3 file or parse errors.
Floating-point output is fixed at 12 significant digits, so identical flags
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import analysis, games, protocol

SCHEMA_REPORT = "corruptgames.report/1"
SCHEMA_ASSERTIONS = "corruptgames.assertions/1"

REPRODUCE_TARGETS = ("table1", "table2", "table3", "fig4", "fig5", "fig6")


class UsageError(Exception):
    """Bad flag values; maps to exit code 2."""


class FileError(Exception):
    """I/O or parse failures; maps to exit code 3."""


# ---------------------------------------------------------------------------
# formatting and parsing helpers

def fmt(x) -> str:
    """Render a number with 12 significant digits."""
    return format(float(x), ".12g")


def jnum(x) -> float:
    return float(fmt(x))


def _clean(obj):
    """Recursively round floats and convert numpy types for JSON output."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return jnum(obj)
    return obj


_PI_PATTERN = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*|\.\d+))?$",
                         re.IGNORECASE)


def parse_angle(text: str, flag: str) -> float:
    """Parse a radian literal, with pi-fraction shorthand ("pi/2", "3pi/4")."""
    text = text.strip()
    match = _PI_PATTERN.match(text)
    if match:
        coeff_text = match.group(1)
        if coeff_text in ("", "+"):
            coeff = 1.0
        elif coeff_text == "-":
            coeff = -1.0
        else:
            coeff = float(coeff_text)
        value = coeff * math.pi
        if match.group(2):
            value /= float(match.group(2))
        return value
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{flag}: cannot parse angle {text!r}") from None


def parse_strategy(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"{flag}: expected 'theta,phi', got {text!r}")
    theta = parse_angle(parts[0], flag)
    phi = parse_angle(parts[1], flag)
    try:
        return protocol.validate_strategy((theta, phi))
    except protocol.OutOfRangeError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def parse_rate(value: float, flag: str) -> float:
    try:
        return protocol.validate_rate(value)
    except protocol.OutOfRangeError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def parse_mix(value: float, flag: str) -> float:
    try:
        return protocol.validate_mix(value, flag)
    except protocol.OutOfRangeError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def parse_base(text: str, flag: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2 or any(p.strip() not in ("0", "1") for p in parts):
        raise UsageError(f"{flag}: expected 'f,g' with bits 0 or 1, got {text!r}")
    return int(parts[0]), int(parts[1])


def parse_grid(text: str, flag: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        nt, np_ = int(parts[0]), int(parts[1])
    except (ValueError, IndexError):
        raise UsageError(f"{flag}: expected 'n_theta,n_phi', got {text!r}") from None
    if len(parts) != 2 or nt < 2 or np_ < 2:
        raise UsageError(f"{flag}: grid sizes must be integers >= 2, got {text!r}")
    return nt, np_


def resolve_game(spec: str) -> games.BimatrixGame:
    """A builtin id ("pd", "sd", "bos") or a path to a game-definition file."""
    if spec.lower() in games.BUILTIN_GAMES:
        return games.builtin_game(spec)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"--game: {spec!r} is neither a builtin id nor an existing file")
    try:
        return games.load_game(path)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise FileError(f"cannot load game file {spec!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# output rendering

def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (int, float, np.floating)) else str(v)
                         for v in row])
    return buf.getvalue()


def json_text(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2) + "\n"


def emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    try:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise FileError(f"cannot write {output!r}: {exc}") from exc


def strategy_text(strategy) -> str:
    return f"({fmt(strategy[0])}, {fmt(strategy[1])})"


def descriptor_payload(descriptor: analysis.FamilyDescriptor) -> dict:
    return {
        "kind": descriptor.kind,
        "fixed": dict(descriptor.fixed),
        "ranges": {name: list(rng) for name, rng in descriptor.ranges},
        "phi_sum": descriptor.phi_sum,
        "theta_locked": descriptor.theta_locked,
        "payoff_parametric": descriptor.payoff_parametric,
    }


def descriptor_text(descriptor: analysis.FamilyDescriptor) -> str:
    if descriptor.kind == "all_strategies":
        return "all strategies"
    parts = [f"{name}={fmt(value)}" for name, value in descriptor.fixed]
    if descriptor.theta_locked and any(name == "theta_a" for name, _ in descriptor.ranges):
        parts.append("theta_a=theta_b")
    for name, (lo, hi) in descriptor.ranges:
        parts.append(f"{name} in [{fmt(lo)}, {fmt(hi)}]")
    if descriptor.phi_sum is not None:
        parts.append(f"phi_a+phi_b={fmt(descriptor.phi_sum)}")
    return "; ".join(parts) if parts else "point"


def candidate_payload(candidate: analysis.EquilibriumCandidate) -> dict:
    return {
        "alice": list(candidate.alice),
        "bob": list(candidate.bob),
        "payoffs": list(candidate.payoffs),
        "max_gain": candidate.max_gain,
    }


def family_payload(family: analysis.EquilibriumFamily) -> dict:
    return {
        "descriptor": descriptor_payload(family.descriptor),
        "representative": candidate_payload(family.representative),
        "members": [candidate_payload(c) for c in family.members],
    }


# ---------------------------------------------------------------------------
# subcommands

def cmd_payoff(args) -> int:
    game = resolve_game(args.game)
    r = parse_rate(args.r, "--r")
    alice = parse_strategy(args.alice, "--alice")
    bob = parse_strategy(args.bob, "--bob")
    base = parse_base(args.base, "--base")
    pa, pb = protocol.quantum_payoffs(game, r, alice, bob, base)
    if args.format == "csv":
        text = csv_text(["payoff_a", "payoff_b"], [[pa, pb]])
    else:
        text = json_text({
            "schema": SCHEMA_REPORT,
            "command": "payoff",
            "game": game.name,
            "r": r,
            "alice": list(alice),
            "bob": list(bob),
            "base": list(base),
            "payoffs": {"alice": pa, "bob": pb},
        })
    emit(text, args.output)
    return 0


def _sweep_inputs(args, game):
    if args.alice or args.bob:
        if not (args.alice and args.bob):
            raise UsageError("--alice and --bob must be given together")
        quantum = (parse_strategy(args.alice, "--alice"), parse_strategy(args.bob, "--bob"))
    else:
        try:
            quantum = analysis.default_quantum_profile(game)
        except ValueError as exc:
            raise UsageError(f"--alice/--bob: {exc}") from None
    if args.alice_mix is not None or args.bob_mix is not None:
        if args.alice_mix is None or args.bob_mix is None:
            raise UsageError("--alice-mix and --bob-mix must be given together")
        classical = (parse_mix(args.alice_mix, "--alice-mix"),
                     parse_mix(args.bob_mix, "--bob-mix"))
    else:
        try:
            classical = analysis.classical_reference_profile(game)
        except ValueError as exc:
            raise UsageError(f"--alice-mix/--bob-mix: {exc}") from None
    return quantum, classical


def _r_grid(args) -> np.ndarray:
    start = parse_rate(args.r_start, "--r-start")
    stop = parse_rate(args.r_stop, "--r-stop")
    if args.r_step <= 0:
        raise UsageError(f"--r-step must be positive, got {args.r_step}")
    if stop < start:
        raise UsageError("--r-stop must not be below --r-start")
    count = int(round((stop - start) / args.r_step)) + 1
    grid = start + args.r_step * np.arange(count)
    return grid[grid <= stop + 1e-12]


def cmd_sweep(args) -> int:
    game = resolve_game(args.game)
    quantum, classical = _sweep_inputs(args, game)
    curve = analysis.scenario1_sweep(game, quantum, classical, _r_grid(args))
    rows = [[r, qa, qb, ca, cb] for r, qa, qb, ca, cb in zip(
        curve.r_grid, curve.quantum_a, curve.quantum_b,
        curve.classical_a, curve.classical_b)]
    if args.format == "csv":
        text = csv_text(["r", "qA", "qB", "cA", "cB"], rows)
    else:
        text = json_text({
            "schema": SCHEMA_REPORT,
            "command": "sweep",
            "game": game.name,
            "quantum_profile": {"alice": list(quantum[0]), "bob": list(quantum[1])},
            "classical_profile": {"alice_p0": classical[0], "bob_p0": classical[1]},
            "columns": ["r", "qA", "qB", "cA", "cB"],
            "rows": rows,
        })
    emit(text, args.output)
    return 0


def _series_functions(game, quantum, classical, player: int):
    def quantum_series(r):
        return protocol.quantum_payoffs(game, r, quantum[0], quantum[1])[player]

    def classical_series(r):
        return protocol.classical_payoffs(game, r, classical[0], classical[1])[player]

    return quantum_series, classical_series


def cmd_crossings(args) -> int:
    game = resolve_game(args.game)
    quantum, classical = _sweep_inputs(args, game)
    if args.scan_points < 3:
        raise UsageError("--scan-points must be at least 3")
    players = {"alice": (0,), "bob": (1,), "both": (0, 1)}[args.player]
    records = []
    for player in players:
        f, g = _series_functions(game, quantum, classical, player)
        for crossing in analysis.find_crossings(f, g, scan_points=args.scan_points):
            records.append(("alice" if player == 0 else "bob", crossing))
    if args.format == "csv":
        rows = [[name, c.r_star, c.value_a, c.value_b, str(c.tangent).lower()]
                for name, c in records]
        text = csv_text(["player", "r_star", "value_a", "value_b", "tangent"], rows)
    else:
        text = json_text({
            "schema": SCHEMA_REPORT,
            "command": "crossings",
            "game": game.name,
            "crossings": [{
                "player": name,
                "r_star": c.r_star,
                "value_a": c.value_a,
                "value_b": c.value_b,
                "tangent": c.tangent,
            } for name, c in records],
        })
    emit(text, args.output)
    return 0


def cmd_ne(args) -> int:
    game = resolve_game(args.game)
    r = parse_rate(args.r, "--r")
    if args.epsilon <= 0:
        raise UsageError(f"--epsilon must be positive, got {args.epsilon}")
    coarse = parse_grid(args.grid, "--grid")
    fine = parse_grid(args.fine_grid, "--fine-grid")
    if min(coarse) < 8:
        raise UsageError("--grid must have at least 8 steps per axis")
    families = analysis.ne_search(game, r, coarse_grid=coarse, epsilon=args.epsilon,
                                  fine_grid=fine)
    if args.format == "csv":
        rows = []
        for index, family in enumerate(families):
            rep = family.representative
            rows.append([
                index,
                family.descriptor.kind,
                str(family.descriptor.payoff_parametric).lower(),
                rep.alice[0], rep.alice[1], rep.bob[0], rep.bob[1],
                rep.payoffs[0], rep.payoffs[1], rep.max_gain,
                descriptor_text(family.descriptor),
            ])
        text = csv_text(
            ["family", "kind", "payoff_parametric", "theta_a", "phi_a", "theta_b",
             "phi_b", "payoff_a", "payoff_b", "max_gain", "constraints"], rows)
    else:
        text = json_text({
            "schema": SCHEMA_REPORT,
            "command": "ne",
            "game": game.name,
            "r": r,
            "epsilon": args.epsilon,
            "coarse_grid": list(coarse),
            "fine_grid": list(fine),
            "families": [family_payload(f) for f in families],
        })
    emit(text, args.output)
    return 0


# ---------------------------------------------------------------------------
# reproduce: reference tables and figure datasets

def _assertion(ident, actual, expected, tol=0.0):
    if isinstance(expected, str):
        passed = str(actual) == expected
    else:
        passed = abs(float(actual) - float(expected)) <= tol
        actual = jnum(actual)
        expected = jnum(expected)
        tol = float(tol)
    return {"id": ident, "actual": actual, "expected": expected,
            "tol": tol, "passed": bool(passed)}


_TABLE_GAME = {"table1": "pd", "table2": "sd", "table3": "bos"}

# Expected reference rows: r -> (payoffs, kind, representative or None)
_PI = math.pi
_TABLE_ROWS = {
    "table1": [
        (0.00, (3.0, 3.0), "point", (0.0, _PI / 2, 0.0, _PI / 2)),
        (0.25, (43 / 16, 43 / 16), "point", (0.0, _PI / 2, 0.0, _PI / 2)),
        (0.50, (9 / 4, 9 / 4), "all_strategies", None),
        (0.75, (43 / 16, 43 / 16), "point", (0.0, _PI / 4, 0.0, _PI / 4)),
        (1.00, (3.0, 3.0), "point", (0.0, _PI / 4, 0.0, _PI / 4)),
    ],
    "table2": [
        (0.00, (3.0, 2.0), "point", (0.0, _PI / 2, 0.0, _PI / 2)),
        (0.25, (21 / 16, 15 / 8), "point", (0.0, _PI / 2, 0.0, _PI / 2)),
        (0.50, (1 / 4, 3 / 2), "all_strategies", None),
        (0.75, (21 / 16, 15 / 8), "phi_sum", None),
        (1.00, (3.0, 2.0), "phi_sum", None),
    ],
    "table3": [
        (0.00, (1.0, 2.0), "phi_sum", None),
        (0.25, (15 / 16, 21 / 16), "phi_sum", None),
        (0.50, (3 / 4, 3 / 4), "all_strategies", None),
        (0.75, (19 / 16, 11 / 16), "point", (_PI, 0.0, _PI, 0.0)),
        (1.00, (2.0, 1.0), "point", (_PI, 0.0, _PI, 0.0)),
    ],
}


def _reproduce_table(target: str):
    game = games.builtin_game(_TABLE_GAME[target])
    report = analysis.scenario2_table(game)
    header = ["r", "family", "kind", "payoff_parametric", "theta_a", "phi_a",
              "theta_b", "phi_b", "payoff_a", "payoff_b", "max_gain", "constraints"]
    rows = []
    for entry in report:
        for index, family in enumerate(entry.families):
            rep = family.representative
            rows.append([entry.r, index, family.descriptor.kind,
                         str(family.descriptor.payoff_parametric).lower(),
                         rep.alice[0], rep.alice[1], rep.bob[0], rep.bob[1],
                         rep.payoffs[0], rep.payoffs[1], rep.max_gain,
                         descriptor_text(family.descriptor)])

    checks = []
    for entry, (r, payoffs, kind, rep_coords) in zip(report, _TABLE_ROWS[target]):
        tag = f"{target}.r={fmt(r)}"
        checks.append(_assertion(f"{tag}.family_count", len(entry.families), 1, 0))
        if not entry.families:
            continue
        family = entry.families[0]
        rep = family.representative
        checks.append(_assertion(f"{tag}.kind", family.descriptor.kind, kind))
        for label, got, want in (("payoff_a", rep.payoffs[0], payoffs[0]),
                                 ("payoff_b", rep.payoffs[1], payoffs[1])):
            checks.append(_assertion(f"{tag}.{label}", got, want, 1e-9))
        checks.append(_assertion(f"{tag}.max_gain", rep.max_gain, 0.0, 1e-6))
        if rep_coords is not None:
            for name, got, want in zip(("theta_a", "phi_a", "theta_b", "phi_b"),
                                       rep.coords(), rep_coords):
                checks.append(_assertion(f"{tag}.{name}", got, want, 1e-4))

    if target == "table2":
        for entry in report:
            if entry.r in (0.75, 1.0) and entry.families:
                descriptor = entry.families[0].descriptor
                tag = f"table2.r={fmt(entry.r)}"
                if descriptor.phi_sum is not None:
                    checks.append(_assertion(f"{tag}.phi_sum", descriptor.phi_sum,
                                             _PI / 2, 1e-4))
                hi = dict(descriptor.ranges).get("phi_a", (0.0, 0.0))[1]
                expected_hi = _PI / 4 if entry.r == 1.0 else _PI / 2
                checks.append(_assertion(f"{tag}.phi_a_max", hi, expected_hi, 0.06))
    if target == "table3":
        iso = protocol.quantum_payoffs(game, 0.25, protocol.ISIGMA_Y_MOVE,
                                       protocol.ISIGMA_Y_MOVE)
        checks.append(_assertion("table3.r=0.25.isigma_y_payoff_a", iso[0], 11 / 16, 1e-9))
        checks.append(_assertion("table3.r=0.25.isigma_y_payoff_b", iso[1], 19 / 16, 1e-9))
        for entry in report:
            if entry.r == 0.25 and entry.families:
                checks.append(_assertion(
                    "table3.r=0.25.payoff_parametric",
                    str(entry.families[0].descriptor.payoff_parametric).lower(), "true"))

    files = {f"{target}.csv": csv_text(header, rows)}
    return files, checks


def _reproduce_figure(target: str):
    game_id = {"fig4": "pd", "fig5": "sd", "fig6": "bos"}[target]
    game = games.builtin_game(game_id)
    quantum = analysis.default_quantum_profile(game)
    classical = analysis.classical_reference_profile(game)
    curve = analysis.scenario1_sweep(game, quantum, classical)
    header = ["r", "qA", "qB", "cA", "cB"]
    rows = [[r, qa, qb, ca, cb] for r, qa, qb, ca, cb in zip(
        curve.r_grid, curve.quantum_a, curve.quantum_b,
        curve.classical_a, curve.classical_b)]
    files = {f"{target}.csv": csv_text(header, rows)}

    checks = []
    summary: dict = {"schema": SCHEMA_REPORT, "target": target, "game": game.name}
    qa_fn, ca_fn = _series_functions(game, quantum, classical, 0)
    qb_fn, cb_fn = _series_functions(game, quantum, classical, 1)

    cross_a = analysis.find_crossings(qa_fn, ca_fn)
    cross_b = analysis.find_crossings(qb_fn, cb_fn)
    summary["critical_r_alice"] = [c.r_star for c in cross_a]
    summary["critical_r_bob"] = [c.r_star for c in cross_b]

    if target == "fig4":
        checks.append(_assertion("fig4.crossing_count", len(cross_a), 1, 0))
        if cross_a:
            checks.append(_assertion("fig4.r_star", cross_a[0].r_star, 0.5, 1e-8))
            checks.append(_assertion("fig4.crossing_value", cross_a[0].value_a, 2.25, 1e-8))
        summary["classical_ideal_payoff"] = ca_fn(0.0)
        checks.append(_assertion("fig4.classical_ideal", ca_fn(0.0), 1.0, 1e-12))
        checks.append(_assertion("fig4.quantum_r0", qa_fn(0.0), 3.0, 1e-9))
        checks.append(_assertion("fig4.quantum_r1", qa_fn(1.0), 1.0, 1e-9))
        checks.append(_assertion("fig4.classical_r1", ca_fn(1.0), 3.0, 1e-9))
    elif target == "fig5":
        equal = analysis.find_crossings(qa_fn, qb_fn)
        summary["equal_payoff_r"] = [c.r_star for c in equal]
        checks.append(_assertion("fig5.equal_payoff_r", equal[0].r_star if equal else -1,
                                 1 / 7, 1e-6))
        if equal:
            checks.append(_assertion("fig5.equal_payoff_value", equal[0].value_a,
                                     96 / 49, 1e-9))
        checks.append(_assertion("fig5.r_star_alice",
                                 cross_a[0].r_star if cross_a else -1, 0.5, 1e-6))
        checks.append(_assertion("fig5.r_star_bob",
                                 cross_b[0].r_star if cross_b else -1, 0.5, 1e-6))
        r_min, v_min = analysis.minimize_series(qa_fn)
        summary["quantum_a_minimum"] = {"r": r_min, "value": v_min}
        checks.append(_assertion("fig5.min_r", r_min, 0.8, 1e-6))
        checks.append(_assertion("fig5.min_value", v_min, -0.2, 1e-6))
        line_residual = float(np.abs(curve.classical_a - (-0.2 + 0.9 * curve.r_grid)).max())
        const_residual = float(np.abs(curve.classical_b - 1.5).max())
        summary["classical_line"] = {"intercept": -0.2, "slope": 0.9,
                                     "max_residual": line_residual}
        checks.append(_assertion("fig5.classical_a_line_residual", line_residual, 0.0, 1e-9))
        checks.append(_assertion("fig5.classical_b_constant", const_residual, 0.0, 1e-12))
    else:
        checks.append(_assertion("fig6.crossing_count_alice", len(cross_a), 2, 0))
        checks.append(_assertion("fig6.crossing_count_bob", len(cross_b), 2, 0))
        if len(cross_a) == 2:
            checks.append(_assertion("fig6.r_alice_1", cross_a[0].r_star, 0.2, 1e-6))
            checks.append(_assertion("fig6.r_alice_2", cross_a[1].r_star, 0.5, 1e-6))
        if len(cross_b) == 2:
            checks.append(_assertion("fig6.r_bob_1", cross_b[0].r_star, 0.5, 1e-6))
            checks.append(_assertion("fig6.r_bob_2", cross_b[1].r_star, 0.8, 1e-6))
        checks.append(_assertion("fig6.equal_point_value", qa_fn(0.5), 0.75, 1e-9))
        checks.append(_assertion("fig6.classical_ideal", ca_fn(0.0), 2 / 3, 1e-12))
        rf = protocol.RISK_FREE_MOVE
        rf_vals = np.array([protocol.quantum_payoffs(game, r, rf, rf)
                            for r in curve.r_grid])
        summary["risk_free_payoffs"] = [rf_vals[0, 0], rf_vals[0, 1]]
        checks.append(_assertion("fig6.risk_free_a", rf_vals[:, 0].max(), 0.75, 1e-12))
        checks.append(_assertion("fig6.risk_free_b", rf_vals[:, 1].min(), 0.75, 1e-12))

    files[f"{target}_summary.json"] = json_text(summary)
    return files, checks


def cmd_reproduce(args) -> int:
    target = args.target
    if target.startswith("table"):
        files, checks = _reproduce_table(target)
    else:
        files, checks = _reproduce_figure(target)
    files[f"{target}_assertions.json"] = json_text({
        "schema": SCHEMA_ASSERTIONS,
        "target": target,
        "assertions": checks,
        "all_passed": all(c["passed"] for c in checks),
    })
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(files.items()):
            with open(outdir / name, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        raise FileError(f"cannot write into {outdir}: {exc}") from exc
    for name in sorted(files):
        sys.stdout.write(f"wrote {outdir / name}\n")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corruptgames",
        description="Quantum games with a corrupt source: payoffs, sweeps, "
                    "critical rates, and Nash equilibrium reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--game", required=True,
                       help="builtin id (pd, sd, bos) or path to a game JSON file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="output file (default: stdout)")

    p = sub.add_parser("payoff", help="payoffs of one quantum strategy profile")
    common(p)
    p.add_argument("--r", type=float, required=True, help="corruption rate in [0, 1]")
    p.add_argument("--alice", required=True, help="Alice's strategy 'theta,phi'")
    p.add_argument("--bob", required=True, help="Bob's strategy 'theta,phi'")
    p.add_argument("--base", default="0,0", help="intended source bits 'f,g'")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("sweep", help="payoff-vs-corruption curves")
    common(p)
    p.add_argument("--alice", default=None, help="quantum strategy override")
    p.add_argument("--bob", default=None, help="quantum strategy override")
    p.add_argument("--alice-mix", type=float, default=None,
                   help="classical sigma_0 weight override for Alice")
    p.add_argument("--bob-mix", type=float, default=None,
                   help="classical sigma_0 weight override for Bob")
    p.add_argument("--r-start", type=float, default=0.0)
    p.add_argument("--r-stop", type=float, default=1.0)
    p.add_argument("--r-step", type=float, default=0.01)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("crossings", help="critical corruption rates")
    common(p)
    p.add_argument("--player", choices=("alice", "bob", "both"), default="both")
    p.add_argument("--scan-points", type=int, default=1001)
    p.add_argument("--alice", default=None, help="quantum strategy override")
    p.add_argument("--bob", default=None, help="quantum strategy override")
    p.add_argument("--alice-mix", type=float, default=None)
    p.add_argument("--bob-mix", type=float, default=None)
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("ne", help="Nash equilibrium family search at a known rate")
    common(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--grid", default="65,33", help="coarse grid 'n_theta,n_phi'")
    p.add_argument("--fine-grid", default="257,129", help="certification grid")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.set_defaults(func=cmd_ne)

    p = sub.add_parser("reproduce", help="regenerate a reference table or figure dataset")
    p.add_argument("target", choices=REPRODUCE_TARGETS)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (protocol.OutOfRangeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FileError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
