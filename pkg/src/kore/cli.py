"""Command-line front end.

Every analysis exits 0, whatever its verdict; the verdict lives in the
output. Exit status 1 means the input or the invocation was bad.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Sequence

from . import jsonio
from .charges import FiniteCharge
from .core import (
    Balanced,
    UnboundedViolation,
    Unbalanced,
    Variant,
    check_balanced,
    check_core_membership,
    find_core_element,
    verify_emptiness,
    verify_verdict,
    WrongFieldError,
)
from .infinite import (
    NonSigmaAdditiveChargeError,
    TruncationCapError,
    pl2_net,
    sigma_core_probe,
    truncation_study,
    verify_certificate_net,
    verify_probe,
)
from .jsonio import InputError, fmt
from .setalgebra import coalition_label, field_hull

VARIANTS = {"schmeidler": Variant.SCHMEIDLER, "grand-free": Variant.GRAND_FREE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load(path: str, what: str = "input"):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{what}: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: malformed JSON in {path}: {exc}") from None


def _table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [list(map(str, headers))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _weights_rows(ws):
    return [(coalition_label(s), fmt(w)) for s, w in ws]


def _fincof_game(args):
    if args.game:
        return jsonio.fincof_game_from_json(_load(args.game, "game"))
    if args.family is None:
        raise UsageError("give --family or --game")
    desc = {"family": args.family, "K": args.K, "grand": args.grand}
    return jsonio.fincof_game_from_json(desc)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition("..")
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
    except ValueError:
        raise UsageError(f"--m: expected a range like 2..8, got {text!r}") from None
    return lo_i, hi_i


def cmd_hull(args, out):
    system = jsonio.system_from_json(_load(args.input))
    fld = field_hull(system)
    atoms = [list(a.members) for a in fld.atoms]
    if args.json:
        return {"command": "hull", "players": system.universe.n, "atoms": atoms,
                "cardinality": fld.cardinality}
    print(f"players: {system.universe.n}", file=out)
    print(_table(["atom", "players"], [(i + 1, atoms[i]) for i in range(len(atoms))]), file=out)
    print(f"field size: {fld.cardinality}", file=out)


def _verdict_text(verdict, grand, out):
    if isinstance(verdict, Balanced):
        print(f"balanced: LP value {fmt(verdict.value)} <= v(N) = {fmt(grand)}", file=out)
    elif isinstance(verdict, Unbalanced):
        print(f"unbalanced: weights reach {fmt(verdict.value)} > v(N) = {fmt(grand)}", file=out)
        print(_table(["coalition", "weight"], _weights_rows(verdict.certificate)), file=out)
    else:
        print("unbounded violation: the worth grows without bound along the ray", file=out)
        print(_table(["coalition", "weight"], _weights_rows(verdict.ray)), file=out)


def cmd_balanced(args, out):
    game = jsonio.game_from_json(_load(args.input, "game"))
    variant = VARIANTS[args.variant]
    if args.verify:
        verdict = jsonio.verdict_from_json(_load(args.verify, "payload"), game.universe)
        return _verified(args, out, verify_verdict(game, verdict, variant))
    verdict = check_balanced(game, variant)
    if args.json:
        return dict({"command": "balanced", "variant": args.variant, "grand": fmt(game.grand)},
                    **jsonio.verdict_to_json(verdict))
    _verdict_text(verdict, game.grand, out)


def _verified(args, out, ok: bool):
    if args.json:
        return {"command": "verify", "verified": ok}
    print("certificate verified" if ok else "certificate REJECTED", file=out)


def cmd_core(args, out):
    game = jsonio.game_from_json(_load(args.input, "game"))
    if args.verify:
        claim = jsonio.core_result_from_json(_load(args.verify, "payload"), game)
        if isinstance(claim, FiniteCharge):
            ok = check_core_membership(game, claim).member
        else:
            ok = verify_emptiness(game, claim)
        return _verified(args, out, ok)
    result = find_core_element(game)
    if args.json:
        return dict({"command": "core"}, **jsonio.core_result_to_json(result))
    if isinstance(result, FiniteCharge):
        print("core is non-empty; element on the hull atoms:", file=out)
        rows = [(coalition_label(a), fmt(v)) for a, v in zip(result.field.atoms, result.atom_values)]
        print(_table(["atom", "mass"], rows), file=out)
    else:
        print(f"core is empty: balanced weights reach {fmt(result.value)} > v(N) = "
              f"{fmt(game.grand)}", file=out)
        print(_table(["coalition", "weight"], _weights_rows(result.weights)), file=out)


def cmd_member(args, out):
    game = jsonio.game_from_json(_load(args.input, "game"))
    charge = jsonio.finite_charge_from_json(_load(args.charge, "charge"), game.n, game.hull())
    try:
        report = check_core_membership(game, charge)
    except WrongFieldError as exc:
        raise InputError(f"charge.atoms: {exc}") from None
    if args.json:
        return dict({"command": "member"}, **jsonio.membership_to_json(report))
    print("in the core" if report.member else "not in the core", file=out)
    if report.violations:
        rows = [(coalition_label(v.coalition), v.kind, fmt(v.required), fmt(v.actual),
                 fmt(v.shortfall)) for v in report.violations]
        print(_table(["coalition", "kind", "v(S)", "mu(S)", "shortfall"], rows), file=out)


def _verdict_short(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, Balanced):
        return "balanced"
    if isinstance(v, Unbalanced):
        return "unbalanced"
    return "unbounded"


def cmd_study(args, out):
    game = _fincof_game(args)
    lo, hi = _parse_range(args.m)
    variant = None if args.variant == "both" else VARIANTS[args.variant]
    try:
        study = truncation_study(game, lo, hi, variant, mode=args.mode, workers=args.workers)
    except TruncationCapError as exc:
        raise InputError(f"--m: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"--m: {exc}") from None
    if args.json:
        reports = []
        for r in study.reports:
            entry = {"m": r.m, "verified": r.verified}
            if r.schmeidler is not None:
                entry["schmeidler"] = jsonio.verdict_to_json(r.schmeidler)
            if r.grandfree is not None:
                entry["grand-free"] = jsonio.verdict_to_json(r.grandfree)
            reports.append(entry)
        summary = {"grand": fmt(study.grand),
                   "schmeidler_values": [fmt(v) for v in study.schmeidler_values],
                   "strictly_decreasing": study.strictly_decreasing,
                   "final_gap": None if study.final_gap is None else fmt(study.final_gap),
                   "all_grandfree_violated": study.all_grandfree_violated}
        return {"command": "truncate-study", "game": jsonio.fincof_game_to_json(game),
                "mode": args.mode, "variant": args.variant, "reports": reports,
                "summary": summary}
    rows = [(r.m, "-" if r.schmeidler_value is None else fmt(r.schmeidler_value),
             _verdict_short(r.schmeidler), _verdict_short(r.grandfree),
             "yes" if r.verified else "NO") for r in study.reports]
    print(_table(["m", "schmeidler value", "schmeidler", "grand-free", "verified"], rows),
          file=out)
    print(f"v(N) = {fmt(study.grand)}", file=out)
    if study.strictly_decreasing is not None:
        print(f"schmeidler values strictly decreasing: {study.strictly_decreasing}; "
              f"last gap to v(N): {fmt(study.final_gap)}", file=out)


def cmd_net(args, out):
    game = _fincof_game(args)
    charges = None
    if args.charges:
        raw = _load(args.charges, "charges")
        if not isinstance(raw, list):
            raise InputError("charges: expected a list of charges")
        charges = [jsonio.fincof_charge_from_json(c, f"charges[{i}]") for i, c in enumerate(raw)]
    try:
        report = verify_certificate_net(game, pl2_net(), charges, horizon=args.horizon)
    except NonSigmaAdditiveChargeError as exc:
        raise InputError(f"charges: {exc}") from None
    verdict = "violation witnessed" if report.violation_witnessed else "not witnessed"
    per_charge = []
    for k, mu in enumerate(report.charges):
        devs = [r.deviation for r in report.rows if r.charge_index == k]
        per_charge.append((mu, devs, report.settled[k]))
    if args.json:
        return {"command": "net-verify", "net": "pl2", "horizon": report.horizon,
                "grand": fmt(report.grand), "worths": [fmt(w) for w in report.worths],
                "limit_worth": fmt(report.limit_worth), "verdict": verdict,
                "charges": [dict(jsonio.fincof_charge_to_json(mu), settled=ok,
                                 deviations=[fmt(d) for d in devs])
                            for mu, devs, ok in per_charge]}
    rows = [(k, repr(mu), fmt(devs[-1]), "yes" if ok else "no")
            for k, (mu, devs, ok) in enumerate(per_charge)]
    print(_table(["#", "test charge", "final deviation", "settled"], rows), file=out)
    print(f"worth c(lam^i) = {fmt(report.limit_worth)} vs v(N) = {fmt(report.grand)}: {verdict}",
          file=out)


def cmd_probe(args, out):
    game = _fincof_game(args)
    if args.s < 1 or args.k < 1:
        raise UsageError("--s and --k must be >= 1")
    if args.verify:
        claim = jsonio.probe_from_json(_load(args.verify, "payload"))
        return _verified(args, out, verify_probe(game, claim))
    result = sigma_core_probe(game, args.s, args.k)
    if args.json:
        return dict({"command": "sigma-probe"}, **jsonio.probe_to_json(result))
    if hasattr(result, "charge"):
        print(f"feasible within s={args.s}, k={args.k}: {result.charge!r}", file=out)
    else:
        print(f"infeasible within s={args.s}, k={args.k}; certificate worth "
              f"{fmt(result.worth)} > 0", file=out)
        print(_table(["coalition", "weight"], _weights_rows(result.certificate)), file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kore", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log simplex pivots")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, verify=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if verify:
            p.add_argument("--verify", metavar="PAYLOAD",
                           help="re-check a previously emitted --json payload instead")

    p = sub.add_parser("hull", help="atoms of the field generated by the coalitions")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("balanced", help="balancedness with certificate")
    p.add_argument("input")
    p.add_argument("--variant", choices=sorted(VARIANTS), default="schmeidler")
    common(p, verify=True)
    p.set_defaults(func=cmd_balanced)

    p = sub.add_parser("core", help="a core element or a proof of emptiness")
    p.add_argument("input")
    common(p, verify=True)
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("member", help="check a charge against the core constraints")
    p.add_argument("input")
    p.add_argument("charge")
    common(p)
    p.set_defaults(func=cmd_member)

    def family(p):
        p.add_argument("--family", choices=["co-singleton"], default=None)
        p.add_argument("--K", type=int, default=1)
        p.add_argument("--grand", default="1")
        p.add_argument("--game", metavar="FILE", help="countable game JSON instead of --family")

    p = sub.add_parser("truncate-study", help="balancedness of the restrictions to 1..m")
    family(p)
    p.add_argument("--m", default="2..8", help="range like 2..8")
    p.add_argument("--variant", choices=sorted(VARIANTS) + ["both"], default="both")
    p.add_argument("--mode", choices=["full", "sparse"], default="full")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("net-verify", help="check the co-singleton certificate net")
    family(p)
    p.add_argument("--horizon", type=int, default=50)
    p.add_argument("--charges", metavar="FILE", help="JSON list of test charges")
    common(p)
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("sigma-probe", help="window-bounded search for a sigma-additive core element")
    family(p)
    p.add_argument("--s", type=int, default=5, help="support window 1..s")
    p.add_argument("--k", type=int, default=1, help="largest descriptor size constrained")
    common(p, verify=True)
    p.set_defaults(func=cmd_probe)
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    logger = logging.getLogger("kore")
    handler = None
    if args.verbose:
        handler = logging.StreamHandler(err)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.setLevel(logging.DEBUG)
    try:
        payload = args.func(args, out)
    except (InputError, UsageError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    finally:
        if handler is not None:
            logger.removeHandler(handler)
            logger.setLevel(logging.NOTSET)
    if payload is not None:
        print(json.dumps(payload, indent=2, ensure_ascii=False), file=out)
    return 0


def main() -> None:
    sys.exit(run())
