"""JSON encodings of coalitions, games, charges, weights and verdicts.

Rationals are written as strings (``"3/2"``, ``"1"``) and read from strings
or integers; JSON floats are refused so no value ever passes through binary
floating point. Coalitions are ``{"members": [...]}`` (1-based players) or,
over the countable universe, ``{"cofinite": [excluded...]}``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .charges import FinCofCharge, FiniteCharge
from .core import (
    Balanced,
    EmptinessCertificate,
    FiniteGame,
    MembershipReport,
    UnboundedViolation,
    Unbalanced,
    WeightSystem,
)
from .infinite import (
    AdditiveGame,
    CoSingletonGame,
    FinCofGame,
    InfeasibleWithin,
    SigmaFeasible,
    TableGame,
)
from .setalgebra import (
    COUNTABLE,
    CoFin,
    Coalition,
    CoalitionSystem,
    FieldOfSets,
    Fin,
    PlayerUniverse,
)


class InputError(ValueError):
    """Malformed input; the message names the offending field."""


def rational(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"{where}: expected an integer or a 'p/q' string, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            if "." in x or "e" in x.lower():
                raise ValueError
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise InputError(f"{where}: expected an integer or a 'p/q' string, got {x!r}")


def fmt(q: Fraction) -> str:
    return str(Fraction(q))


def _need(obj: Any, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if key not in obj:
        raise InputError(f"{where}.{key}: missing")
    return obj[key]


def _player_list(raw: Any, where: str, n: int | None) -> list[int]:
    if not isinstance(raw, list):
        raise InputError(f"{where}: expected a list of players")
    out = []
    for p in raw:
        if isinstance(p, bool) or not isinstance(p, int) or p < 1:
            raise InputError(f"{where}: players are positive integers, got {p!r}")
        if n is not None and p > n:
            raise InputError(f"{where}: unknown player {p} (players are 1..{n})")
        out.append(p)
    return out


def universe_from_json(obj: Any, where: str = "players") -> PlayerUniverse:
    if obj == "countable":
        return COUNTABLE
    if isinstance(obj, bool) or not isinstance(obj, int) or obj < 1:
        raise InputError(f"{where}: expected a positive player count or \"countable\", got {obj!r}")
    return PlayerUniverse(obj)


def universe_to_json(u: PlayerUniverse):
    return {"players": u.n if u.is_finite else "countable"}


def coalition_from_json(obj: Any, universe: PlayerUniverse, where: str):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object with 'members' or 'cofinite'")
    if "members" in obj and "cofinite" in obj:
        raise InputError(f"{where}: give either 'members' or 'cofinite', not both")
    if "cofinite" in obj:
        if universe.is_finite:
            raise InputError(f"{where}.cofinite: only meaningful for a countable universe")
        return CoFin(_player_list(obj["cofinite"], f"{where}.cofinite", None))
    players = _player_list(_need(obj, "members", where), f"{where}.members", universe.n)
    if universe.is_finite:
        return Coalition.of(universe.n, players)
    return Fin(players)


def coalition_to_json(s) -> dict:
    if isinstance(s, CoFin):
        return {"cofinite": list(s.excluded)}
    return {"members": list(s.members)}


def _coalition_list(obj: Any, with_values: bool):
    n_raw = _need(obj, "players", "game")
    universe = universe_from_json(n_raw)
    if not universe.is_finite:
        raise InputError("players: finite games need a positive player count")
    n = universe.n
    raw = _need(obj, "coalitions", "game")
    if not isinstance(raw, list):
        raise InputError("coalitions: expected a list")
    table: dict[Coalition, Fraction] = {}
    for i, entry in enumerate(raw):
        where = f"coalitions[{i}]"
        s = coalition_from_json(entry, universe, where)
        if s in table:
            raise InputError(f"{where}.members: duplicate coalition {list(s.members)}")
        value = Fraction(0)
        if with_values:
            value = rational(_need(entry, "value", where), f"{where}.value")
        elif "value" in entry:
            value = rational(entry["value"], f"{where}.value")
        if s.is_empty and value != 0:
            raise InputError(f"{where}.value: v(∅) must be 0, got {fmt(value)}")
        table[s] = value
    if Coalition.grand(n) not in table:
        raise InputError(f"coalitions: the grand coalition N = 1..{n} must be listed")
    table.setdefault(Coalition.empty(n), Fraction(0))
    return n, table


def game_from_json(obj: Any) -> FiniteGame:
    n, table = _coalition_list(obj, with_values=True)
    return FiniteGame.from_values(n, table)


def system_from_json(obj: Any) -> CoalitionSystem:
    n, table = _coalition_list(obj, with_values=False)
    return CoalitionSystem(PlayerUniverse(n), tuple(table))


def game_to_json(game: FiniteGame) -> dict:
    return {"players": game.n,
            "coalitions": [dict(coalition_to_json(s), value=fmt(v))
                           for s, v in game.items() if not s.is_empty]}


def _int(obj: Any, where: str, low: int = 0) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int) or obj < low:
        raise InputError(f"{where}: expected an integer >= {low}, got {obj!r}")
    return obj


def fincof_game_from_json(obj: Any) -> FinCofGame:
    family = _need(obj, "family", "game")
    if family == "co-singleton":
        return CoSingletonGame(_int(obj.get("K", 1), "K"),
                               rational(obj.get("grand", 1), "grand"))
    if family == "additive":
        raw = _need(obj, "weights", "game")
        if not isinstance(raw, dict):
            raise InputError("weights: expected an object mapping players to rationals")
        weights = {}
        for key, val in raw.items():
            if not key.isdigit() or int(key) < 1:
                raise InputError(f"weights.{key}: keys are positive player indices")
            weights[int(key)] = rational(val, f"weights.{key}")
        return AdditiveGame.of(weights)
    if family == "table":
        entries = []
        for i, e in enumerate(obj.get("entries", [])):
            where = f"entries[{i}]"
            cof = _need(e, "cofinite", where)
            if not isinstance(cof, bool):
                raise InputError(f"{where}.cofinite: expected true or false")
            entries.append(((cof, _int(_need(e, "size", where), f"{where}.size")),
                            rational(_need(e, "value", where), f"{where}.value")))
        exceptions = []
        for i, e in enumerate(obj.get("exceptions", [])):
            where = f"exceptions[{i}]"
            exceptions.append((coalition_from_json(e, COUNTABLE, where),
                               rational(_need(e, "value", where), f"{where}.value")))
        return TableGame(tuple(entries), tuple(exceptions), rational(obj.get("grand", 1), "grand"))
    raise InputError(f"family: unknown game family {family!r} "
                     f"(expected co-singleton, additive or table)")


def fincof_game_to_json(game: FinCofGame) -> dict:
    if isinstance(game, CoSingletonGame):
        return {"family": "co-singleton", "K": game.K, "grand": fmt(game.grand)}
    if isinstance(game, AdditiveGame):
        return {"family": "additive", "weights": {str(n): fmt(a) for n, a in game.weights}}
    if isinstance(game, TableGame):
        return {"family": "table", "grand": fmt(game.grand),
                "entries": [{"cofinite": c, "size": k, "value": fmt(v)}
                            for (c, k), v in game.entries],
                "exceptions": [dict(coalition_to_json(s), value=fmt(v))
                               for s, v in game.exceptions]}
    return {"family": type(game).__name__}


def fincof_charge_from_json(obj: Any, where: str = "charge") -> FinCofCharge:
    raw = _need(obj, "atoms", where)
    if not isinstance(raw, dict):
        raise InputError(f"{where}.atoms: expected an object mapping players to rationals")
    atoms = {}
    for key, val in raw.items():
        if not key.isdigit() or int(key) < 1:
            raise InputError(f"{where}.atoms.{key}: keys are positive player indices")
        atoms[int(key)] = rational(val, f"{where}.atoms.{key}")
    return FinCofCharge.of(atoms, rational(obj.get("tail", 0), f"{where}.tail"))


def fincof_charge_to_json(mu: FinCofCharge) -> dict:
    return {"atoms": {str(n): fmt(a) for n, a in mu.atoms}, "tail": fmt(mu.tail)}


def finite_charge_from_json(obj: Any, n: int, fld: FieldOfSets, where: str = "charge"
                            ) -> FiniteCharge:
    """Atom list form ``[{"members": [...], "value": ...}]`` or per-player form ``{"1": ...}``.

    Per-player masses define a charge on all subsets of the players.
    """
    raw = _need(obj, "atoms", where)
    universe = PlayerUniverse(n)
    if isinstance(raw, dict):
        values = {}
        for key, val in raw.items():
            if not key.isdigit() or not 1 <= int(key) <= n:
                raise InputError(f"{where}.atoms.{key}: unknown player (players are 1..{n})")
            values[int(key)] = rational(val, f"{where}.atoms.{key}")
        discrete = FieldOfSets(universe, tuple(Coalition.of(n, [p]) for p in range(1, n + 1)))
        return FiniteCharge.from_players(discrete, values)
    if not isinstance(raw, list):
        raise InputError(f"{where}.atoms: expected a list of atoms or a player map")
    blocks, values = [], []
    for i, entry in enumerate(raw):
        w = f"{where}.atoms[{i}]"
        blocks.append(coalition_from_json(entry, universe, w))
        values.append(rational(_need(entry, "value", w), f"{w}.value"))
    try:
        own = FieldOfSets(universe, tuple(blocks))
    except ValueError as exc:
        raise InputError(f"{where}.atoms: {exc}") from None
    order = {b: v for b, v in zip(blocks, values)}
    return FiniteCharge(own, tuple(order[a] for a in own.atoms))


def finite_charge_to_json(mu: FiniteCharge) -> dict:
    return {"atoms": [dict(coalition_to_json(a), value=fmt(v))
                      for a, v in zip(mu.field.atoms, mu.atom_values)]}


def weights_to_json(ws: WeightSystem) -> dict:
    return {"weights": [dict(coalition_to_json(s), weight=fmt(w)) for s, w in ws]}


def weights_from_json(obj: Any, universe: PlayerUniverse, where: str) -> WeightSystem:
    raw = _need(obj, "weights", where)
    if not isinstance(raw, list):
        raise InputError(f"{where}.weights: expected a list")
    pairs = []
    for i, e in enumerate(raw):
        w = f"{where}.weights[{i}]"
        pairs.append((coalition_from_json(e, universe, w),
                      rational(_need(e, "weight", w), f"{w}.weight")))
    return WeightSystem(pairs, universe=universe)


def verdict_to_json(verdict) -> dict:
    if isinstance(verdict, Balanced):
        return {"verdict": "balanced", "value": fmt(verdict.value),
                "dual": {str(i + 1): fmt(y) for i, y in enumerate(verdict.dual)}}
    if isinstance(verdict, Unbalanced):
        return {"verdict": "unbalanced", "value": fmt(verdict.value),
                "certificate": weights_to_json(verdict.certificate)}
    if isinstance(verdict, UnboundedViolation):
        return {"verdict": "unbounded-violation",
                "base": weights_to_json(verdict.base), "ray": weights_to_json(verdict.ray)}
    raise TypeError(verdict)


def verdict_from_json(obj: Any, universe: PlayerUniverse):
    kind = _need(obj, "verdict", "payload")
    if kind == "balanced":
        dual_raw = _need(obj, "dual", "payload")
        n = universe.n
        dual = tuple(rational(dual_raw.get(str(i), None), f"payload.dual.{i}")
                     for i in range(1, n + 1))
        return Balanced(rational(obj["value"], "payload.value"), dual)
    if kind == "unbalanced":
        return Unbalanced(weights_from_json(_need(obj, "certificate", "payload"), universe,
                                            "payload.certificate"),
                          rational(_need(obj, "value", "payload"), "payload.value"))
    if kind == "unbounded-violation":
        return UnboundedViolation(
            weights_from_json(_need(obj, "base", "payload"), universe, "payload.base"),
            weights_from_json(_need(obj, "ray", "payload"), universe, "payload.ray"))
    raise InputError(f"payload.verdict: unknown verdict {kind!r}")


def core_result_to_json(result) -> dict:
    if isinstance(result, FiniteCharge):
        return {"verdict": "nonempty", "charge": finite_charge_to_json(result)}
    return {"verdict": "empty", "value": fmt(result.value),
            "certificate": weights_to_json(result.weights), "ray": weights_to_json(result.ray)}


def core_result_from_json(obj: Any, game: FiniteGame):
    kind = _need(obj, "verdict", "payload")
    if kind == "nonempty":
        return finite_charge_from_json(_need(obj, "charge", "payload"), game.n, game.hull(),
                                       "payload.charge")
    if kind == "empty":
        return EmptinessCertificate(
            weights_from_json(_need(obj, "certificate", "payload"), game.universe,
                              "payload.certificate"),
            rational(_need(obj, "value", "payload"), "payload.value"),
            weights_from_json(_need(obj, "ray", "payload"), game.universe, "payload.ray"))
    raise InputError(f"payload.verdict: unknown verdict {kind!r}")


def membership_to_json(report: MembershipReport) -> dict:
    return {"member": report.member,
            "violations": [dict(coalition_to_json(v.coalition), kind=v.kind,
                                required=fmt(v.required), actual=fmt(v.actual),
                                shortfall=fmt(v.shortfall))
                           for v in report.violations]}


def probe_to_json(result) -> dict:
    if isinstance(result, SigmaFeasible):
        return {"verdict": "feasible", "s": result.s, "k": result.k,
                "charge": fincof_charge_to_json(result.charge)}
    return {"verdict": "infeasible-within", "s": result.s, "k": result.k,
            "worth": fmt(result.worth), "certificate": weights_to_json(result.certificate)}


def probe_from_json(obj: Any):
    kind = _need(obj, "verdict", "payload")
    s = _int(_need(obj, "s", "payload"), "payload.s", 1)
    k = _int(_need(obj, "k", "payload"), "payload.k", 1)
    if kind == "feasible":
        return SigmaFeasible(fincof_charge_from_json(_need(obj, "charge", "payload"),
                                                     "payload.charge"), s, k)
    if kind == "infeasible-within":
        return InfeasibleWithin(s, k, weights_from_json(_need(obj, "certificate", "payload"),
                                                        COUNTABLE, "payload.certificate"),
                                rational(_need(obj, "worth", "payload"), "payload.worth"))
    raise InputError(f"payload.verdict: unknown verdict {kind!r}")
