"""Loading, validation, labeling and splitting of flat round records.

One record per round, JSONL or CSV, field names fixed by ROUND_SCHEMA_FIELDS.
Buy labels are always recomputed from (equipment, spend); a stored label that
disagrees is overwritten with a warning rather than trusted.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .domain import (
    DEFAULT_MAP_POOL,
    BuyType,
    DomainError,
    GameOutcome,
    LabeledRound,
    RoundState,
    Side,
)
from .economy import classify_buy

logger = logging.getLogger(__name__)

ROUND_SCHEMA_FIELDS = (
    "game_id",
    "map_name",
    "round_number",
    "match_date",
    "ct_team",
    "t_team",
    "ct_score",
    "t_score",
    "ct_equip_start",
    "t_equip_start",
    "ct_money",
    "t_money",
    "ct_spend",
    "t_spend",
    "round_winner",
    "game_winner",
)

_INT_FIELDS = (
    "round_number",
    "ct_score",
    "t_score",
    "ct_equip_start",
    "t_equip_start",
    "ct_money",
    "t_money",
    "ct_spend",
    "t_spend",
)

DRAW_MARKER = "DRAW"

# Optional columns: stored buy labels, checked against classify_buy.
_OPTIONAL_BUY_FIELDS = ("ct_buy", "t_buy")


class IngestError(ValueError):
    """Validation failure; collects every offending (line, field, reason)."""

    def __init__(self, errors: list[str]):
        self.errors = sorted(errors)
        preview = "; ".join(self.errors[:5])
        more = f" (+{len(self.errors) - 5} more)" if len(self.errors) > 5 else ""
        super().__init__(f"{len(self.errors)} invalid record(s): {preview}{more}")


@dataclass(frozen=True)
class MatchResults:
    """Per-game winner table plus per-round winners."""

    game_winner: dict[str, str]  # game_id -> winning team id or DRAW
    round_winner: dict[tuple[str, int], Side]


@dataclass
class LoadResult:
    states: list[RoundState]
    results: MatchResults
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class DatasetSplit:
    """Date-based train/validation/test partition, always split by game."""

    train: tuple[LabeledRound, ...]
    validation: tuple[LabeledRound, ...]
    test: tuple[LabeledRound, ...]
    train_end: _dt.date
    val_end: _dt.date

    def partitions(self) -> dict[str, tuple[LabeledRound, ...]]:
        return {"train": self.train, "validation": self.validation, "test": self.test}


def _parse_record(
    record: dict, line: int, map_pool: frozenset[str], allow_new_maps: bool,
    errors: list[str], warnings: list[str],
):
    """One validated (RoundState, round_winner, game_winner) or None."""
    missing = [f for f in ROUND_SCHEMA_FIELDS if f not in record or record[f] in (None, "")]
    if missing:
        errors.append(f"line {line}: missing field(s) {', '.join(missing)}")
        return None

    values: dict = {}
    ok = True
    for f in _INT_FIELDS:
        try:
            values[f] = int(record[f])
        except (TypeError, ValueError):
            errors.append(f"line {line}: field {f}: not an integer ({record[f]!r})")
            ok = False
    try:
        values["match_date"] = _dt.date.fromisoformat(str(record["match_date"]))
    except ValueError:
        errors.append(
            f"line {line}: field match_date: not an ISO date ({record['match_date']!r})")
        ok = False
    if not ok:
        return None

    map_name = str(record["map_name"])
    if map_name not in map_pool and not allow_new_maps:
        errors.append(
            f"line {line}: field map_name: unknown map {map_name!r} "
            "(pass allow_new_maps to accept)")
        return None

    if values["round_number"] != values["ct_score"] + values["t_score"] + 1:
        errors.append(
            f"line {line}: field round_number: expected ct_score + t_score + 1 "
            f"= {values['ct_score'] + values['t_score'] + 1}, got {values['round_number']}")
        return None

    try:
        ct_buy = classify_buy(values["ct_equip_start"], values["ct_spend"])
        t_buy = classify_buy(values["t_equip_start"], values["t_spend"])
        state = RoundState(
            game_id=str(record["game_id"]),
            map_name=map_name,
            round_number=values["round_number"],
            ct_score=values["ct_score"],
            t_score=values["t_score"],
            ct_equip_start=values["ct_equip_start"],
            t_equip_start=values["t_equip_start"],
            ct_money=values["ct_money"],
            t_money=values["t_money"],
            ct_spend=values["ct_spend"],
            t_spend=values["t_spend"],
            ct_buy=ct_buy,
            t_buy=t_buy,
            ct_team=str(record["ct_team"]),
            t_team=str(record["t_team"]),
            match_date=values["match_date"],
        )
    except DomainError as exc:
        errors.append(f"line {line}: {exc}")
        return None

    for stored_field, derived in (("ct_buy", ct_buy), ("t_buy", t_buy)):
        stored = record.get(stored_field)
        if stored not in (None, "") and str(stored) != derived.value:
            warnings.append(
                f"line {line}: stored {stored_field} {stored!r} disagrees with "
                f"derived {derived.value}; overwritten")

    winner_raw = str(record["round_winner"])
    if winner_raw not in (Side.CT.value, Side.T.value):
        errors.append(
            f"line {line}: field round_winner: expected CT or T, got {winner_raw!r}")
        return None
    game_winner = str(record["game_winner"])
    if game_winner != DRAW_MARKER and game_winner not in (state.ct_team, state.t_team):
        errors.append(
            f"line {line}: field game_winner: {game_winner!r} is neither a "
            "participating team nor DRAW")
        return None
    return state, Side(winner_raw), game_winner


def _iter_records(path: Path, fmt: str):
    if fmt == "jsonl":
        with path.open() as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    yield line_no, json.loads(line)
                except json.JSONDecodeError as exc:
                    yield line_no, exc
    elif fmt == "csv":
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            for line_no, row in enumerate(reader, start=2):  # header is line 1
                yield line_no, row
    else:
        raise DomainError(f"unknown format {fmt!r}; expected jsonl or csv")


def load_rounds(
    path: str | Path,
    format: str | None = None,
    allow_new_maps: bool = False,
    map_pool: tuple[str, ...] = DEFAULT_MAP_POOL,
) -> LoadResult:
    """Load and validate a round-record file.

    Raises IngestError listing every invalid record (sorted by line) when
    any record fails validation. Mismatched stored buy labels are accepted,
    overwritten and reported in LoadResult.warnings.
    """
    path = Path(path)
    fmt = format or ("csv" if path.suffix.lower() == ".csv" else "jsonl")
    states: list[RoundState] = []
    round_winner: dict[tuple[str, int], Side] = {}
    game_winner: dict[str, str] = {}
    errors: list[str] = []
    warnings: list[str] = []

    for line_no, record in _iter_records(path, fmt):
        if isinstance(record, json.JSONDecodeError):
            errors.append(f"line {line_no}: unparseable JSON ({record.msg})")
            continue
        parsed = _parse_record(record, line_no, frozenset(map_pool),
                               allow_new_maps, errors, warnings)
        if parsed is None:
            continue
        state, r_winner, g_winner = parsed
        key = (state.game_id, state.round_number)
        if key in round_winner:
            errors.append(f"line {line_no}: duplicate round {key}")
            continue
        prior = game_winner.get(state.game_id)
        if prior is not None and prior != g_winner:
            errors.append(
                f"line {line_no}: game {state.game_id} has conflicting winners "
                f"{prior!r} vs {g_winner!r}")
            continue
        states.append(state)
        round_winner[key] = r_winner
        game_winner[state.game_id] = g_winner

    if errors:
        raise IngestError(errors)
    for message in warnings:
        logger.warning("%s: %s", path, message)
    return LoadResult(states, MatchResults(game_winner, round_winner), warnings)


def derive_labels(rounds: list[RoundState], results: MatchResults) -> list[LabeledRound]:
    """Attach side-relative game outcome labels and round winners."""
    missing = sorted({s.game_id for s in rounds if s.game_id not in results.game_winner})
    if missing:
        raise IngestError([f"no game result for game_id {g}" for g in missing])
    labeled = []
    for state in rounds:
        winner = results.game_winner[state.game_id]
        if winner == DRAW_MARKER:
            outcome = GameOutcome.DRAW
        elif winner == state.ct_team:
            outcome = GameOutcome.CT_WIN
        elif winner == state.t_team:
            outcome = GameOutcome.T_WIN
        else:
            raise IngestError(
                [f"game {state.game_id}: winner {winner!r} not on either side "
                 f"in round {state.round_number}"])
        try:
            r_winner = results.round_winner[(state.game_id, state.round_number)]
        except KeyError:
            raise IngestError(
                [f"no round winner for game {state.game_id} "
                 f"round {state.round_number}"]) from None
        labeled.append(LabeledRound(state, outcome, r_winner))
    return labeled


DEFAULT_TRAIN_END = _dt.date(2020, 9, 30)
DEFAULT_VAL_END = _dt.date(2020, 11, 30)


def split_by_date(
    rounds: list[LabeledRound],
    train_end: _dt.date = DEFAULT_TRAIN_END,
    val_end: _dt.date = DEFAULT_VAL_END,
) -> DatasetSplit:
    """Partition by game match date; a game never straddles partitions."""
    if not train_end < val_end:
        raise DomainError(f"train_end {train_end} must precede val_end {val_end}")
    game_date: dict[str, _dt.date] = {}
    for lr in rounds:
        game_date.setdefault(lr.state.game_id, lr.state.match_date)
    parts: dict[str, list[LabeledRound]] = {"train": [], "validation": [], "test": []}
    for lr in rounds:
        date = game_date[lr.state.game_id]
        if date <= train_end:
            parts["train"].append(lr)
        elif date <= val_end:
            parts["validation"].append(lr)
        else:
            parts["test"].append(lr)
    for name, rows in parts.items():
        rows.sort(key=lambda lr: (lr.state.game_id, lr.state.round_number))
        if not rows:
            logger.warning("split partition %r is empty", name)
    return DatasetSplit(
        train=tuple(parts["train"]),
        validation=tuple(parts["validation"]),
        test=tuple(parts["test"]),
        train_end=train_end,
        val_end=val_end,
    )


def record_from_state(state: RoundState, round_winner: Side, game_winner: str) -> dict:
    """Flat schema record for one round; inverse of the loader."""
    return {
        "game_id": state.game_id,
        "map_name": state.map_name,
        "round_number": state.round_number,
        "match_date": state.match_date.isoformat(),
        "ct_team": state.ct_team,
        "t_team": state.t_team,
        "ct_score": state.ct_score,
        "t_score": state.t_score,
        "ct_equip_start": state.ct_equip_start,
        "t_equip_start": state.t_equip_start,
        "ct_money": state.ct_money,
        "t_money": state.t_money,
        "ct_spend": state.ct_spend,
        "t_spend": state.t_spend,
        "round_winner": round_winner.value,
        "game_winner": game_winner,
    }


def write_records(path: str | Path, records: list[dict], format: str | None = None) -> None:
    """Write schema records as JSONL or CSV (inferred from the suffix)."""
    path = Path(path)
    fmt = format or ("csv" if path.suffix.lower() == ".csv" else "jsonl")
    if fmt == "jsonl":
        with path.open("w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    elif fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=ROUND_SCHEMA_FIELDS)
            writer.writeheader()
            for rec in records:
                writer.writerow({k: rec[k] for k in ROUND_SCHEMA_FIELDS})
    else:
        raise DomainError(f"unknown format {fmt!r}; expected jsonl or csv")
