"""Optimal Spending Error: per-team squared gaps between the win
probability under the actual buy and under the model-optimal buy,
aggregated overall and per side, with rankings and the OSE vs round-win-
rate correlation.

The error sum is divided by the team's round count (per-side counts for
the side aggregates): the metric is reported as a mean, which matches the
magnitudes practitioners quote; see the ranking footnote.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field

import numpy as np

from .counterfactual import evaluate_many
from .domain import DomainError, LabeledRound, Side
from .tables import format_table

RANKING_FOOTNOTE = (
    "OSE reported as a mean over rounds (per-side means for CT/T columns)")

DEFAULT_MIN_ROUNDS = 300


@dataclass(frozen=True)
class TeamOseReport:
    team_id: str
    average_ose: float
    ct_ose: float
    t_ose: float
    rounds_played: int
    ct_rounds: int
    t_rounds: int
    round_win_rate: float
    hltv_rank: int | None = None

    def to_json(self) -> dict:
        return {
            "team": self.team_id,
            "average_ose": self.average_ose,
            "ct_ose": self.ct_ose,
            "t_ose": self.t_ose,
            "rounds_played": self.rounds_played,
            "round_win_rate": self.round_win_rate,
            "hltv_rank": self.hltv_rank,
        }


def _team_items(rounds: list[LabeledRound], team: str):
    items = []
    for lr in rounds:
        side = lr.state.team_side(team)
        if side is not None:
            items.append((lr, side))
    return items


def _report_from_errors(team: str, sides: list[Side], errors: list[float],
                        wins: int, hltv_rank: int | None = None) -> TeamOseReport:
    err = np.asarray(errors, dtype=np.float64)
    side_mask = np.asarray([s is Side.CT for s in sides])
    n_ct = int(side_mask.sum())
    n_t = len(sides) - n_ct
    return TeamOseReport(
        team_id=team,
        average_ose=float(err.mean()),
        ct_ose=float(err[side_mask].mean()) if n_ct else 0.0,
        t_ose=float(err[~side_mask].mean()) if n_t else 0.0,
        rounds_played=len(sides),
        ct_rounds=n_ct,
        t_rounds=n_t,
        round_win_rate=wins / len(sides),
        hltv_rank=hltv_rank,
    )


def team_ose(model, rounds: list[LabeledRound], team: str) -> TeamOseReport:
    """Mean squared (actual - optimal) win-probability gap for one team."""
    items = _team_items(rounds, team)
    if not items:
        raise DomainError(f"team {team!r} plays no round in this corpus")
    evals = evaluate_many(model, [(lr.state, side) for lr, side in items])
    errors = [(ev.w_actual - ev.o_optimal) ** 2 for ev in evals]
    sides = [side for _, side in items]
    wins = sum(lr.round_winner is side for lr, side in items)
    return _report_from_errors(team, sides, errors, wins)


def rank_teams(
    model,
    rounds: list[LabeledRound],
    min_rounds: int = DEFAULT_MIN_ROUNDS,
    hltv_ranks: dict[str, int] | None = None,
) -> list[TeamOseReport]:
    """Teams with enough rounds, ascending by average OSE, ties by id.

    Evaluates each round once per participating side and reuses it across
    teams, so the cost is two model passes over the corpus.
    """
    evals_by_round: dict[int, dict[Side, object]] = {}
    items = [(lr.state, side) for lr in rounds for side in Side]
    evals = evaluate_many(model, items)
    for i, lr in enumerate(rounds):
        evals_by_round[i] = {Side.CT: evals[2 * i], Side.T: evals[2 * i + 1]}

    teams = sorted({t for lr in rounds for t in (lr.state.ct_team, lr.state.t_team)})
    reports = []
    for team in teams:
        sides: list[Side] = []
        errors: list[float] = []
        wins = 0
        for i, lr in enumerate(rounds):
            side = lr.state.team_side(team)
            if side is None:
                continue
            ev = evals_by_round[i][side]
            sides.append(side)
            errors.append((ev.w_actual - ev.o_optimal) ** 2)
            wins += lr.round_winner is side
        if len(sides) >= min_rounds and sides:
            reports.append(_report_from_errors(
                team, sides, errors, wins,
                (hltv_ranks or {}).get(team)))
    reports.sort(key=lambda r: (r.average_ose, r.team_id))
    return reports


def ose_winrate_correlation(
    reports: list[TeamOseReport],
) -> tuple[float, str]:
    """Pearson r between average OSE and round win rate, plus scatter CSV."""
    if len(reports) < 3:
        raise DomainError("correlation needs at least three teams")
    ose = np.asarray([r.average_ose for r in reports])
    win = np.asarray([r.round_win_rate for r in reports])
    for name, values in (("average_ose", ose), ("round_win_rate", win)):
        if np.var(values) == 0.0:
            raise DomainError(f"{name} is constant across teams")
    r = float(np.corrcoef(ose, win)[0, 1])
    lines = ["team,average_ose,round_win_rate"]
    lines.extend(f"{rep.team_id},{rep.average_ose!r},{rep.round_win_rate!r}"
                 for rep in reports)
    return r, "\n".join(lines) + "\n"


@dataclass
class OseRankingReport:
    reports: list[TeamOseReport]
    min_rounds: int
    generated_at: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())

    def to_json(self) -> dict:
        return {
            "teams": [r.to_json() for r in self.reports],
            "min_rounds": self.min_rounds,
            "generated_at": self.generated_at,
            "footnote": RANKING_FOOTNOTE,
        }

    def to_text(self) -> str:
        headers = ["team", "average OSE", "CT OSE", "T OSE", "rounds",
                   "round win %", "hltv rank"]
        rows = [
            [r.team_id, f"{r.average_ose:.5f}", f"{r.ct_ose:.5f}",
             f"{r.t_ose:.5f}", r.rounds_played,
             f"{100 * r.round_win_rate:.1f}%",
             "-" if r.hltv_rank is None else r.hltv_rank]
            for r in self.reports
        ]
        return (f"generated_at {self.generated_at}\n"
                + format_table(headers, rows) + f"\n# {RANKING_FOOTNOTE}")
