"""Leaderboards: turning a fitness value into a rank and percentile."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Leaderboard:
    contest_id: str
    entries: tuple[tuple[int, int], ...]  # (rank, score), scores non-increasing

    def __post_init__(self):
        if not self.entries:
            raise ValueError("leaderboard is empty")
        for i, (rank, score) in enumerate(self.entries):
            if rank != i + 1:
                raise ValueError(f"ranks must be contiguous from 1, got {rank} at row {i}")
            if i and score > self.entries[i - 1][1]:
                raise ValueError("scores must be sorted non-increasing")


def load_leaderboard(text: str, contest_id: str = "") -> Leaderboard:
    """Parse the CSV format: header 'rank,score', one row per team."""
    lines = [ln.strip() for ln in text.strip().split("\n") if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "rank,score":
        raise ValueError("expected header 'rank,score'")
    entries = []
    for ln in lines[1:]:
        rank_text, score_text = ln.split(",")
        entries.append((int(rank_text), int(score_text)))
    return Leaderboard(contest_id, tuple(entries))


def rank_of(board: Leaderboard, fitness: int) -> tuple[int, float, float]:
    """(rank, percentile, normalized) for a fitness among the team scores.

    Tied scores share the better rank; fitness above every team is rank 1
    and its normalized value may exceed 1.
    """
    scores = [score for _, score in board.entries]
    rank = 1 + sum(1 for s in scores if s > fitness)
    n = len(scores)
    percentile = 100.0 * (1.0 - (rank - 1) / n)
    top = scores[0]
    if top == 0:
        raise ValueError("top score is zero; normalization undefined")
    normalized = fitness / top
    return rank, percentile, normalized
