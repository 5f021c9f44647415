"""
Greedy 2-rank search by GM switching, and replay of recorded switching sequences.

search_increase scans every GM set of the current graph, applies the first
one that raises the 2-rank by 2, and otherwise takes a seeded-random
rank-preserving detour. Candidate ranks are computed in parallel chunks;
the accepted set is always the earliest in scan order.
"""

import logging
import re
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np
from pydantic import ValidationError

from app.config import transcript_dirs
from app.errors import (
    NotStronglyRegularError,
    RankMismatchError,
    ReplayError,
    SrgSwitchError,
    TranscriptError,
)
from app.schemas import PathStep, SearchConfig, SearchReport, Termination, Transcript
from app.services.graphs import Graph, check_srg, ones_in_colspace, two_rank
from app.services.product import named_graph
from app.services.switching import (
    VertexSet,
    gm_set_array,
    gm_switch,
    is_gm_set,
    set_labels,
    switched_ranks,
    vertex_set,
)

logger = logging.getLogger(__name__)

CANDIDATE_CHUNK = 4096
BUNDLED_TRANSCRIPTS = ("table1", "table2-left", "table2-right", "table3-left", "table3-right")
TRANSCRIPT_NAME = re.compile(r"[A-Za-z0-9_-]+")


def enumerate_gm_sets(g: Graph, size: int) -> Iterator[VertexSet]:
    """Every GM set of the given size, in lexicographic order of sorted indices."""
    for members in gm_set_array(g, size):
        yield VertexSet(tuple(int(v) for v in members), g.n)


def _step(g: Graph, members: np.ndarray, rank: int, delta: int) -> PathStep:
    w = VertexSet(tuple(int(v) for v in members), g.n)
    return PathStep(set=set_labels(g, w), rank=rank, delta=delta, ones_in_colspace=ones_in_colspace(g))


def _first_increase(g: Graph, sets: np.ndarray, rank: int) -> tuple[Optional[int], np.ndarray]:
    """Index of the first +2 set, and the ranks evaluated up to and including it."""
    evaluated = []
    for start in range(0, len(sets), CANDIDATE_CHUNK):
        ranks = switched_ranks(g, sets[start:start + CANDIDATE_CHUNK])
        evaluated.append(ranks)
        hits = np.flatnonzero(ranks == rank + 2)
        if hits.size:
            return start + int(hits[0]), np.concatenate(evaluated)
    if not evaluated:
        return None, np.zeros(0, dtype=np.int64)
    return None, np.concatenate(evaluated)


def search_increase(g: Graph, cfg: SearchConfig, start: str = "graph") -> SearchReport:
    params = check_srg(g)
    if params is None:
        raise NotStronglyRegularError("search_increase: start graph is not strongly regular")
    rng = np.random.default_rng(cfg.rng_seed)
    current = g
    start_rank = rank = two_rank(g)
    path: list[PathStep] = []
    budget = cfg.budget_without_increase
    terminated: Termination

    logger.info(f"search_increase: start {start} {params} rank {rank}, {cfg.enumeration} scan of size-{cfg.set_size} sets")
    while True:
        if cfg.max_rank is not None and rank >= cfg.max_rank:
            terminated = "target_reached"
            break
        sets = gm_set_array(current, cfg.set_size)
        if cfg.enumeration == "random" and len(sets):
            sets = sets[rng.permutation(len(sets))]
        if not len(sets):
            terminated = "space_exhausted"
            break

        hit, ranks = _first_increase(current, sets, rank)
        if hit is not None:
            members = sets[hit]
            delta = 2
            budget = cfg.budget_without_increase
        else:
            if budget == 0:
                terminated = "budget_exhausted"
                break
            flat = np.flatnonzero(ranks == rank)
            if not flat.size:
                terminated = "space_exhausted"
                break
            members = sets[flat[rng.integers(flat.size)]]
            delta = 0
            budget -= 1

        current = gm_switch(current, VertexSet(tuple(int(v) for v in members), current.n))
        rank += delta
        if check_srg(current) != params:
            raise NotStronglyRegularError(f"search_increase: switching broke the parameters {params}")
        path.append(_step(current, members, rank, delta))
        if delta:
            logger.info(f"search_increase: step {len(path)} rank {rank} (+2) from {len(sets)} GM sets")
        else:
            logger.debug(f"search_increase: step {len(path)} detour at rank {rank}, {budget} left")

    if terminated == "budget_exhausted":
        logger.info(f"search_increase: budget exhausted after {cfg.budget_without_increase} detours at rank {rank}")
    return SearchReport(
        start=start,
        params=params,
        start_rank=start_rank,
        path=path,
        final_rank=rank,
        terminated_by=terminated,
        ones_in_colspace_final=ones_in_colspace(current),
        final_graph=current,
    )


# ---------------------------------------------------------------------------
# Transcripts
# ---------------------------------------------------------------------------


def replay(t: Transcript) -> SearchReport:
    g = named_graph(t.start)
    params = check_srg(g)
    if params is None:
        raise NotStronglyRegularError(f"replay: start graph {t.start} is not strongly regular")
    start_rank = rank = two_rank(g)
    path: list[PathStep] = []

    for i, step in enumerate(t.steps, start=1):
        try:
            w = vertex_set(g, step.set)
        except SrgSwitchError as exc:
            raise ReplayError(i, str(exc)) from exc
        if not is_gm_set(g, w):
            raise ReplayError(i, f"{step.set} is not a GM switching set")
        g = gm_switch(g, w)
        observed = two_rank(g)
        if observed != step.rank:
            raise RankMismatchError(i, step.rank, observed)
        now = check_srg(g)
        if now != params:
            raise ReplayError(i, f"parameters changed from {params} to {now}")
        ones = ones_in_colspace(g)
        path.append(PathStep(set=list(step.set), rank=observed, delta=observed - rank, ones_in_colspace=ones))
        logger.info(f"replay: step {i} rank {observed} (delta {observed - rank:+d})")
        rank = observed

    ones_final = ones_in_colspace(g)
    if t.expected_final_ones_in_colspace is not None and ones_final != t.expected_final_ones_in_colspace:
        raise ReplayError(
            len(t.steps),
            f"all-ones vector {'is' if ones_final else 'is not'} in the 2-column space, transcript says otherwise",
        )
    return SearchReport(
        start=t.start,
        params=params,
        start_rank=start_rank,
        path=path,
        final_rank=rank,
        terminated_by="transcript_complete",
        ones_in_colspace_final=ones_final,
        final_graph=g,
    )


def load_transcript(path: Union[str, Path]) -> Transcript:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TranscriptError(f"cannot read transcript {path}: {exc.strerror}") from exc
    try:
        return Transcript.model_validate_json(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "transcript"
        raise TranscriptError(f"{path.name}: {where}: {first['msg']}") from exc


def named_transcript(name: str) -> Transcript:
    """A transcript by bare name, looked up only in the transcript directories."""
    stem = name.strip()
    if stem.endswith(".json"):
        stem = stem[:-5]
    if not TRANSCRIPT_NAME.fullmatch(stem):
        raise TranscriptError(f"invalid transcript name {name!r}: letters, digits, '-' and '_' only")
    for directory in transcript_dirs():
        path = directory / f"{stem}.json"
        if path.is_file():
            return load_transcript(path)
    raise TranscriptError(f"no transcript named {name!r} (bundled: {', '.join(BUNDLED_TRANSCRIPTS)})")


def bundled_transcript(name: str) -> Transcript:
    """A transcript by file path, or by bare name from the transcript directories."""
    candidate = Path(name)
    if candidate.is_file():
        return load_transcript(candidate)
    return named_transcript(candidate.name)


def replay_all() -> dict[str, SearchReport]:
    return {name: replay(bundled_transcript(name)) for name in BUNDLED_TRANSCRIPTS}
