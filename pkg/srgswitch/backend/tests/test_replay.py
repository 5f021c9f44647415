import json
from functools import lru_cache

import pytest

from app.errors import RankMismatchError, ReplayError, TranscriptError
from app.schemas import SearchReport, Transcript
from app.services.graphs import check_srg, feasible_2rank_interval, family_of, ones_in_colspace, two_rank
from app.services.product import construct
from app.services.search import (
    BUNDLED_TRANSCRIPTS,
    bundled_transcript,
    load_transcript,
    named_transcript,
    replay,
    replay_all,
)

EXPECTED_RANKS = {
    "table1": [8, 10, 12, 14, 16, 18, 18, 20, 20, 22, 22, 22, 24],
    "table2-left": [10, 12, 14, 16, 18, 20, 20, 22, 22, 24, 24, 26],
    "table2-right": [10, 12, 14, 16, 18, 20, 20, 22, 22, 24, 24, 26],
    "table3-left": [10, 12, 14, 16, 18, 20, 20, 20, 22, 22, 24, 24, 24, 24, 26],
    "table3-right": [10, 12, 14, 16, 18, 20, 20, 22, 22, 22, 22, 24, 24, 24, 26],
}


@lru_cache(maxsize=None)
def replayed(name: str) -> SearchReport:
    return replay(bundled_transcript(name))


def test_every_bundled_transcript_is_listed():
    assert set(BUNDLED_TRANSCRIPTS) == set(EXPECTED_RANKS)


@pytest.mark.parametrize("name", sorted(EXPECTED_RANKS))
def test_rank_sequence(name):
    report = replayed(name)
    assert report.ranks == EXPECTED_RANKS[name]
    assert report.final_rank == EXPECTED_RANKS[name][-1]
    assert report.terminated_by == "transcript_complete"
    assert two_rank(report.final_graph) == report.final_rank
    assert all(step.delta in (0, 2) for step in report.path)


def test_table1_runs_from_6_to_24():
    report = replayed("table1")
    assert report.start_rank == 6
    assert report.final_rank == 24
    assert (report.params.n, report.params.k, report.params.lambda_, report.params.mu) == (63, 32, 16, 16)


@pytest.mark.parametrize("name", sorted(EXPECTED_RANKS))
def test_parameters_never_change(name):
    report = replayed(name)
    assert check_srg(report.final_graph) == report.params


@pytest.mark.parametrize("name", ["table2-left", "table2-right", "table3-left", "table3-right"])
def test_all_ones_stays_in_the_column_space(name):
    report = replayed(name)
    assert report.start_rank == 8
    assert all(step.ones_in_colspace for step in report.path)
    assert report.ones_in_colspace_final
    assert ones_in_colspace(report.final_graph)


@pytest.mark.parametrize("name", sorted(EXPECTED_RANKS))
def test_ranks_stay_inside_the_feasible_interval(name):
    report = replayed(name)
    family, m = family_of(report.params)
    low, high = feasible_2rank_interval(family, m)
    assert all(low <= r <= high for r in report.ranks)
    # the upper bound itself is never reached by these sequences
    assert report.final_rank == high - 2


def test_table2_extends_to_a_rank_28_construction():
    factor = replayed("table2-left").final_graph
    plan, g = construct("Pminus", 4, [factor])
    assert plan.head == "2k2"
    assert two_rank(g) == 28
    params = check_srg(g)
    assert (params.n, params.k, params.lambda_, params.mu) == (256, 120, 56, 56)


def _corrupted(step: int, rank: int) -> Transcript:
    raw = bundled_transcript("table1").model_dump()
    raw["steps"][step - 1]["rank"] = rank
    return Transcript.model_validate(raw)


def test_rank_mismatch_names_the_step():
    with pytest.raises(RankMismatchError) as info:
        replay(_corrupted(7, 20))
    assert str(info.value) == "step 7: expected 20, observed 18"
    assert info.value.step == 7


def test_invalid_set_is_reported():
    t = Transcript(start="lattice4", steps=[{"set": ["1,1", "1,2", "1,3", "2,1"], "rank": 6}])
    with pytest.raises(ReplayError, match="step 1: .*not a GM switching set"):
        replay(t)


def test_unknown_label_is_reported():
    t = bundled_transcript("table1").model_dump()
    t["steps"][2]["set"][0] = "999999"
    with pytest.raises(ReplayError, match="step 3: no vertex labelled '999999'"):
        replay(Transcript.model_validate(t))


def test_final_colspace_claim_is_checked():
    raw = bundled_transcript("table1").model_dump()
    raw["steps"] = raw["steps"][:1]
    raw["expected_final_ones_in_colspace"] = not ones_in_colspace(replay(Transcript.model_validate(raw)).final_graph)
    with pytest.raises(ReplayError, match="step 1: all-ones vector"):
        replay(Transcript.model_validate(raw))


def test_transcript_validation():
    with pytest.raises(ValueError, match="odd"):
        Transcript(start="sp3", steps=[{"set": ["a", "b", "c", "d"], "rank": 7}])
    with pytest.raises(ValueError, match="only \\+0 or \\+2"):
        Transcript(start="sp3", steps=[
            {"set": ["a", "b", "c", "d"], "rank": 8},
            {"set": ["a", "b", "c", "d"], "rank": 12},
        ])
    with pytest.raises(ValueError, match="expected 4"):
        Transcript(start="sp3", steps=[{"set": ["a", "b"], "rank": 8}])


def test_load_transcript_errors(tmp_path):
    with pytest.raises(TranscriptError, match="cannot read transcript"):
        load_transcript(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"start": "sp3", "steps": [{"set": ["a"], "rank": 8}]}))
    with pytest.raises(TranscriptError, match="bad.json"):
        load_transcript(bad)

    with pytest.raises(TranscriptError, match="no transcript named"):
        bundled_transcript("table9")


def test_bundled_transcript_by_path_and_name(tmp_path):
    by_name = bundled_transcript("table2-left")
    assert bundled_transcript("table2-left.json") == by_name
    copy = tmp_path / "mine.json"
    copy.write_text(by_name.model_dump_json())
    assert bundled_transcript(str(copy)) == by_name


def test_replay_all_covers_every_bundled_transcript():
    reports = replay_all()
    assert list(reports) == list(BUNDLED_TRANSCRIPTS)
    assert {name: r.final_rank for name, r in reports.items()} == {
        name: ranks[-1] for name, ranks in EXPECTED_RANKS.items()
    }


def _with_step(name: str, step: int, labels: list[str]) -> Transcript:
    raw = bundled_transcript(name).model_dump()
    raw["steps"][step - 1]["set"] = labels
    return Transcript.model_validate(raw)


def test_table3_left_step14_as_printed_is_not_a_gm_set():
    printed = ["2,4,4", "3,4,3", "4,2,1", "3,2,3"]
    with pytest.raises(ReplayError, match="step 14: .*not a GM switching set"):
        replay(_with_step("table3-left", 14, printed))
    shipped = bundled_transcript("table3-left").steps[13].set
    assert shipped == ["1,3,3", "3,4,3", "4,2,1", "3,2,3"]


def test_table3_right_step3_as_printed_is_not_a_gm_set():
    printed = ["1,2,3", "4,4,1", "1,4,1", "4,2,3"]
    with pytest.raises(ReplayError, match="step 3: .*not a GM switching set"):
        replay(_with_step("table3-right", 3, printed))
    t = bundled_transcript("table3-right")
    assert t.steps[0].set == ["1,1,1", "2,1,2", "4,4,4", "3,4,3"]
    assert t.steps[1].set == ["1,1,2", "2,1,1", "2,2,2", "1,2,1"]


@pytest.mark.parametrize("name", ["table3-left", "table3-right"])
def test_table3_deviation_is_recorded(name):
    assert "printed" in bundled_transcript(name).description


def test_named_transcript_takes_bare_names_only(tmp_path):
    assert named_transcript("table1") == named_transcript("table1.json") == bundled_transcript("table1")
    copy = tmp_path / "mine.json"
    copy.write_text(bundled_transcript("table1").model_dump_json())
    with pytest.raises(TranscriptError, match="invalid transcript name"):
        named_transcript(str(copy))
    with pytest.raises(TranscriptError, match="invalid transcript name"):
        named_transcript("../data/transcripts/table1")
    with pytest.raises(TranscriptError, match="no transcript named 'mine'"):
        named_transcript("mine")
