import random

import pytest

import tracing_cases as tc
from fixtures import RepoSim, review_split_events
from remark_miner.history import HistoryIndex
from remark_miner.szz import (
    CATEGORIES,
    DIFFERENT_NO_SCOPE,
    DIFFERENT_STUCK,
    INCOMPLETE,
    SAME,
    classify,
    format_report,
    run_comparison,
    summarize,
    szz_trace,
)
from remark_miner.tracing import trace_dataset

EXPECTED_CATEGORIES = {
    tc.case_direct_line_trigger: [SAME],
    tc.case_continue_past_first_trigger: [INCOMPLETE],
    tc.case_skip_foreign_commit: [DIFFERENT_STUCK],
    tc.case_block_scope_expansion: [DIFFERENT_STUCK],
    tc.case_insertion_traces_adjacent_lines: [DIFFERENT_NO_SCOPE],
    tc.case_whole_file_addition_in_review: [DIFFERENT_NO_SCOPE],
    tc.case_whole_file_delete_in_review: [SAME],
    tc.case_pure_rename_in_review: [DIFFERENT_NO_SCOPE],
    tc.case_merged_remark_across_files: [SAME],
    tc.case_skip_earlier_review_commit: [SAME, DIFFERENT_STUCK],
    tc.case_whole_ticket_for_untouched_file: [DIFFERENT_STUCK],
    tc.case_rename_chain_crossing: [SAME],
}


@pytest.mark.parametrize(
    "case", EXPECTED_CATEGORIES, ids=lambda c: c.__name__
)
def test_hand_labeled_categories(case):
    dataset, ticket_id, _ = case()
    trace_dataset(dataset)
    rows = run_comparison(dataset)
    got = [cat for tid, _, cat, _ in rows if tid == ticket_id]
    assert got == EXPECTED_CATEGORIES[case]


def test_szz_simple_agreement_and_foreign_stop():
    dataset, ticket_id, _ = tc.case_skip_foreign_commit()
    trace_dataset(dataset)
    index = HistoryIndex(dataset)
    ticket = dataset.tickets[ticket_id]
    remark = ticket.remarks[0]
    result = szz_trace(remark, dataset, index)
    # blame stops at the foreign commit, no skipping
    assert result.found_commit == "c001"
    assert result.found_hunks == {"c001:a.java:0"}


def test_szz_untouched_line_finds_nothing():
    sim = RepoSim()
    sim.commit("T-1", [("add", "a.java", ["class A {", "  int x;", "}"])], ts=10)
    sim.commit("T-1", [("edit", "a.java", ["class A {", "  int x;", "  int y;", "}"])], ts=210)
    dataset = sim.dataset(review_split_events("T-1", 100, 200))
    trace_dataset(dataset)
    index = HistoryIndex(dataset)
    remark = dataset.tickets["T-1"].remarks[0]
    result = szz_trace(remark, dataset, index)
    assert result.found_commit is None and not result.found_hunks


def random_history(rng: random.Random):
    """A small random history: one ticket under review, one foreign ticket,
    random line edits, a review phase with 1-2 commits."""
    sim = RepoSim()
    paths = [f"f{i}.java" if rng.random() < 0.7 else f"f{i}.txt" for i in range(rng.randint(1, 2))]
    contents = {}
    ts = 5
    for i, path in enumerate(paths):
        owner = rng.choice(["T-1", "T-9"])
        lines = [f"{path} line {j} v0" for j in range(rng.randint(3, 8))]
        contents[path] = lines
        sim.commit(owner, [("add", path, lines)], ts=ts)
        ts += 5

    def mutate(path):
        lines = contents[path][:]
        action = rng.random()
        if action < 0.6 or len(lines) < 2:
            i = rng.randrange(len(lines))
            lines[i] = lines[i].rsplit(" v", 1)[0] + f" v{rng.randint(1, 9)}"
        elif action < 0.8:
            i = rng.randrange(len(lines) + 1)
            lines.insert(i, f"{path} inserted {rng.randint(0, 99)}")
        else:
            del lines[rng.randrange(len(lines))]
        contents[path] = lines
        return lines

    for _ in range(rng.randint(1, 4)):
        owner = rng.choice(["T-1", "T-9", "T-9"])
        path = rng.choice(paths)
        sim.commit(owner, [("edit", path, mutate(path))], ts=ts)
        ts += 5
    for _ in range(rng.randint(1, 2)):
        path = rng.choice(paths)
        sim.commit("T-1", [("edit", path, mutate(path))], ts=ts + 300)
        ts += 5
    events = review_split_events("T-1", ts, ts + 290)
    return sim.dataset(events), "T-1"


def check_szz_subset_property(n_histories: int, seed: int = 7) -> int:
    """SAME or INCOMPLETE implies SZZ's trigger set is contained in ours.
    Returns how many classified remarks were checked."""
    rng = random.Random(seed)
    checked = 0
    index_cache = None
    for _ in range(n_histories):
        dataset, ticket_id = random_history(rng)
        trace_dataset(dataset)
        index = HistoryIndex(dataset)
        ticket = dataset.tickets[ticket_id]
        links = {l.remark_id: l for l in ticket.trigger_links}
        all_records = {r.record_id for r in ticket.records}
        for remark in ticket.remarks:
            link = links[remark.remark_id]
            result = szz_trace(remark, dataset, index)
            category = classify(link, result, dataset, ticket_id)
            assert category in CATEGORIES
            ours = all_records if link.whole_ticket else set(link.triggers)
            if category in (SAME, INCOMPLETE):
                assert result.found_hunks <= ours
                assert result.found_hunks or category != SAME or not ours
            # stronger form: whenever blame only hits impl commits of the
            # ticket, our tracer kept every one of those hunks
            if result.found_hunks and all(
                dataset.commits[c].ticket_id == ticket_id
                and dataset.commits[c].phase == "IMPLEMENTATION"
                for c in result.found_commits
            ):
                assert result.found_hunks <= ours
            checked += 1
    return checked


def test_szz_subset_property_sampled():
    assert check_szz_subset_property(60) > 0


def test_summarize_percentages():
    dataset, _, _ = tc.case_skip_earlier_review_commit()
    trace_dataset(dataset)
    rows = run_comparison(dataset)
    report = summarize(rows)
    assert report["all_remarks"]["total"] == 2
    assert report["all_remarks"]["counts"][SAME] == 1
    assert report["all_remarks"]["counts"][DIFFERENT_STUCK] == 1
    assert sum(report["all_remarks"]["percents"].values()) == pytest.approx(100.0)
    assert report["java_remarks"]["total"] == 2  # both remarks in .java files
    text = format_report(report)
    assert "all_remarks" in text and "SAME" in text


def test_summarize_empty_input():
    report = summarize([])
    assert report["all_remarks"]["total"] == 0
    assert all(v == 0.0 for v in report["all_remarks"]["percents"].values())


def test_extension_filter():
    sim = RepoSim()
    sim.commit("T-1", [("add", "a.java", ["class A {", "  int x;", "}"])], ts=10)
    sim.commit("T-1", [("add", "b.txt", ["one", "two"])], ts=20)
    sim.commit(
        "T-1",
        [
            ("edit", "a.java", ["class A {", "  int y;", "}"]),
            ("edit", "b.txt", ["ONE", "two"]),
        ],
        ts=210,
    )
    dataset = sim.dataset(review_split_events("T-1", 100, 200))
    trace_dataset(dataset)
    report = summarize(run_comparison(dataset))
    assert report["all_remarks"]["total"] == 2
    assert report["java_remarks"]["total"] == 1


def test_per_raw_part_weighting():
    dataset, _, _ = tc.case_merged_remark_across_files()
    trace_dataset(dataset)
    rows = run_comparison(dataset, per_raw_part=True)
    assert rows[0][3] == 2  # two raw parts merged into the remark
    report = summarize(rows)
    assert report["all_remarks"]["total"] == 2
