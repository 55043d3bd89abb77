from fixtures import RepoSim, review_split_events
from remark_miner.model import CommitRecord, FileChange, Hunk
from remark_miner.remarks import extract_remarks


def _review_commit(changes, cid="c9", ticket="T-1", ts=210):
    return CommitRecord(
        commit_id=cid,
        ticket_id=ticket,
        author="dev",
        timestamp=ts,
        file_changes=tuple(changes),
        phase="REVIEW",
    )


def _one_line_edit(path, old, new, line=1):
    return FileChange(
        path_old=path,
        path_new=path,
        change_type="MODIFY",
        similarity=50,
        hunks=(Hunk(line, 1, line, 1, (old,), (new,)),),
        new_line_count=10,
    )


def test_systematic_change_merges_into_one_remark():
    changes = [
        _one_line_edit(f"mod{i}/Use.java", "int x = OLD_NAME;", "int x = NEW_NAME;")
        for i in range(7)
    ]
    remarks = extract_remarks([_review_commit(changes)])
    assert len(remarks) == 1
    assert remarks[0].merged_count == 7
    assert len(remarks[0].sites) == 7


def test_same_change_different_indentation_still_merges():
    changes = [
        _one_line_edit("a/X.java", "  int x = OLD;", "  int x = NEW;"),
        _one_line_edit("b/Y.java", "\tint x = OLD;", "\tint x = NEW;"),
    ]
    remarks = extract_remarks([_review_commit(changes)])
    assert len(remarks) == 1
    assert remarks[0].merged_count == 2


def test_distinct_changes_stay_separate():
    changes = [
        _one_line_edit("a/X.java", "int a;", "int b;"),
        _one_line_edit("a/Y.java", "int c;", "int d;"),
    ]
    remarks = extract_remarks([_review_commit(changes)])
    assert len(remarks) == 2


def test_whitespace_only_filtered_and_counted():
    counters = {}
    changes = [_one_line_edit("a/X.java", "    int x = 1;", "\tint x = 1;")]
    remarks = extract_remarks([_review_commit(changes)], counters=counters)
    assert remarks == []
    assert counters["remarks_whitespace_only"] == 1


def test_import_only_filtered():
    counters = {}
    changes = [
        FileChange(
            path_old="a/X.java",
            path_new="a/X.java",
            change_type="MODIFY",
            hunks=(
                Hunk(1, 2, 1, 2,
                     ("import a.B;", "import a.C;"),
                     ("import a.B;", "import a.D;")),
            ),
            new_line_count=10,
        )
    ]
    remarks = extract_remarks([_review_commit(changes)], counters=counters)
    assert remarks == []
    assert counters["remarks_import_only"] == 1


def test_derived_extension_filtered():
    counters = {}
    changes = [_one_line_edit("gen/Parser.jav", "int x;", "int y;")]
    remarks = extract_remarks(
        [_review_commit(changes)], derived_extensions=("jav",), counters=counters
    )
    assert remarks == []
    assert counters["remarks_derived"] == 1


def test_merging_is_per_commit_not_across_commits():
    c1 = _review_commit([_one_line_edit("a/X.java", "int x = OLD;", "int x = NEW;")], cid="c8")
    c2 = _review_commit([_one_line_edit("b/Y.java", "int x = OLD;", "int x = NEW;")], cid="c9")
    remarks = extract_remarks([c1, c2])
    assert len(remarks) == 2
    assert all(r.merged_count == 1 for r in remarks)


def test_binary_and_rename_sites_are_not_merged_or_flagged():
    changes = [
        FileChange(path_old="a.bin", path_new="a.bin", change_type="MODIFY", binary=True),
        FileChange(path_old="b.bin", path_new="b.bin", change_type="MODIFY", binary=True),
    ]
    remarks = extract_remarks([_review_commit(changes)])
    assert len(remarks) == 2
    assert all(r.merged_count == 1 for r in remarks)


def test_remark_ids_deterministic_and_ordered():
    sim = RepoSim()
    sim.commit("T-1", [("add", "a.java", ["one", "two", "three"])], ts=10)
    sim.commit(
        "T-1",
        [("edit", "a.java", ["ONE", "two", "THREE"])],
        ts=210,
    )
    ds = sim.dataset(review_split_events("T-1", 100, 200))
    remarks = ds.tickets["T-1"].remarks
    assert [r.remark_id for r in remarks] == ["c001:r0", "c001:r1"]
