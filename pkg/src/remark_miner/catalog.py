"""The change-part feature catalog: 52 features, their kinds, and helpers.

The catalog is a fixed contract: rule parsing validates against it and the
feature extractor must emit exactly these names. Renaming a feature is a
breaking change.
"""

from __future__ import annotations

NUMERIC = "numeric"
CATEGORICAL = "categorical"
BOOLEAN = "boolean"

_ENTROPY_STATS = ("Max", "UppQuar", "Med", "Sum", "Avg")

FEATURE_KINDS: dict[str, str] = {
    # ticket and commit granularity
    "issueType": CATEGORICAL,
    "author": CATEGORICAL,
    "authorDay": CATEGORICAL,
    "shiftedAuthorHour": NUMERIC,
    "fileCountInCommit": NUMERIC,
    "hunkCountInCommit": NUMERIC,
    "commitContainsTest": BOOLEAN,
    # file granularity
    "binary": BOOLEAN,
    "filetype": CATEGORICAL,
    "srcdir": CATEGORICAL,
    "project": CATEGORICAL,
    "frequentFilename": CATEGORICAL,
    "fileAgeDays": NUMERIC,
    "fileCommitCount": NUMERIC,
    "distinctFileAuthorCount": NUMERIC,
    "newLineCountInFile": NUMERIC,
    "recentProjectOwnership": NUMERIC,
    "commitsSinceLastRemarkForAuthorInProject": NUMERIC,
    "commitsSinceLastRemarkInFile": NUMERIC,
    "hunkCountInFile": NUMERIC,
    "changetype": CATEGORICAL,
    "gitSimilarity": NUMERIC,
    "newShareOfLinesInFile": NUMERIC,
    "isNodeModules": BOOLEAN,
    # change part granularity
    "oldHunkSize": NUMERIC,
    "newHunkSize": NUMERIC,
    "changeInHunkSize": NUMERIC,
    "commentLineCountOld": NUMERIC,
    "commentLineCountNew": NUMERIC,
    "changeInCommentLineCount": NUMERIC,
    "oldBlockCount": NUMERIC,
    "newBlockCount": NUMERIC,
    "changeInBlockCount": NUMERIC,
    "responseForHunkOld": NUMERIC,
    "responseForHunkNew": NUMERIC,
    "changeInResponseForHunk": NUMERIC,
    "whitespaceOnly": BOOLEAN,
    "packageAndImportOnly": BOOLEAN,
    "finalChangeOnly": BOOLEAN,
    "nonnlsChangeOnly": BOOLEAN,
    "visibilityChangeOnly": BOOLEAN,
    "overrideAnnotation": CATEGORICAL,
}
FEATURE_KINDS.update({f"entropyCb{s}": NUMERIC for s in _ENTROPY_STATS})
FEATURE_KINDS.update({f"entropyRe{s}": NUMERIC for s in _ENTROPY_STATS})

FEATURE_NAMES: tuple[str, ...] = tuple(FEATURE_KINDS)

assert len(FEATURE_NAMES) == 52


def is_numeric(feature: str) -> bool:
    return FEATURE_KINDS[feature] == NUMERIC


def feature_kind(feature: str) -> str:
    return FEATURE_KINDS[feature]
