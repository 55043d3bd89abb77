"""Shared ruleset texts for tests.

REFERENCE_RULESET is the published production ruleset from a real mining
session; its thresholds double as a fidelity check for the parser and
canonical printer.
"""

REFERENCE_RULESET = """\
skip when one of
  (changetype == 'DELETE')
  or (isNodeModules == 'true')
  or (packageAndImportOnly == 'true')
  or (whitespaceOnly == 'true')
  or (changeInHunkSize >= -0.5 and hunkCountInFile >= 147.5)
  or (filetype == 'jav')
  or (binary == 'true')
  or (fileCountInCommit >= 55.5 and hunkCountInCommit >= 2560.0)
  or (fileCountInCommit >= 274.0)
  or (fileCountInCommit >= 11.5 and srcdir == 'testdata')
  or (gitSimilarity >= 98.5)
  or (project == 'UnitTestRunner')
  or (project == 'TestPlugins')
  or (commitsSinceLastRemarkInFile >= 78.0)
  or (newLineCountInFile >= 12170.0)
  or (entropyCbMed <= 0.0919)
  or (visibilityChangeOnly == 'true')
"""

REFERENCE_THRESHOLDS = {
    -0.5, 147.5, 55.5, 2560.0, 274.0, 11.5, 98.5, 78.0, 12170.0, 0.0919,
}
