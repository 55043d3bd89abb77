"""Repository mining for code-review remark triggers and skip-rule mining."""

__version__ = "0.1.0"
