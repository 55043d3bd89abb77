"""Nested scope structure of file versions, used to widen trigger searches.

A brace-structured file yields FILE > CLASS > METHOD > BLOCK nesting (labels
come from nesting depth alone; they only order the expansion chain). Markup
files nest by element. Anything else gets a root-only tree, so a line scope
expands straight to the file scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

BRACE_STRUCTURED = "BRACE_STRUCTURED"
MARKUP = "MARKUP"
PLAIN = "PLAIN"

LINE_RANGE = "LINE_RANGE"
STRUCTURAL = "STRUCTURAL"
FILE = "FILE"
WHOLE_TICKET = "WHOLE_TICKET"

# How far along the expansion chain a trace had to go; used for statistics.
SCOPE_ORDER = {LINE_RANGE: 0, STRUCTURAL: 1, FILE: 2, WHOLE_TICKET: 3}

_BRACE_EXTENSIONS = {"java", "ts", "js", "c", "h", "cpp", "cs", "go"}
_MARKUP_EXTENSIONS = {"xml", "xsd", "html", "xhtml"}

_DEPTH_KINDS = {1: "CLASS", 2: "METHOD"}


def file_kind_for_path(path: str) -> str:
    basename = path.rsplit("/", 1)[-1]
    ext = basename.rsplit(".", 1)[-1].lower() if "." in basename else ""
    if ext in _BRACE_EXTENSIONS:
        return BRACE_STRUCTURED
    if ext in _MARKUP_EXTENSIONS:
        return MARKUP
    return PLAIN


@dataclass
class ScopeNode:
    kind: str  # FILE / CLASS / METHOD / BLOCK / ELEMENT
    line_range: tuple[int, int]
    children: list["ScopeNode"] = field(default_factory=list)


@dataclass
class ScopeTree:
    file_kind: str
    root: ScopeNode
    degraded: bool = False  # unbalanced structure fell back to a plain tree

    def depth(self) -> int:
        def walk(node):
            return 1 + max((walk(c) for c in node.children), default=0)

        return walk(self.root)


@dataclass(frozen=True)
class Scope:
    variant: str
    file: str | None = None
    line_range: tuple[int, int] | None = None
    at_commit: str | None = None

    def __post_init__(self):
        if self.variant in (LINE_RANGE, STRUCTURAL):
            if not self.line_range or self.line_range[0] > self.line_range[1]:
                raise ValueError("range scopes need a non-empty line range")
        if self.variant == WHOLE_TICKET and self.file is not None:
            raise ValueError("whole-ticket scope carries no file")


def build_scope_tree(content: str, file_kind: str) -> ScopeTree:
    lines = content.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    line_count = len(lines)
    root = ScopeNode("FILE", (1, line_count))
    if file_kind == BRACE_STRUCTURED:
        children, balanced = _parse_braces(content)
    elif file_kind == MARKUP:
        children, balanced = _parse_markup(content)
    else:
        return ScopeTree(PLAIN, root)
    if not balanced:
        return ScopeTree(file_kind, root, degraded=True)
    root.children = children
    return ScopeTree(file_kind, root)


def _parse_braces(content: str):
    """Tolerant single-pass brace matcher, skipping literals and comments."""
    roots: list[ScopeNode] = []
    stack: list[ScopeNode] = []
    line = 1
    i = 0
    n = len(content)
    state = "code"
    quote = ""
    while i < n:
        ch = content[i]
        nxt = content[i + 1] if i + 1 < n else ""
        if ch == "\n":
            line += 1
            if state == "line_comment":
                state = "code"
            i += 1
            continue
        if state == "code":
            if ch == "/" and nxt == "/":
                state = "line_comment"
                i += 2
                continue
            if ch == "/" and nxt == "*":
                state = "block_comment"
                i += 2
                continue
            if ch in ("'", '"'):
                state = "string"
                quote = ch
            elif ch == "{":
                depth = len(stack) + 1
                node = ScopeNode(_DEPTH_KINDS.get(depth, "BLOCK"), (line, line))
                (stack[-1].children if stack else roots).append(node)
                stack.append(node)
            elif ch == "}":
                if not stack:
                    return [], False
                node = stack.pop()
                node.line_range = (node.line_range[0], line)
        elif state == "string":
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                state = "code"
        elif state == "block_comment":
            if ch == "*" and nxt == "/":
                state = "code"
                i += 2
                continue
        i += 1
    return (roots, False) if stack else (roots, True)


def _parse_markup(content: str):
    """Element nesting by tag matching; ignores comments, decls, self-closers."""
    tag_re = re.compile(r"<(!--|[!?/]?)\s*([A-Za-z_][\w.:-]*)?")
    roots: list[ScopeNode] = []
    stack: list[tuple[str, ScopeNode]] = []
    line = 1
    i = 0
    n = len(content)
    while i < n:
        ch = content[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch != "<":
            i += 1
            continue
        if content.startswith("<!--", i):
            end = content.find("-->", i)
            end = n if end < 0 else end + 3
            line += content.count("\n", i, end)
            i = end
            continue
        m = tag_re.match(content, i)
        if not m or not m.group(2) or m.group(1) in ("!", "?"):
            i += 1
            continue
        close = content.find(">", i)
        if close < 0:
            return [], False
        end_line = line + content.count("\n", i, close)
        if m.group(1) == "/":
            if not stack or stack[-1][0] != m.group(2):
                return [], False
            _, node = stack.pop()
            node.line_range = (node.line_range[0], end_line)
        elif content[close - 1] != "/":
            node = ScopeNode("ELEMENT", (line, line))
            (stack[-1][1].children if stack else roots).append(node)
            stack.append((m.group(2), node))
        line = end_line
        i = close + 1
    return (roots, False) if stack else (roots, True)


def innermost_scope(tree: ScopeTree, line: int):
    """The deepest node covering `line`, or None when only the root covers it."""
    node = None
    candidates = tree.root.children
    while candidates:
        hit = next(
            (c for c in candidates if c.line_range[0] <= line <= c.line_range[1]), None
        )
        if hit is None:
            break
        node = hit
        candidates = hit.children
    return node


def expand(scope: Scope, tree: ScopeTree) -> Scope | None:
    """The smallest enclosing scope strictly larger than `scope`.

    FILE expands to None (callers fall back to the whole ticket). Plain or
    degraded trees take line scopes straight to the file scope.
    """
    if scope.variant == FILE:
        return None
    if scope.variant == WHOLE_TICKET:
        raise ValueError("whole-ticket scope cannot be expanded")
    lo, hi = scope.line_range
    best = None
    frontier = tree.root.children
    while frontier:
        hit = next(
            (c for c in frontier if c.line_range[0] <= lo and hi <= c.line_range[1]),
            None,
        )
        if hit is None:
            break
        if hit.line_range != (lo, hi):
            best = hit
        frontier = hit.children
    if best is None:
        return Scope(FILE, file=scope.file, at_commit=scope.at_commit)
    return Scope(
        STRUCTURAL, file=scope.file, line_range=best.line_range, at_commit=scope.at_commit
    )
