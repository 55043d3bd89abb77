from remark_miner.scopes import (
    BRACE_STRUCTURED,
    FILE,
    LINE_RANGE,
    MARKUP,
    PLAIN,
    STRUCTURAL,
    Scope,
    build_scope_tree,
    expand,
    file_kind_for_path,
)

JAVA_FIXTURE = """\
package demo;

public class Widget {
    private int size;

    public int grow(int amount) {
        if (amount > 0) {
            for (int i = 0; i < amount; i++) {
                size += 1;
            }
        }
        return size;
    }
}
"""


def test_file_kind_mapping():
    assert file_kind_for_path("src/A.java") == BRACE_STRUCTURED
    assert file_kind_for_path("ui/app.ts") == BRACE_STRUCTURED
    assert file_kind_for_path("conf/schema.xsd") == MARKUP
    assert file_kind_for_path("notes.txt") == PLAIN
    assert file_kind_for_path("Makefile") == PLAIN


def test_single_line_nesting():
    tree = build_scope_tree("class A { void f() { if(x){y();} } }\n", BRACE_STRUCTURED)
    cls = tree.root.children[0]
    assert cls.kind == "CLASS" and cls.line_range == (1, 1)
    method = cls.children[0]
    assert method.kind == "METHOD" and method.line_range == (1, 1)
    block = method.children[0]
    assert block.kind == "BLOCK" and block.line_range == (1, 1)


def test_java_fixture_tree_shape():
    tree = build_scope_tree(JAVA_FIXTURE, BRACE_STRUCTURED)
    cls = tree.root.children[0]
    assert cls.kind == "CLASS" and cls.line_range == (3, 14)
    method = cls.children[0]
    assert method.kind == "METHOD" and method.line_range == (6, 13)
    if_block = method.children[0]
    assert if_block.line_range == (7, 11)
    for_block = if_block.children[0]
    assert for_block.line_range == (8, 10)


def test_empty_file_has_zero_span_root():
    tree = build_scope_tree("", BRACE_STRUCTURED)
    assert tree.root.line_range == (1, 0)
    assert tree.root.children == []


def test_braces_inside_literals_and_comments_ignored():
    content = 's = "{"\n// {\n/* { */\nc = \'{\'\n'
    tree = build_scope_tree(content, BRACE_STRUCTURED)
    assert tree.root.children == []
    assert not tree.degraded


def test_unbalanced_degrades_to_plain():
    tree = build_scope_tree("class A {\n", BRACE_STRUCTURED)
    assert tree.degraded
    assert tree.root.children == []


def test_markup_nesting():
    xml = "<a>\n  <b>\n    <c/>\n  </b>\n  <!-- <ignored> -->\n</a>\n"
    tree = build_scope_tree(xml, MARKUP)
    a = tree.root.children[0]
    assert a.line_range == (1, 6)
    b = a.children[0]
    assert b.line_range == (2, 4)
    assert b.children == []  # self-closing <c/> opens no scope


def test_expand_walks_block_chain():
    tree = build_scope_tree(JAVA_FIXTURE, BRACE_STRUCTURED)
    scope = Scope(LINE_RANGE, file="Widget.java", line_range=(9, 9), at_commit="c")
    chain = []
    while scope is not None:
        scope = expand(scope, tree)
        if scope is not None:
            chain.append((scope.variant, scope.line_range))
    assert chain == [
        (STRUCTURAL, (8, 10)),  # for block
        (STRUCTURAL, (7, 11)),  # if block
        (STRUCTURAL, (6, 13)),  # method
        (STRUCTURAL, (3, 14)),  # class
        (FILE, None),
    ]


def test_expand_plain_goes_straight_to_file():
    tree = build_scope_tree("one\ntwo\nthree\n", PLAIN)
    scope = Scope(LINE_RANGE, file="notes.txt", line_range=(2, 2), at_commit="c")
    widened = expand(scope, tree)
    assert widened.variant == FILE
    assert expand(widened, tree) is None


def test_expansion_chain_strictly_grows_and_terminates():
    tree = build_scope_tree(JAVA_FIXTURE, BRACE_STRUCTURED)
    depth = tree.depth()
    for line in range(1, 15):
        scope = Scope(LINE_RANGE, file="f.java", line_range=(line, line), at_commit="c")
        spans = [1]
        steps = 0
        while scope is not None:
            scope = expand(scope, tree)
            steps += 1
            if scope is not None and scope.line_range is not None:
                lo, hi = scope.line_range
                assert hi - lo + 1 > spans[-1]
                spans.append(hi - lo + 1)
        assert steps <= depth + 1


def test_every_line_has_one_innermost_scope():
    from remark_miner.scopes import innermost_scope

    tree = build_scope_tree(JAVA_FIXTURE, BRACE_STRUCTURED)

    def covering(node, line, acc):
        for child in node.children:
            if child.line_range[0] <= line <= child.line_range[1]:
                acc.append(child)
                covering(child, line, acc)
        return acc

    for line in range(1, 15):
        nodes = covering(tree.root, line, [])
        hit = innermost_scope(tree, line)
        if nodes:
            assert hit is nodes[-1]
        else:
            assert hit is None


def test_rebuild_is_deterministic():
    t1 = build_scope_tree(JAVA_FIXTURE, BRACE_STRUCTURED)
    t2 = build_scope_tree(JAVA_FIXTURE, BRACE_STRUCTURED)

    def spans(node):
        return (node.kind, node.line_range, tuple(spans(c) for c in node.children))

    assert spans(t1.root) == spans(t2.root)
