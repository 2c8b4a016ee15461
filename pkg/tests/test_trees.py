import pytest

from stmtsim.trees import OperatorTree, from_json, leaf, node, tree_size


def test_slot_law_enforced_on_construction():
    with pytest.raises(ValueError):
        OperatorTree("+", (leaf("a"),))  # children without the suffix
    with pytest.raises(ValueError):
        OperatorTree("+<SLOT>")  # suffix without children
    with pytest.raises(ValueError):
        OperatorTree("")


def test_sizes():
    assert tree_size(leaf("a")) == 1
    assert tree_size(node("+", [leaf("a"), leaf("b")])) == 3
    assert tree_size(node("+", [leaf("a"), node("*", [leaf("b"), leaf("c")])])) == 5


def test_structural_equality_and_hash():
    a = node("+", [leaf("a"), leaf("b")])
    b = node("+", [leaf("a"), leaf("b")])
    assert a == b and hash(a) == hash(b)
    assert a != node("+", [leaf("b"), leaf("a")])


def test_render_is_injective_for_awkward_labels():
    tricky = OperatorTree('has "quotes" and (parens)<SLOT>', (leaf("a b"),))
    again = from_json(tricky.to_json())
    assert again == tricky
    assert again.render() == tricky.render()


def test_paths_preorder():
    t = node("+", [leaf("a"), node("*", [leaf("b"), leaf("c")])])
    assert list(t.paths()) == [(), (0,), (1,), (1, 0), (1, 1)]
    assert t.at((1, 0)).label == "b"


def test_replace_at():
    t = node("+", [leaf("a"), leaf("b")])
    replaced = t.replace_at((1,), leaf("z"))
    assert replaced.render() == "(+ a z)"
    assert t.render() == "(+ a b)"  # original untouched


def test_canonical_json_is_byte_stable():
    t = node("∀", [leaf("x"), leaf("ℝ"), leaf("x")])
    assert t.to_json() == t.to_json()
    assert '"label":"∀<SLOT>"' in t.to_json()


def test_from_json_validates():
    with pytest.raises(ValueError):
        from_json('{"label": "+<SLOT>", "children": []}')
    with pytest.raises(ValueError):
        from_json('{"children": []}')
    with pytest.raises(ValueError):
        from_json('{"label": 3, "children": []}')
