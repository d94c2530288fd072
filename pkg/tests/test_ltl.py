import pytest

from ltlcompose.errors import LtlSyntaxError, NegationError, UndeclaredAtomError
from ltlcompose.ltl import (Always, And, Atom, Eventually, NotAtom, Or, Top, Until, atoms,
                            eval_ltl_on_lasso, parse_ltl, size, to_text)

a, b, c = Atom("a"), Atom("b"), Atom("c")


@pytest.mark.parametrize("text, expected", [
    ("a", a),
    ("true", Top()),
    ("!a", NotAtom("a")),
    ("F a", Eventually(a)),
    ("G F a", Always(Eventually(a))),
    ("a U b U c", Until(a, Until(b, c))),
    ("a & b | c", Or(And(a, b), c)),
    ("a | b & c", Or(a, And(b, c))),
    ("F a & G b", And(Eventually(a), Always(b))),
    ("!a U b & c", And(Until(NotAtom("a"), b), c)),
    ("F (b & !square) & F p", And(Eventually(And(b, NotAtom("square"))), Eventually(Atom("p")))),
    ("  ( a )  ", a),
])
def test_parse(text, expected):
    assert parse_ltl(text) == expected


def test_negation_of_a_compound_formula_is_rejected():
    with pytest.raises(NegationError):
        parse_ltl("!(a & b)")
    with pytest.raises(NegationError):
        parse_ltl("!F a")


def test_undeclared_atom():
    with pytest.raises(UndeclaredAtomError) as err:
        parse_ltl("F ghost", atoms={"a", "b"})
    assert err.value.position == 2


@pytest.mark.parametrize("text", ["", "a &", "(a", "a b", "a $ b", "F", "U a"])
def test_syntax_errors(text):
    with pytest.raises(LtlSyntaxError):
        parse_ltl(text)


def test_error_position():
    with pytest.raises(LtlSyntaxError) as err:
        parse_ltl("a $ b")
    assert err.value.position == 2


def test_printer_round_trips():
    for text in ["F a", "G F a & G F b", "(a U b) U c", "!a U (b | c)", "F (b & !square)", "true"]:
        formula = parse_ltl(text)
        assert parse_ltl(to_text(formula)) == formula
    assert to_text(parse_ltl("a U b & c")) == "((a U b) & c)"


def test_atoms_and_size():
    formula = parse_ltl("F (b & !square) & F p")
    assert atoms(formula) == {"b", "square", "p"}
    assert size(formula) == 7
    assert atoms(Top()) == frozenset()


@pytest.mark.parametrize("text, prefix, cycle, expected", [
    ("F a", [set()], [{"a"}], True),
    ("F a", [{"a"}], [set()], True),
    ("F a", [], [set()], False),
    ("G a", [], [{"a"}, set()], False),
    ("G a", [{"a"}], [{"a"}], True),
    ("G F a", [{"a"}], [set()], False),
    ("G F a", [], [set(), {"a"}], True),
    ("F G a", [set(), set()], [{"a"}], True),
    ("a U b", [{"a"}, {"a"}], [{"b"}], True),
    ("a U b", [{"a"}, set()], [{"b"}], False),
    ("!a U b", [{"b", "a"}], [set()], True),
    ("true", [], [set()], True),
])
def test_lasso_semantics(text, prefix, cycle, expected):
    assert eval_ltl_on_lasso(parse_ltl(text), prefix, cycle) is expected


def test_empty_cycle_is_rejected():
    with pytest.raises(ValueError):
        eval_ltl_on_lasso(a, [{"a"}], [])
