"""Graphviz renderings of the pipeline artifacts, produced as lines of text.

Use like so::

    with open("ts.dot", "w") as f:
        f.writelines(ts_dot(ts))
"""

from ltlcompose.buchi import BuchiAutomaton
from ltlcompose.product import ProductAutomaton
from ltlcompose.tsys import TransitionSystem, sort_label


def _gvquote(s):
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r'\"'))


def _set(items):
    return "{" + ",".join(sort_label(items)) + "}"


def ts_dot(ts: TransitionSystem):
    yield "digraph ts {\n"
    yield "  rankdir=LR;\n"
    for s in ts.states:
        shape = "doublecircle" if s.id == ts.initial else "circle"
        yield "  {} [shape={} xlabel={}];\n".format(_gvquote(s.id), shape, _gvquote(_set(s.label)))
    for src, dst in ts.edges():
        yield "  {} -> {} [label={}];\n".format(
            _gvquote(src), _gvquote(dst), _gvquote(",".join(sort_label(ts.transitions[(src, dst)]))))
    yield "}\n"


def buchi_dot(aut: BuchiAutomaton):
    yield "digraph buchi {\n"
    yield "  rankdir=LR;\n"
    yield '  "__start" [shape=point];\n'
    for q in aut.states:
        shape = "doublecircle" if q in aut.accepting else "circle"
        yield "  {} [shape={}];\n".format(_gvquote(q), shape)
    yield '  "__start" -> {};\n'.format(_gvquote(aut.initial))
    for src, guard, dst in aut.transitions:
        yield "  {} -> {} [label={}];\n".format(_gvquote(src), _gvquote(dst), _gvquote(str(guard)))
    yield "}\n"


def product_dot(pa: ProductAutomaton):
    def name(p):
        return _gvquote(f"{p[0]},{p[1]}")

    yield "digraph product {\n"
    yield "  rankdir=LR;\n"
    yield '  "__start" [shape=point];\n'
    for p in pa.states:
        shape = "doublecircle" if p in pa.accepting else "circle"
        yield "  {} [shape={}];\n".format(name(p), shape)
    for p in pa.initial:
        yield '  "__start" -> {};\n'.format(name(p))
    for p in pa.states:
        for sym, q in pa.transitions[p]:
            yield "  {} -> {} [label={}];\n".format(name(p), name(q), _gvquote(sym))
    yield "}\n"
