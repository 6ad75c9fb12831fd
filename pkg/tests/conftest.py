import random
from importlib import resources

import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from grouporder.groups import PermGroup, load_group_spec, parse_group_spec

CORPUS = sorted(p.name[:-4] for p in resources.files("grouporder").joinpath("data", "groups").iterdir()
                if p.name.endswith(".grp"))


def corpus_group(name):
    with resources.as_file(resources.files("grouporder").joinpath("data", "groups", f"{name}.grp")) as p:
        return load_group_spec(p)


def perm(degree, *cycles):
    return parse_group_spec(f"kind perm\ndegree {degree}\n" + "".join(f"gen {c}\n" for c in cycles))


def code(G, cycles):
    """Code of a cycle-notation permutation in the perm handle G."""
    H = perm(G.degree, cycles)
    return H.generators[0]


def sym(G, c):
    return Permutation(G.images(c))


def sym_group(G, gens=None):
    gens = G.generators if gens is None else gens
    if not gens:
        return PermutationGroup([Permutation(list(range(G.degree)))])
    return PermutationGroup([sym(G, g) for g in gens])


def bfs(G, gens):
    """Plain breadth-first closure, independent of the library's closure routine."""
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(params=CORPUS)
def corpus(request):
    return request.param, corpus_group(request.param)


def is_perm(G):
    return isinstance(G, PermGroup)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
