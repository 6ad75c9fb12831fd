import pytest

from grouporder.attacks import attack_suite
from grouporder.errors import WitnessFormatError
from grouporder.protocol import HOMTEST, PRESENTATION, order_prove
from grouporder.witness_io import format_lower, format_upper, parse_lower, parse_upper

from conftest import corpus_group


@pytest.mark.parametrize("name", ["trivial", "z6", "s4", "s5", "a5xz2", "gl3_2"])
@pytest.mark.parametrize("route", [PRESENTATION, HOMTEST])
def test_round_trip(name, route):
    G = corpus_group(name)
    claim = order_prove(G.generators, G, route=route)
    assert parse_lower(format_lower(claim.m, claim.lower)) == (claim.m, claim.lower)
    assert parse_upper(format_upper(claim.m, claim.upper)) == (claim.m, claim.upper)


def test_round_trip_forged_presentation():
    G = corpus_group("s5")
    att = attack_suite("wrong-name", G.generators, G)
    assert parse_upper(format_upper(att.m, att.upper)) == (att.m, att.upper)


def test_malformed_inputs():
    G = corpus_group("s4")
    claim = order_prove(G.generators, G)
    text = format_upper(claim.m, claim.upper)
    with pytest.raises(WitnessFormatError):
        parse_upper(text.replace("grouporder-witness upper 1", "something else"))
    with pytest.raises(WitnessFormatError):
        parse_upper(text[: len(text) // 2])
    with pytest.raises(WitnessFormatError):
        parse_upper(text + "extra line\n")
    with pytest.raises(WitnessFormatError):
        parse_lower("grouporder-witness lower 1\nm x\n")
    with pytest.raises(WitnessFormatError):
        parse_lower(format_upper(claim.m, claim.upper))
