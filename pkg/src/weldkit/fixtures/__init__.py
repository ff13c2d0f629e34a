"""Built-in example links: Hopf pair, Borromean rings, Hughes-style pair."""

from __future__ import annotations

import json
from importlib import resources

from ..diagram import BraidWord, GaussDiagram, from_braid_closure, parse_braid_word, parse_gauss_code

HOPF_POSITIVE_CODE = "t1 h2+ / h1+ t2"
HOPF_NEGATIVE_CODE = "t1 h2- / h1- t2"
BORROMEAN_BRAID = ("s2^-1 s1 s2^-1 s1 s2^-1 s1", 3)


class FixtureError(RuntimeError):
    pass


def hopf(sign: int = 1) -> GaussDiagram:
    return parse_gauss_code(HOPF_POSITIVE_CODE if sign > 0 else HOPF_NEGATIVE_CODE)


def borromean() -> GaussDiagram:
    word, strands = BORROMEAN_BRAID
    return from_braid_closure(parse_braid_word(word, strands))


def hughes_fixture() -> dict:
    data = json.loads(resources.files(__package__).joinpath("hughes.json").read_text())
    if data.get("schema") != "weldkit.fixtures.hughes/1":
        raise FixtureError("unrecognized hughes fixture schema")
    return data


def hughes_braids() -> tuple[BraidWord, BraidWord, dict]:
    """The packaged pair; raises loudly when the fixture is marked unverified."""
    data = hughes_fixture()
    if not data.get("verified"):
        raise FixtureError(
            "hughes fixture is marked unverified; refusing to run the demo "
            "(see fixtures/README.md)")
    s = data["strands"]
    return (parse_braid_word(data["h1_word"], s),
            parse_braid_word(data["h2_word"], s), data)


def hughes_pair() -> tuple[GaussDiagram, GaussDiagram, dict]:
    b1, b2, data = hughes_braids()
    return from_braid_closure(b1), from_braid_closure(b2), data
