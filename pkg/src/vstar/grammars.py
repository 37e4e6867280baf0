"""Reference grammars used as oracles in tests and experiments."""
from __future__ import annotations

from dataclasses import dataclass

from .vpg import Vpg, parse_grammar

FIG1 = """
L -> <"a" A "b"> L | "c" B | ε
A -> <"g" L "h"> E
B -> "d" L
E -> ε
"""

DYCK1 = """
L -> <"a" L "b"> L | ε
"""

DYCK2 = """
L -> <"(" L ")"> L | <"[" L "]"> L | ε
"""

TOY_XML = """
L -> <"<p>" L "</p>"> E | [a-z] T
T -> [a-z] T | ε
E -> ε
"""

MINI_JSON = """
J -> <"{" O "}"> E | <"[" A "]"> E
O -> ε | "k" C
C -> ":" V
V -> <"{" O "}"> OT | <"[" A "]"> OT | "1" OT
OT -> ε | "," OK
OK -> "k" C
A -> ε | <"{" O "}"> AT | <"[" A "]"> AT | "1" AT
AT -> ε | "," AV
AV -> <"{" O "}"> AT | <"[" A "]"> AT | "1" AT
E -> ε
"""

MINI_LISP = """
L -> <"(" I ")"> E
I -> ε | "a" AR | <"(" I ")"> LR
AR -> "a" AR | " " I2 | ε
LR -> " " I2 | ε
I2 -> "a" AR | <"(" I ")"> LR
E -> ε
"""

MINI_XML = """
X -> <"<a>" C "</a>"> E | <"<b>" C "</b>"> E
C -> ε | "x" C | <"<a>" C "</a>"> C | <"<b>" C "</b>"> C
E -> ε
"""


@dataclass(frozen=True)
class Fixture:
    name: str
    text: str
    mode: str  # "char" or "token"

    def grammar(self) -> Vpg:
        return parse_grammar(self.text)


FIXTURES = {
    "fig1": Fixture("fig1", FIG1, "char"),
    "dyck1": Fixture("dyck1", DYCK1, "char"),
    "dyck2": Fixture("dyck2", DYCK2, "char"),
    "toy-xml": Fixture("toy-xml", TOY_XML, "token"),
    "mini-json": Fixture("mini-json", MINI_JSON, "char"),
    "mini-lisp": Fixture("mini-lisp", MINI_LISP, "char"),
    "mini-xml": Fixture("mini-xml", MINI_XML, "token"),
}


def fixture(name: str) -> Vpg:
    return FIXTURES[name].grammar()
