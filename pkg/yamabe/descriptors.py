"""Command-line geometry descriptors.

Grammar (prefix, parentheses optional around any descriptor)::

    DESC := sphere M N [SCALE] | torus M N | product DESC DESC | file PATH | ( DESC )

``file -`` reads a ManifoldSpec JSON document from stdin.
"""

import re
import sys
from dataclasses import dataclass

from yamabe.discrete import DiscreteManifold, flat_torus, loads_spec, product, read_spec, sphere_latitude
from yamabe.errors import DescriptorError
from yamabe.invariants import sphere_product_einstein_hilbert, sphere_yamabe

TOKEN = re.compile(r'[()]|[^\s()]+')


@dataclass(frozen=True)
class Geometry:
    """A parsed descriptor with whatever closed-form reference data it carries.

    ``mu_reference`` is the continuum Yamabe constant of the factor when known
    (round spheres, flat tori). ``sphere`` is (m, scale) for sphere descriptors.
    """

    manifold: DiscreteManifold
    descriptor: str
    mu_reference: float | None = None
    sphere: tuple[int, float] | None = None
    factors: tuple['Geometry', 'Geometry'] | None = None

    @property
    def is_product(self) -> bool:
        return self.factors is not None

    def upper_reference(self) -> float | None:
        """Constant-field Einstein-Hilbert value of a sphere x sphere product, else None."""
        if self.factors is None:
            return None
        left, right = self.factors
        if left.sphere is None or right.sphere is None:
            return None
        (v, scale_v), (w, scale_w) = left.sphere, right.sphere
        return sphere_product_einstein_hilbert(v, w, scale_w, scale_v=scale_v)


def tokenize(text: str) -> list[str]:
    return TOKEN.findall(text)


def _integer(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise DescriptorError(f"{what} must be an integer, got {token!r}") from None


def _real(token: str, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise DescriptorError(f"{what} must be a number, got {token!r}") from None


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


class _Parser:
    def __init__(self, tokens: list[str], stdin=None):
        self.tokens = tokens
        self.pos = 0
        self.stdin = stdin

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, what: str) -> str:
        token = self.peek()
        if token is None:
            raise DescriptorError(f"descriptor ended early: expected {what}")
        self.pos += 1
        return token

    def parse(self) -> Geometry:
        head = self.take("a descriptor")
        if head == '(':
            geometry = self.parse()
            if self.take("')'") != ')':
                raise DescriptorError(f"expected ')' at token {self.pos}")
            return geometry
        if head == 'sphere':
            m = _integer(self.take("sphere dimension M"), "sphere dimension M")
            n = _integer(self.take("sphere cell count N"), "sphere cell count N")
            scale = 1.0
            if self.peek() is not None and _is_number(self.peek()):
                scale = _real(self.take("sphere scale"), "sphere scale")
            manifold = sphere_latitude(m, n, scale)
            return Geometry(manifold, f"sphere {m} {n} {scale!r}", mu_reference=_sphere_reference(m),
                            sphere=(m, scale))
        if head == 'torus':
            m = _integer(self.take("torus dimension M"), "torus dimension M")
            n = _integer(self.take("torus points per axis N"), "torus points per axis N")
            return Geometry(flat_torus(m, n), f"torus {m} {n}", mu_reference=0.0)
        if head == 'product':
            left = self.parse()
            right = self.parse()
            return Geometry(product(left.manifold, right.manifold),
                            f"product ({left.descriptor}) ({right.descriptor})",
                            factors=(left, right))
        if head == 'file':
            path = self.take("file PATH")
            if path == '-':
                stream = self.stdin if self.stdin is not None else sys.stdin
                manifold = loads_spec(stream.read())
            else:
                manifold = read_spec(path)
            return Geometry(manifold, f"file {path}")
        raise DescriptorError(f"unknown descriptor {head!r} (expected sphere, torus, product or file)")


def _sphere_reference(m: int) -> float | None:
    return sphere_yamabe(m) if m >= 3 else None


def parse_descriptor(text: str | list[str], stdin=None) -> Geometry:
    """Parse a descriptor given as one string or as already split argv words."""
    if not isinstance(text, str):
        text = ' '.join(text)
    tokens = tokenize(text)
    if not tokens:
        raise DescriptorError("empty geometry descriptor")
    parser = _Parser(tokens, stdin=stdin)
    geometry = parser.parse()
    if parser.peek() is not None:
        raise DescriptorError(f"unexpected trailing tokens: {' '.join(tokens[parser.pos:])}")
    return geometry
