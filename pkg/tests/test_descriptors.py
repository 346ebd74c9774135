"""Tests for command-line geometry descriptors.

Target: yamabe/descriptors.py
"""

from io import StringIO

import pytest

from yamabe.descriptors import parse_descriptor, tokenize
from yamabe.discrete import dumps_spec
from yamabe.errors import DescriptorError, DomainError, SpecError
from yamabe.invariants import sphere_product_einstein_hilbert, sphere_yamabe

pytestmark = pytest.mark.unit


class TestTokenize:
    def test_parentheses_split(self):
        assert tokenize("product (sphere 3 16)(torus 3 4)") == [
            'product', '(', 'sphere', '3', '16', ')', '(', 'torus', '3', '4', ')',
        ]

    def test_whitespace_only(self):
        assert tokenize("  \t ") == []


class TestSphereAndTorus:
    def test_sphere(self):
        geometry = parse_descriptor("sphere 3 16")
        assert geometry.manifold.n_vertices == 16
        assert geometry.manifold.dim == 3
        assert geometry.mu_reference == sphere_yamabe(3)
        assert geometry.sphere == (3, 1.0)
        assert not geometry.is_product

    def test_sphere_scale(self):
        geometry = parse_descriptor("sphere 4 16 2.5")
        assert geometry.sphere == (4, 2.5)
        assert geometry.descriptor == "sphere 4 16 2.5"

    def test_low_dimensional_sphere_has_no_reference(self):
        assert parse_descriptor("sphere 2 16").mu_reference is None

    def test_torus(self):
        geometry = parse_descriptor("torus 3 4")
        assert geometry.manifold.n_vertices == 64
        assert geometry.mu_reference == 0.0
        assert geometry.sphere is None

    def test_argv_words(self):
        assert parse_descriptor(['sphere', '3', '16']).descriptor == parse_descriptor("sphere 3 16").descriptor

    def test_constructor_errors_pass_through(self):
        with pytest.raises(DomainError):
            parse_descriptor("sphere 3 4")


class TestProduct:
    def test_sphere_product(self):
        geometry = parse_descriptor("product (sphere 3 16) (sphere 3 16)")
        assert geometry.is_product
        assert geometry.manifold.n_vertices == 256
        assert geometry.manifold.dim == 6
        assert geometry.mu_reference is None
        assert geometry.upper_reference() == pytest.approx(sphere_product_einstein_hilbert(3, 3, 1.0))

    def test_parentheses_optional(self):
        assert parse_descriptor("product sphere 3 16 torus 3 2").manifold.n_vertices == 16 * 8

    def test_scaled_factors_reach_reference(self):
        geometry = parse_descriptor("product (sphere 3 16 2) (sphere 4 16 0.5)")
        assert geometry.upper_reference() == pytest.approx(sphere_product_einstein_hilbert(3, 4, 0.5, scale_v=2.0))

    def test_torus_factor_has_no_upper_reference(self):
        assert parse_descriptor("product (sphere 3 16) (torus 3 2)").upper_reference() is None

    def test_non_product_has_no_upper_reference(self):
        assert parse_descriptor("sphere 3 16").upper_reference() is None


class TestFile:
    def test_path(self, tmp_path, path_manifold):
        spec = tmp_path / 'path.json'
        spec.write_text(dumps_spec(path_manifold), encoding='utf-8')
        geometry = parse_descriptor(f"file {spec}")
        assert geometry.manifold.n_vertices == 3
        assert geometry.mu_reference is None

    def test_stdin(self, path_manifold):
        geometry = parse_descriptor("file -", stdin=StringIO(dumps_spec(path_manifold)))
        assert geometry.descriptor == "file -"
        assert list(geometry.manifold.masses) == [0.5, 1.0, 1.5]

    def test_bad_json(self):
        with pytest.raises(SpecError, match="line 1"):
            parse_descriptor("file -", stdin=StringIO("{not json"))


class TestErrors:
    @pytest.mark.parametrize("text, message", [
        ("", "empty"),
        ("cube 3", "unknown descriptor"),
        ("sphere 3", "ended early"),
        ("sphere three 16", "must be an integer"),
        ("sphere 3 16 (", "trailing"),
        ("(sphere 3 16", "ended early"),
        ("(sphere 3 16 torus", "expected ')'"),
        ("product (sphere 3 16)", "ended early"),
    ])
    def test_rejects(self, text, message):
        with pytest.raises(DescriptorError, match=message.replace('(', r'\(').replace(')', r'\)')):
            parse_descriptor(text)
