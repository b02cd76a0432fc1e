import json
from fractions import Fraction

import pytest
from hypothesis import given

from strategies import presentations
from stableres import catalog
from stableres.field import GF
from stableres.interleave import derived_interleaving, search_module_interleaving
from stableres.presentation import minimal_free_resolution
from stableres.serialize import (
    FormatError,
    bifiltration_from_json,
    bifiltration_to_json,
    certificate_from_json,
    certificate_to_json,
    complex_from_json,
    complex_to_json,
    presentation_from_json,
    presentation_to_json,
)
from test_ingest import CIRCLE

N1 = catalog.box_sum(1)


def roundtrip(data):
    return json.loads(json.dumps(data))


def test_presentation_format():
    data = presentation_to_json(catalog.box_sum(Fraction(1, 2)))
    assert data["generators"] == [["0", "0"], ["0", "0"]]
    assert data["relations"][0] == {"grade": ["1/2", "0"], "coeffs": ["0", "1"]}
    assert presentation_from_json(roundtrip(data)) == catalog.box_sum(Fraction(1, 2))


@given(presentations())
def test_presentation_roundtrip(P):
    assert presentation_from_json(roundtrip(presentation_to_json(P))) == P


def test_gf_scalars_are_residues():
    data = presentation_to_json(N1.over(GF(3)))
    assert data["field"] == "gf:3"
    assert data["relations"][0]["coeffs"] == [0, 1]


def test_complex_roundtrip_keeps_augmentation():
    X = minimal_free_resolution(N1)
    Y = complex_from_json(roundtrip(complex_to_json(X)))
    assert Y == X and Y.resolved == N1 and Y.augmentation == X.augmentation
    assert set(complex_to_json(X)["terms"]) == {"-2", "-1", "0"}


def test_bifiltration_roundtrip():
    assert bifiltration_from_json(roundtrip(bifiltration_to_json(CIRCLE))) == CIRCLE


def test_certificates_roundtrip_and_verify():
    for cert in (search_module_interleaving(catalog.free_module(), N1, Fraction(1, 2)),
                 derived_interleaving(catalog.free_module(), N1, Fraction(3, 4))):
        back = certificate_from_json(roundtrip(certificate_to_json(cert)))
        assert back.level == cert.level and back.epsilon == cert.epsilon
        assert back.verify()


@pytest.mark.parametrize("data", [
    {"generators": [["0", "0"]], "relations": [{"grade": ["0", "0"], "coeffs": [0.5]}]},
    {"generators": [["1", "1"]], "relations": [{"grade": ["0", "0"], "coeffs": [1]}]},
    {"generators": [["0", "0"]], "relations": [{"grade": ["0", "0"], "coeffs": [1, 1]}]},
    {"generators": [["0", "0"], ["0"]]},
    {"relations": []},
])
def test_malformed_presentations(data):
    with pytest.raises(FormatError):
        presentation_from_json(data)


def test_malformed_complex():
    data = complex_to_json(catalog.box_complex(1))
    data["differentials"]["-1"] = [["1"]]
    with pytest.raises(FormatError):
        complex_from_json(data)
