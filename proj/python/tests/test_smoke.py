import json

import numpy as np
import pytest

import canonkit


def test_example_counts():
    seq = canonkit.expanding_square(2, 0.0)
    assert seq.Q == 12
    b = canonkit.classify(seq, 1)
    assert b.counts["I"] == 8
    assert b.counts["rho"] == 4
    assert b.T.shape == (12, 12)


def test_compose_example():
    seq = canonkit.expanding_square(2, 0.3)
    e = canonkit.compose(seq, 0, 2)
    assert np.abs(e["a"]).max() < 1e-9
    assert np.abs(e["c"]).max() < 1e-9
    assert np.allclose(e["b"], e["b"].T)
    assert e["provenance"] == "0->1->2"


def test_constraints_and_brackets():
    seq = canonkit.expanding_square(2, 0.0)
    cs, brackets = canonkit.constraints(seq, 1)
    assert sum(c["kind"] == "pre" for c in cs) == 8
    assert np.abs(brackets).max() < 1e-9


def test_scalar_propagator():
    seq = canonkit.Sequence([canonkit.Move(0, [[0.0]], [[0.0]], [[1.0]])], hbar=1.0)
    modulus, i_exponent, _ = canonkit.propagator(seq, 0)
    assert modulus == pytest.approx((2 * np.pi) ** -0.5)
    assert i_exponent == 1


def test_json_round_trip():
    seq = canonkit.expanding_square(2, 0.5)
    again = canonkit.sequence_from_json(seq.to_json())
    for m, n in zip(seq.moves, again.moves):
        assert np.array_equal(m.c, n.c)
    assert json.loads(seq.to_json())["Q"] == 12


def test_errors():
    with pytest.raises(canonkit.InputError):
        canonkit.sequence_from_json("{not json")
    with pytest.raises(canonkit.InputError):
        canonkit.Sequence([canonkit.Move(0, [[0.0, 1.0], [0.0, 0.0]], np.eye(2), np.eye(2))])
    assert issubclass(canonkit.InputError, canonkit.CanonkitError)
