import json
import math
from pathlib import Path

import numpy as np
import pytest

import ergograph as eg

EXAMPLES = Path(__file__).resolve().parents[2] / "examples"


def load(name):
    return eg.ReactionNetwork.load(str(EXAMPLES / f"{name}.rn"))


def test_parse_and_format_round_trip():
    net = eg.ReactionNetwork.parse("0 -> X1 : 1\nX1 -> 0 : 1")
    assert net.species == ["X1"]
    assert net.num_reactions == 2
    again = eg.ReactionNetwork.parse(str(net))
    assert again.species == net.species


def test_parse_error_is_an_error():
    with pytest.raises(eg.ParseError):
        eg.ReactionNetwork.parse("X1 -> X1 : 1")
    assert issubclass(eg.ParseError, eg.Error)


def test_complex_balance():
    rep = eg.verify_complex_balanced(load("open_cxb"), [1.0, 1.0])
    assert rep["balanced"]
    assert rep["max_abs_residual"] < 1e-12
    c = eg.search_complex_balanced(eg.ReactionNetwork.parse("0 -> X1 : 3\nX1 -> 0 : 1"), [1.0])
    assert c == pytest.approx([3.0], rel=1e-10)


def test_layers():
    assert eg.catalytic_layers(load("key_example")) == [["X2"], ["X1"]]
    assert eg.catalytic_layers(load("counterexample")) is None


def test_stationary_matches_poisson():
    pi = eg.stationary(load("motivation"), [30])
    assert pi.shape == (31,)
    poisson = np.array([math.exp(-1.0) / math.factorial(k) for k in range(31)])
    assert np.abs(pi - poisson / poisson.sum()).max() < 1e-12


def test_two_dimensional_layout():
    net = load("key_example")
    pi = eg.stationary(net, [6, 4])
    assert pi.shape == (7, 5)
    pf = eg.product_form(net, [1.0, 1.0], [6, 4])
    assert np.abs(pi - pf).max() < 1e-10
    # pi(x) = e^-2 / (x1! x2!) up to normalization, so the (1, 0) / (0, 0) ratio is 1
    assert pi[1, 0] / pi[0, 0] == pytest.approx(1.0)
    assert pi[2, 0] / pi[0, 0] == pytest.approx(0.5)


def test_gap_and_mixing():
    gap = eg.spectral_gap(load("motivation"), [40])
    assert gap["value"] == pytest.approx(1.0, abs=1e-6)
    two = eg.ReactionNetwork.parse("0 -> X1 : 1\nX1 -> 0 : 1")
    tau = eg.mixing_time(two, [1], [0], 0.25)
    assert tau > 0.0


def test_simulation_is_seeded():
    net = load("motivation")
    t1, s1 = eg.simulate(net, [0], 50.0, seed=7)
    t2, s2 = eg.simulate(net, [0], 50.0, seed=7)
    assert np.array_equal(t1, t2) and np.array_equal(s1, s2)
    assert s1.shape == (len(t1), 1)
    assert t1[0] == 0.0 and np.all(np.diff(t1) > 0)


def test_cli_in_process():
    code, out, _ = eg.main(["check", str(EXAMPLES / "key_example.rn")])
    assert code == 0
    report = json.loads(out)
    assert report["results"]["partition"]["N"] == 1
    code, _, _ = eg.main(["check", str(EXAMPLES / "counterexample.rn")])
    assert code == 2


def test_version():
    assert eg.__version__
