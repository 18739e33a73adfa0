import os
import subprocess

import pytest

fann = pytest.importorskip("fann")


def test_frechet_values():
    a = [[0.0, 0.0], [1.0, 0.0]]
    b = [[0.0, 1.0], [1.0, 1.0]]
    assert not fann.frechet_decide(a, b, 0.99)
    assert fann.frechet_decide(a, b, 1.0)
    assert abs(fann.frechet_value(a, b) - 1.0) < 1e-6
    assert fann.discrete_frechet(a, b) == pytest.approx(1.0)


def test_index_query_and_round_trip():
    corpus = fann.Corpus(["a", "b"], [[[0, 0], [1, 0]], [[5, 5], [6, 5]]])
    idx = fann.Index.build(corpus, delta=0.2)
    assert idx.query([[0, 0.1], [0.5, 0.1], [1, 0.1]]) == 0
    assert idx.query([[0, 10.1], [0.5, 10.1], [1, 10.1]]) is None
    back = fann.Index.from_string(idx.to_string())
    assert back.query([[0, 0.1], [0.5, 0.1], [1, 0.1]]) == 0


def test_errors_surface():
    with pytest.raises(fann.FannError):
        fann.Corpus(["a", "a"], [[[0, 0]], [[1, 1]]])
    corpus = fann.Corpus(["a"], [[[0, 0], [1, 0]]])
    idx = fann.Index.build(corpus)
    with pytest.raises(fann.FannError):
        idx.query([[0, 0], [1, 0], [2, 0], [3, 0]])


def test_ladder():
    corpus = fann.Corpus(["a", "b"], [[[0, 0], [1, 0]], [[3, 3], [4, 3]]])
    ladder = fann.Ladder.build(corpus)
    assert ladder.query([[3, 3.1], [3.5, 3], [4, 3]]) == 1
    assert fann.brute_force_nn(corpus, [[3, 3.1], [3.5, 3], [4, 3]]) == 1


@pytest.mark.skipif("FANN_CLI" not in os.environ, reason="cli path not given")
def test_cli_canary():
    cli = os.environ["FANN_CLI"]
    ok = subprocess.run([cli, "selftest", "--only", "0"], capture_output=True, text=True)
    assert ok.returncode == 0
    bad = subprocess.run([cli, "selftest", "--only", "0", "--tol-scale", "1e6"], capture_output=True, text=True)
    assert bad.returncode != 0
