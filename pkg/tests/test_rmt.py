import numpy as np
import pytest

from freecomm.exactalg import ExactMatrix
from freecomm.laws import LawSpec, gen_tetilla, semicircle_law
from freecomm.rmt import MatrixModel, compare_with_prediction, empirical_moments, gue, report_csv


def test_gue_normalization():
    rng = np.random.default_rng(0)
    G = gue(400, rng)
    assert np.allclose(G, G.conj().T)
    assert abs(np.trace(G @ G).real / 400 - 1) < 0.02


def test_seeding_is_reproducible():
    model = MatrixModel(50, ExactMatrix.commutator_matrix(2), seed=7)
    assert empirical_moments(model, 4, 3) == empirical_moments(model, 4, 3)
    other = MatrixModel(50, ExactMatrix.commutator_matrix(2), seed=8)
    assert empirical_moments(model, 4, 3) != empirical_moments(other, 4, 3)


def test_commutator_model_moments():
    model = MatrixModel(500, ExactMatrix.commutator_matrix(2), seed=0)
    emp = empirical_moments(model, 4, 20)
    (m1, e1), (m2, _), (m3, e3), (m4, _) = emp
    assert abs(m2 - 2) / 2 < 0.05
    assert abs(m4 - 10) / 10 < 0.07
    assert abs(m1) <= 3 * e1 + 1e-12 and abs(m3) <= 3 * e3


def test_compare_with_prediction():
    A3 = ExactMatrix.commutator_matrix(3)
    law = gen_tetilla(3, 4)[0]
    good = compare_with_prediction(MatrixModel(200, A3, seed=1), law, 4, 10)
    assert good["pass"]
    bad = compare_with_prediction(MatrixModel(200, ExactMatrix.commutator_matrix(2), seed=1),
                                  semicircle_law(4), 4, 10)
    assert not bad["pass"] and not bad["orders"][3]["pass"]
    text = report_csv(good)
    assert text.splitlines()[0] == "r,exact,empirical,stderr,z,pass"
    assert len(text.splitlines()) == 5


def test_zero_matrix_gives_zero_moments():
    model = MatrixModel(30, ExactMatrix.zeros(2), seed=0)
    assert all(m == 0 and e == 0 for m, e in empirical_moments(model, 4, 2))
    rep = compare_with_prediction(model, LawSpec("zero", [0] * 4), 4, 2)
    assert rep["pass"]


def test_model_validation():
    with pytest.raises(ValueError):
        MatrixModel(10, [[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        MatrixModel(0, ExactMatrix.commutator_matrix(2))
    with pytest.raises(ValueError):
        empirical_moments(MatrixModel(5, ExactMatrix.commutator_matrix(2)), 2, 0)
