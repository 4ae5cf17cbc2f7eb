import numpy as np
import pytest
from sklearn.base import clone

from resetword import Dfa, cerny, format_dfa
from resetword.estimators import ResetWordSolver, SqrtLengthModel, check_automata, fit_pairs


def test_solver_transform_and_predict():
    X = [cerny(4), format_dfa(cerny(5)), Dfa(2, 2, ((0, 0), (1, 1)))]
    solver = ResetWordSolver().fit(X)
    out = solver.transform(X)
    assert out.tolist() == [[1, 9], [1, 16], [0, -1]]
    assert solver.predict(X).tolist() == [9, 16, -1]
    assert len(solver.words_[0]) == 9 and solver.words_[2] is None
    assert solver.fit_transform(X).shape == (3, 2)


def test_solver_params():
    solver = ResetWordSolver(ibfs_weight=3.0, warmup_steps=1)
    assert solver.get_params()["ibfs_weight"] == 3.0
    twin = clone(solver).set_params(memory_limit=0)
    assert twin.predict([cerny(6)]).tolist() == [25]


def test_check_automata():
    assert len(check_automata(cerny(3))) == 1
    with pytest.raises(TypeError):
        check_automata([1, 2])
    with pytest.raises(ValueError):
        check_automata([])


def test_sqrt_model_estimator():
    n = np.arange(20, 90, 10).reshape(-1, 1)
    y = 2.5 * np.sqrt(n[:, 0] - 5)
    m = SqrtLengthModel().fit(n, y)
    assert m.a_ == pytest.approx(2.5, abs=1e-6)
    assert m.predict([[105]])[0] == pytest.approx(25.0, abs=1e-5)
    assert m.score(n, y) == pytest.approx(1.0)
    a, b, r = fit_pairs(n[:, 0], y)
    assert r < 1e-10


def test_sqrt_model_validation():
    with pytest.raises(ValueError):
        SqrtLengthModel().fit([[20, 1], [30, 1], [40, 1]], [1, 2, 3])
    with pytest.raises(ValueError):
        SqrtLengthModel().fit([[20], [30], [40]], [1, np.nan, 3])
