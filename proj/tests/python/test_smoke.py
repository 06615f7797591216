# Copyright 2026 The splitprop Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import splitprop as sp


def test_strang_threshold():
    for m in range(1, 5):
        assert sp.stability_threshold(sp.strang_sequence(m)) == pytest.approx(2 * m, abs=1e-9)


def test_k_matrix_has_unit_determinant():
    c = sp.SplitCoefficients([0.3, 0.4, 0.3], [0.6, 0.4])
    for y in np.linspace(-2, 2, 9):
        k11, k12, k21, k22 = sp.k_matrix(c, y)
        assert k11 * k22 - k12 * k21 == pytest.approx(1.0, abs=1e-13)


def test_strang_profile():
    p = sp.error_profile(sp.SplitCoefficients([0.5, 0.5], [1.0]), 1.9)
    assert p.eps == pytest.approx(1.34862, rel=1e-3)
    assert p.has_mu_nu


def test_degrees_and_bounds():
    assert sp.min_degree("chebyshev", 1000.0, 3.62e-7) == 1135
    with pytest.raises(ValueError):
        sp.min_degree("lanczos", 1.0, 1e-6)
    assert sp.taylor_bound(30, 1.0) < 1e-30


def test_poschl_teller_bounds():
    lo, hi = sp.poschl_teller_bounds(128)
    assert lo == pytest.approx(-0.65988, rel=1e-5)
    assert hi == pytest.approx(0.46333, rel=1e-5)


def test_select_method():
    plan = sp.select_method(26.4648, 1e-9)
    assert plan["cost_degree_equivalent"] == 30
    assert plan["tail"]["method"] == "M30_1"


def test_propagate_tridiagonal():
    config = {
        "problem": {"tridiagonal": {"n": 20}},
        "method": {"chebyshev": {"m": 40}},
        "t": 5.0,
        "tol": 1e-8,
        "seed": 3,
    }
    state, report, ok = sp.propagate(config)
    assert ok
    assert report["method"].startswith("chebyshev")
    assert math.isclose(state.norm(), 1.0, abs_tol=1e-10)


def test_invalid_config():
    with pytest.raises(ValueError):
        sp.propagate({"problem": {}, "t": 1.0})


def test_design_small():
    rec = sp.design_method(2, 0.5)
    assert rec["m"] == 2
    assert rec["eps"] < 2e-3
    assert len(rec["a"]) == 3
    assert math.isclose(sum(rec["a"]), 1.0, abs_tol=1e-12)
    assert math.isclose(sum(rec["b"]), 1.0, abs_tol=1e-12)
