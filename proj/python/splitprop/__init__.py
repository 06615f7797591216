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

"""Splitting, Chebyshev and Taylor propagators with certified error bounds."""

import json

from ._core import (
    InvalidInput,
    MethodErrorProfile,
    NumericalFailure,
    OutOfStability,
    SplitCoefficients,
    ValidityError,
    WaveState,
    chebyshev_bound,
    cs_values,
    delta_sup,
    epsilon_sup,
    error_profile,
    k_matrix,
    min_degree,
    mu_nu,
    nstep_bound,
    poschl_teller_bounds,
    random_unit_state,
    stability_threshold,
    strang_sequence,
    taylor_bound,
)
from . import _core


def select_method(t_beta, tol, catalog="", heads_all=False):
    """Cheapest certified plan for beta*t and tol, as a dict."""
    return json.loads(_core._select_json(t_beta, tol, catalog, heads_all))


def propagate(config):
    """Runs a config dict; returns (state, report dict, tolerance_met)."""
    state, report, ok = _core._propagate_json(json.dumps(config))
    return state, json.loads(report), ok


def design_method(m, theta, l_window=7):
    """Designs an m-stage method for step size theta; returns a catalog record dict."""
    return json.loads(_core._design_json(m, theta, l_window))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
