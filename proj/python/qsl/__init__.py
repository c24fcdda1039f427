# Copyright 2026 The qsl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Speed limits on observables of open quantum systems."""

import json as _json

from ._qsl import (
    BoundViolationError,
    ConfigError,
    ContractError,
    IntegrationDivergedError,
    InvalidStateError,
    QslError,
    bures_angle,
    bures_distance,
    evolve,
    fidelity,
    lindblad_derivative,
    pauli,
    run_config,
    spectral_decompose,
    speed_operators,
    speed_report,
    speedup_hamiltonian,
    split_derivative,
    tightness_ratio_closed_form,
)
from ._qsl import fig2 as _fig2
from ._qsl import verify as _verify


def fig2(**kwargs):
    """Run the dephased-qubit scenario; returns the saturation summary as a dict."""
    return _json.loads(_fig2(**kwargs))


def verify(**kwargs):
    """Random invariant sweep; returns the summary as a dict."""
    return _json.loads(_verify(**kwargs))


__all__ = [name for name in dir() if not name.startswith("_")]
