# Copyright 2026 The ABLQ Accounting Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Privacy accounting for ABLQ batch samplers."""

from ablq_accounting._errors import AccountingError
from ablq_accounting._core import (
    __version__,
    binomial_tail,
    calibrate_sigma,
    choose_max_batch,
    delta,
    epsilon,
    gaussian_delta,
    sample,
    simulate,
    sweep_csv,
)

__all__ = [
    "AccountingError",
    "__version__",
    "binomial_tail",
    "calibrate_sigma",
    "choose_max_batch",
    "delta",
    "epsilon",
    "gaussian_delta",
    "sample",
    "simulate",
    "sweep_csv",
]
