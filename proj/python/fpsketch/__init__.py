# Copyright 2026 The fpsketch Authors
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

"""Differentially private F_p sketches over p-stable random projections."""

from fpsketch._core import (
    Sketch,
    brute_force_sensitivity,
    cdf,
    density,
    exact_fp,
    figure_data,
    laplace_check,
    median_abs_standard,
    privacy_report,
    ratio_curve,
    run_synthetic_experiment,
    sample_standard,
    sensitivity,
)

__all__ = [
    "Sketch",
    "brute_force_sensitivity",
    "cdf",
    "density",
    "exact_fp",
    "figure_data",
    "laplace_check",
    "median_abs_standard",
    "privacy_report",
    "ratio_curve",
    "run_synthetic_experiment",
    "sample_standard",
    "sensitivity",
]
