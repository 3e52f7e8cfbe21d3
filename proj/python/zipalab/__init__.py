# Copyright 2026 The zipalab Authors.
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

"""ZIPA key generation, injection attack and mitigation laboratory."""

from ._core import (
    ZipaError,
    bit_error_rate,
    checkerboard_plan,
    convolve,
    deconvolve,
    energy_matrix,
    entropy_per_symbol,
    estimate_ir,
    exp_sweep,
    from_hex,
    gain_for_level,
    pipeline_report,
    plan_for_target,
    predicted_bits,
    quantize,
    read_wav,
    reconcile,
    rms_distance,
    run_experiment,
    shift,
    synchronize,
    synth_context,
    synthesize,
    to_hex,
    write_wav,
)

__all__ = [name for name in dir() if not name.startswith("_")]
