#!/usr/bin/env python3
# Copyright 2026 The fedgbt Authors
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
"""Turns fedgbt_bench JSON output into cost-model weights.

    fedgbt_bench --benchmark_format=json --benchmark_out=bench.json
    tools/calibrate_costs.py bench.json

Prints one cost_<primitive> = <microseconds> line per primitive, ready to
paste into a config file.
"""

import json
import sys


def main(path):
    with open(path) as f:
        runs = {b["name"]: b for b in json.load(f)["benchmarks"]
                if b.get("run_type", "iteration") == "iteration"}

    def per_item(name):
        return 1e6 / runs[name]["items_per_second"]

    def slope(small, large, size):
        return (runs[large]["cpu_time"] - runs[small]["cpu_time"]) / 1e3 / size

    weights = [
        ("key_gen", per_item("BM_KeyGen")),
        ("key_agree", per_item("BM_KeyAgree")),
        ("sign", per_item("BM_Sign")),
        ("verify", per_item("BM_Verify")),
        ("aead_call", per_item("BM_AeadEncrypt/0")),
        ("aead_byte", slope("BM_AeadEncrypt/0", "BM_AeadEncrypt/16384", 16384)),
        ("share_term", per_item("BM_ShareTerm")),
        ("lagrange_term", per_item("BM_LagrangeTerm")),
        ("prg_word", per_item("BM_PrgWord")),
        ("field_op", per_item("BM_FieldOp")),
        ("message", per_item("BM_Message/0")),
        ("message_byte", slope("BM_Message/0", "BM_Message/16384", 16384)),
    ]
    for name, value in weights:
        print(f"cost_{name} = {value:.4g}")


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit("usage: calibrate_costs.py BENCH_JSON")
    main(sys.argv[1])
