#!/usr/bin/env python3
# Copyright 2026 The SDFW Authors
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

"""Regenerates the bundled scenario files under scenarios/."""

import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
BYTES_PER_FLOW = 2_000_000


def ip(i):
    return f"10.0.3.{i}"


def allow(pid, a, b, port=None):
    p = {"id": pid, "src": [ip(a)], "dst": [ip(b)], "proto": "tcp",
         "action": "allow", "priority": 50, "stateful": True}
    if port is not None:
        p["dst_port"] = port
    return p


def scenario(topology, pairs, attacker, victim, duration,
             bytes_per_flow=BYTES_PER_FLOW, flows=1):
    policies, traffic = [], []
    for a, b in pairs + [(attacker, victim)]:
        policies.append(allow(f"allow-{a}-{b}", a, b))
        policies.append(allow(f"allow-{b}-{a}", b, a))
    for a, b in pairs:
        traffic.append({"kind": "benign_tcp", "src": ip(a), "dst": ip(b),
                        "flows": flows, "bytes_per_flow": bytes_per_flow,
                        "dst_port": 80, "start_s": 0.0})
    traffic.append({"kind": "syn_flood", "src": ip(attacker), "dst": ip(victim),
                    "dst_port": 80, "src_port": 1024, "count": 1400,
                    "rate_pps": 1000.0, "start_s": 0.0})
    return {"topology": topology, "policies": policies, "traffic": traffic,
            "sdfw_enabled": True, "seed": 7, "duration_s": duration}


def write(name, doc, with_off=True):
    OUT.mkdir(exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
    if not with_off:
        return
    off = dict(doc, sdfw_enabled=False)
    (OUT / f"{name}_nosdfw.json").write_text(json.dumps(off, indent=1) + "\n")


def main():
    # Lightly loaded single switch: 10.0.3.102 floods 10.0.3.103 while one
    # unrelated pair exchanges a few flows.
    write("flat_case_study",
          scenario({"kind": "flat", "params": {"hosts": 104}}, [(2, 3)], 102, 103,
                   3.0, bytes_per_flow=200_000, flows=4),
          with_off=False)

    # 100 hosts on one switch; h1 floods h100, the rest talk in pairs.
    flat_pairs = [(2 * k, 2 * k + 1) for k in range(1, 50)]
    write("flat100_synflood",
          scenario({"kind": "flat", "params": {"hosts": 100}}, flat_pairs, 1, 100, 3.0))

    # depth 2, fanout 8: pairs stay under their leaf; h1 floods h64 across
    # the root.
    tree_pairs = []
    for leaf in range(8):
        base = 8 * leaf
        for j in range(1, 8, 2):
            a, b = base + j, base + j + 1
            if 1 in (a, b) or 64 in (a, b):
                continue
            tree_pairs.append((a, b))
    write("tree_d2_f8_synflood",
          scenario({"kind": "tree", "params": {"depth": 2, "fanout": 8}},
                   tree_pairs, 1, 64, 3.0))


if __name__ == "__main__":
    main()
