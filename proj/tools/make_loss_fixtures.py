#!/usr/bin/env python3
# Copyright 2026 The sgmod Authors. All Rights Reserved.
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
# ==============================================================================
"""Regenerates the loss-kernel fixtures in data/losscheck/.

Expected values are computed here with numpy, independently of the C++
kernels. Seeds are fixed so the output is stable.

    python3 tools/make_loss_fixtures.py [out_dir]
"""

import itertools
import json
import os
import sys

import numpy as np


def log_softmax(z):
    m = z.max(axis=-1, keepdims=True)
    return z - m - np.log(np.exp(z - m).sum(axis=-1, keepdims=True))


def ce(z, targets, eps=0.0):
    lp = log_softmax(z)
    t = np.arange(len(targets))
    nll = -lp[t, targets]
    uniform = -lp.mean(axis=-1)
    return float(((1.0 - eps) * nll + eps * uniform).mean())


def var(z, targets, sensitive, lam, gamma, eps=0.0):
    base = ce(z, targets, eps)
    s = sorted(set(sensitive))
    if lam == 0.0 or not s:
        return base
    p = np.exp(log_softmax(z))
    r = float(np.mean([p[i, targets[i]] for i in s]))
    return base + lam * (1.0 - r) ** gamma


def asl(z, y, gp, gn, m):
    p = 1.0 / (1.0 + np.exp(-z))
    pm = np.maximum(p - m, 0.0)
    pos = y * (1.0 - p) ** gp * np.log(p)
    neg = (1 - y) * pm ** gn * np.log(1.0 - pm)
    return float(-(pos + neg).sum())


def matrix(a):
    return [[float(x) for x in row] for row in a]


def join(elements, order, joiner):
    out = []
    for k, i in enumerate(order):
        if k:
            out.extend(joiner)
        out.extend(elements[i])
    return out


def bigram_ce(w, bos, targets):
    prev = [bos] + targets[:-1]
    return ce(w[prev], np.array(targets))


def softmax_fixtures(rng):
    out = []
    for k in range(8):
        t, v = int(rng.integers(1, 7)), int(rng.integers(2, 9))
        z = rng.normal(0.0, 2.0, size=(t, v))
        y = rng.integers(0, v, size=t)
        eps = [0.0, 0.05, 0.1][k % 3]
        out.append({"name": "softmax_ce_%d" % k, "kernel": "softmax_ce",
                    "logits": matrix(z), "targets": [int(i) for i in y],
                    "label_smoothing": eps,
                    "expected_value": ce(z, y, eps)})
    return out


def var_fixtures(rng):
    out = []
    settings = [(0.1, 2.0), (0.1, 2.0), (0.5, 1.0), (0.0, 2.0), (0.3, 3.0),
                (0.1, 2.0)]
    for k, (lam, gamma) in enumerate(settings):
        t, v = int(rng.integers(2, 8)), int(rng.integers(3, 9))
        z = rng.normal(0.0, 1.5, size=(t, v))
        y = rng.integers(0, v, size=t)
        s = sorted({int(i) for i in rng.integers(0, t, size=int(rng.integers(1, t + 1)))})
        eps = 0.05 if k % 2 else 0.0
        out.append({"name": "var_loss_%d" % k, "kernel": "var_loss",
                    "logits": matrix(z), "targets": [int(i) for i in y],
                    "sensitive": s, "lambda": lam, "gamma": gamma,
                    "label_smoothing": eps,
                    "expected_value": var(z, y, s, lam, gamma, eps)})
    return out


def asl_fixtures(rng):
    out = []
    configs = [("balanced", 1.0, 4.0, 0.0), ("aggressive", 0.0, 7.0, 0.0),
               ("margin", 1.0, 4.0, 0.05)]
    for k in range(6):
        label, gp, gn, m = configs[k % 3]
        c = int(rng.integers(3, 12))
        z = rng.normal(0.0, 2.0, size=c)
        y = (rng.random(c) < 0.3).astype(int)
        out.append({"name": "asl_%s_%d" % (label, k), "kernel": "asymmetric_loss",
                    "logits": [float(x) for x in z], "labels": [int(i) for i in y],
                    "gamma_pos": gp, "gamma_neg": gn, "margin": m,
                    "expected_value": asl(z, y, gp, gn, m)})
    return out


def positions_fixtures(rng, tokenizer, words):
    out = []
    seqs = [tokenizer[w] for w in words]
    for k in range(4):
        stream = []
        while len(stream) < 60:
            if rng.random() < 0.3:
                stream.extend(seqs[int(rng.integers(0, len(seqs)))])
            else:
                stream.append(int(rng.integers(0, 40)))
        covered = set()
        for i in range(len(stream)):
            for s in seqs:
                if stream[i:i + len(s)] == s:
                    covered.update(range(i, i + len(s)))
        out.append({"name": "sensitive_positions_%d" % k,
                    "kernel": "sensitive_positions", "tokenizer": tokenizer,
                    "sensitive_words": words, "targets": stream,
                    "expected_positions": sorted(covered)})
    return out


def minperm_fixtures(rng):
    # Orderings whose minimum is not separated from the runner-up by a clear
    # margin are redrawn, so summation order cannot change the argmin.
    out = []
    while len(out) < 5:
        v = 10
        w = rng.normal(0.0, 2.0, size=(v, v))
        n = int(rng.integers(2, 6))
        elements = [[int(i) for i in rng.integers(1, v, size=int(rng.integers(1, 4)))]
                    for _ in range(n)]
        joiner = [] if len(out) % 2 == 0 else [int(rng.integers(1, v))]
        scored = sorted((bigram_ce(w, 0, join(elements, order, joiner)), list(order))
                        for order in itertools.permutations(range(n)))
        if scored[1][0] - scored[0][0] < 1e-6:
            continue
        out.append({"name": "min_permutation_ce_%d" % len(out),
                    "kernel": "min_permutation_ce", "weights": matrix(w),
                    "bos": 0, "elements": elements, "joiner": joiner,
                    "k_max": 5, "expected_value": scored[0][0],
                    "expected_permutation": scored[0][1]})
    # Above the cap the given order is scored as is.
    w = rng.normal(0.0, 2.0, size=(10, 10))
    elements = [[i] for i in range(1, 8)]
    out.append({"name": "min_permutation_ce_over_cap",
                "kernel": "min_permutation_ce", "weights": matrix(w), "bos": 0,
                "elements": elements, "joiner": [0], "k_max": 5,
                "expected_value": bigram_ce(w, 0, join(elements, range(7), [0])),
                "expected_permutation": list(range(7))})
    return out


def schedule_fixture():
    checks = []
    for step in (0, 1, 250, 499, 500, 501, 10000):
        checks.append({"fn": "scheduled_sampling_prob", "step": step,
                       "expected": 0.3 * min(step / 500, 1.0)})
    for step in (0, 100, 199, 200, 5000):
        checks.append({"fn": "var_warmup_lambda", "step": step,
                       "expected": 0.1 * min(step / 200, 1.0)})
    checks.append({"fn": "var_warmup_lambda", "step": 50, "lambda": 0.4,
                   "warmup": 100, "expected": 0.4 * min(50 / 100, 1.0)})
    return [{"name": "schedule_endpoints", "kernel": "schedule",
             "checks": checks}]


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(root, "data", "losscheck")
    with open(os.path.join(root, "data", "tokenizer_toy.json"), encoding="utf-8") as f:
        toy = json.load(f)
    os.makedirs(out_dir, exist_ok=True)
    files = {
        "asymmetric_loss.json": asl_fixtures(np.random.default_rng(3)),
        "min_permutation_ce.json": minperm_fixtures(np.random.default_rng(5)),
        "schedule.json": schedule_fixture(),
        "sensitive_positions.json": positions_fixtures(
            np.random.default_rng(4), toy["tokenizer"], toy["sensitive_words"]),
        "softmax_ce.json": softmax_fixtures(np.random.default_rng(1)),
        "var_loss.json": var_fixtures(np.random.default_rng(2)),
    }
    for name, fixtures in files.items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as f:
            json.dump({"fixtures": fixtures}, f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
