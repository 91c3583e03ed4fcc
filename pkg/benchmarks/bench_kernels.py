"""Compare the numba and pure-numpy kernel backends on realistic workloads.

The backend is fixed at import time by the GANBALANCE_NUMBA environment
variable, so this script re-executes itself once per backend and merges the
timings into one table:

    python benchmarks/bench_kernels.py

Each workload is timed as best-of-5 after a warmup call (which also absorbs
JIT compilation on the numba side).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _time(fn, repeats=5):
    fn()  # warmup / JIT
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _workloads():
    from ganbalance import gan, kernels
    from ganbalance.classifiers import TrainConfig, train_tree
    from ganbalance.data import Dataset

    rng = np.random.default_rng(0)
    X = rng.normal(size=(512, 100))
    W = rng.normal(size=(100, 100))
    b = rng.normal(size=100)
    delta = rng.normal(size=(512, 100))
    gamma = rng.uniform(0.5, 1.5, size=100)
    beta = rng.normal(size=100)
    logits = np.ascontiguousarray(rng.normal(size=(2048, 30)))
    param = rng.normal(size=1_000_000)
    grad = rng.normal(size=1_000_000)
    m = np.zeros(1_000_000)
    v = np.zeros(1_000_000)
    sorted_vals = np.sort(rng.integers(0, 500, size=100_000).astype(np.float64))
    labels = rng.integers(0, 2, size=100_000).astype(np.int64)

    tree_x = rng.random((20_000, 10))
    tree_y = (tree_x[:, 0] + rng.normal(0, 0.3, 20_000) > 0.5).astype(np.int64)
    tree_data = Dataset(tree_x, tree_y)

    cluster = np.clip(rng.normal(0.2, 0.05, size=(300, 10)), 0.0, 1.0)
    gan_data = Dataset(cluster, np.ones(300, dtype=np.int64))
    gan_cfg = gan.GanTrainConfig(epochs=200, seed=1)

    _, xhat, mean, var = kernels.batchnorm_train_forward(X, gamma, beta, 1e-5)
    return [
        ("dense_forward 512x100x100", lambda: kernels.dense_forward(X, W, b)),
        ("dense_backward 512x100x100", lambda: kernels.dense_backward(X, delta, W)),
        ("relu fwd+bwd 512x100", lambda: kernels.relu_backward(kernels.relu_forward(X), delta)),
        ("sigmoid fwd+bwd 512x100", lambda: kernels.sigmoid_backward(kernels.sigmoid_forward(X), delta)),
        ("softmax 2048x30", lambda: kernels.softmax_forward(logits)),
        ("batchnorm train fwd 512x100", lambda: kernels.batchnorm_train_forward(X, gamma, beta, 1e-5)),
        ("batchnorm backward 512x100", lambda: kernels.batchnorm_backward(delta, xhat, gamma, var, 1e-5)),
        ("adam update 1M params", lambda: kernels.adam_update(param, grad, m, v, 0.9, 0.999, 1e-3, 0.9, 0.999, 1e-8)),
        ("split_scan 100k rows", lambda: kernels.split_scan(sorted_vals, labels, 1)),
        ("tree fit 20kx10", lambda: train_tree(tree_data, TrainConfig(seed=3))),
        ("gan train 200 epochs 300x10", lambda: gan.train_gan(gan_data, gan_cfg)),
    ]


def worker():
    from ganbalance import kernels

    results = {name: _time(fn) for name, fn in _workloads()}
    print(json.dumps({"backend": kernels.BACKEND, "results": results}))


def orchestrate():
    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, GANBALANCE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        payload = json.loads(out.stdout.strip().splitlines()[-1])
        rows[payload["backend"]] = payload["results"]
    if "numba" not in rows:
        print("numba backend unavailable; numpy timings only")
        for name, t in rows["numpy"].items():
            print(f"{name:<32} {t * 1e3:9.3f} ms")
        return

    print(f"{'workload':<32} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name in rows["numba"]:
        t_nb = rows["numba"][name]
        t_np = rows["numpy"][name]
        print(
            f"{name:<32} {t_nb * 1e3:8.3f}ms {t_np * 1e3:8.3f}ms "
            f"{t_np / t_nb:7.2f}x"
        )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--worker", action="store_true",
                        help="time the current backend and emit JSON")
    args = parser.parse_args()
    worker() if args.worker else orchestrate()
