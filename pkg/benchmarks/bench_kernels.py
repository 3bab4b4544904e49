"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case runs once per backend to warm up (numba compiles on first call,
or loads from its cache), then reports the best of ``--repeat`` runs.
Results from both backends are compared so a speedup never hides a
disagreement.
"""
import argparse
import math
import time

import numpy as np

from cqpack import _kernels, build_block_code, delta_n, mutual_information
from cqpack.channel import CqChannel
from cqpack.linop import tensor_power_decomposition
from cqpack.sampling import random_channel, random_density, random_hermitian


def plus_channel():
    k0 = np.array([1, 0], dtype=complex)
    kp = np.array([1, 1], dtype=complex) / math.sqrt(2)
    return CqChannel.from_states([np.outer(k0, k0.conj()), np.outer(kp, kp.conj())])


def cases():
    rng = np.random.default_rng(0)
    ch = plus_channel()
    a = 0.5 * mutual_information(ch)
    sigma = random_density(2, rng)
    frame = tensor_power_decomposition(sigma, 9)
    mat = random_hermitian(frame.dim, rng)
    thr = rng.uniform(-1, 1, size=frame.v)
    stack = np.stack([random_hermitian(64, rng) for _ in range(256)])
    op = random_hermitian(64, rng)
    ch3 = random_channel(3, 2, rng)
    a3 = 0.5 * mutual_information(ch3)
    return {
        "mask_blocks d=512": lambda: _kernels.mask_blocks(mat, frame.starts),
        "positive_blocks d=512": lambda: _kernels.positive_blocks(
            _kernels.mask_blocks(mat, frame.starts), frame.starts, thr, 1e-10)[1],
        "trace_products 256x64": lambda: _kernels.trace_products(stack, op),
        "delta_n |0>,|+> n=8": lambda: delta_n(ch, None, 8, a),
        "build_block_code |X|=3 n=4": lambda: build_block_code(ch3, None, 4, a3)[1].M,
    }


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def agree(x, y):
    if isinstance(x, tuple):
        return all(agree(u, v) for u, v in zip(x, y))
    return np.abs(np.asarray(x) - np.asarray(y)).max() < 1e-10


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    before = _kernels.backend()
    print(f"{'case':<30}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}  agree")
    for name, fn in cases().items():
        timing, outs = {}, {}
        for backend in ("numpy", "numba"):
            _kernels.set_backend(backend)
            fn()
            timing[backend], outs[backend] = best_of(fn, args.repeat)
        ratio = timing["numpy"] / timing["numba"]
        ok = agree(outs["numpy"], outs["numba"])
        print(f"{name:<30}{1e3 * timing['numpy']:>12.2f}{1e3 * timing['numba']:>12.2f}{ratio:>9.2f}x  {ok}")
    _kernels.set_backend(before)


if __name__ == "__main__":
    main()
