"""Time the native and pure-Python kernels on synthetic inputs.

    python benchmarks/bench_trellis.py --frames 20000 --tokens 2000
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from podcorpus import kernels


def log_softmax(x: np.ndarray) -> np.ndarray:
    x = x - x.max(axis=1, keepdims=True)
    return x - np.log(np.exp(x).sum(axis=1, keepdims=True))


def make_inputs(frames: int, vocab: int, tokens: int, seed: int, kind: str):
    """``peaky`` mimics acoustic-model output: mostly blank, one spike per token."""
    rng = np.random.default_rng(seed)
    ids = rng.integers(1, vocab, size=tokens).astype(np.int64)
    logits = rng.normal(scale=3.0 if kind == "noise" else 1.0, size=(frames, vocab))
    if kind == "peaky":
        logits[:, 0] += 6.0
        at = np.sort(rng.choice(frames, size=tokens, replace=False))
        logits[at, ids] += 12.0
    return np.ascontiguousarray(log_softmax(logits).astype(np.float32)), ids


def bench(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--frames", type=int, default=20000)
    p.add_argument("--vocab", type=int, default=36)
    p.add_argument("--tokens", type=int, default=2000)
    p.add_argument("--text-len", type=int, default=400, help="string length for edit distance")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--logits", choices=("peaky", "noise"), default="peaky")
    args = p.parse_args()

    logp, ids = make_inputs(args.frames, args.vocab, args.tokens, args.seed, args.logits)
    rng = np.random.default_rng(args.seed + 1)
    a = rng.integers(0, 30, size=args.text_len).astype(np.int64)
    b = rng.integers(0, 30, size=args.text_len).astype(np.int64)

    backends = kernels.available_backends()
    print(f"trellis ({args.logits}): T={args.frames} V={args.vocab} M={args.tokens}; edit distance: {args.text_len}x{args.text_len}")
    print(f"{'backend':<8} {'trellis s':>10} {'levenshtein s':>14}")
    times = {}
    for name in backends:
        k = kernels.get_backend(name)
        t_trellis = bench(lambda: k.viterbi_trellis(logp, ids, 0), args.repeat)
        # the fallback takes any sequences; the native kernel wants int64 arrays
        sa, sb = (a, b) if name == "native" else (a.tolist(), b.tolist())
        t_lev = bench(lambda: k.levenshtein(sa, sb), args.repeat)
        times[name] = (t_trellis, t_lev)
        print(f"{name:<8} {t_trellis:>10.4f} {t_lev:>14.4f}")
    if {"native", "python"} <= times.keys():
        n, py = times["native"], times["python"]
        print(f"speed-up  {py[0] / n[0]:>9.1f}x {py[1] / n[1]:>13.1f}x")
        ref = kernels.get_backend("python").viterbi_trellis(logp, ids, 0)
        got = kernels.get_backend("native").viterbi_trellis(logp, ids, 0)
        assert np.array_equal(ref[0], got[0]) and ref[1:] == got[1:], "backends disagree"
    else:
        print("native kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
