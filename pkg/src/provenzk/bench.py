"""Proving-time benchmark over growing average-of-dot-products statements."""

from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import astuple, dataclass, fields
from pathlib import Path

from .compiler import CircuitConfig, compile_config
from .crypto import KeyPair
from .zkproof import SoundnessTarget, prove, verify

DEFAULT_SIZES = (64, 256, 1024, 4096)
BENCH_KAPPA = 1
ELEMENT_BITS = 16


@dataclass(frozen=True)
class BenchRow:
    N: int
    gates: int
    mul_gates: int
    t: int
    compile_ms: float
    prove_ms: float
    verify_ms: float
    proof_bytes: int


COLUMNS = tuple(f.name for f in fields(BenchRow))


def matrix_shape(n: int) -> tuple[int, int]:
    """(rows, cols) with rows*cols + cols == n and cols as close to sqrt(n) as possible."""
    if n < 2:
        raise ValueError("size must be at least 2")
    best = None
    for c in range(1, n // 2 + 1):
        if n % c == 0 and n // c >= 2:
            if best is None or abs(c - math.sqrt(n)) < abs(best - math.sqrt(n)):
                best = c
    return n // best - 1, best


def bench_config(n: int, rng: random.Random, kp: KeyPair) -> CircuitConfig:
    rows, cols = matrix_shape(n)
    bound = 1 << ELEMENT_BITS
    matrix = [[rng.randrange(bound) for _ in range(cols)] for _ in range(rows)]
    vector = [rng.randrange(bound) for _ in range(cols)]
    return CircuitConfig.from_dict({
        "version": 1,
        "data": [{"name": "matrix", "kind": "int", "shape": [rows, cols], "values": matrix},
                 {"name": "vector", "kind": "int", "shape": [cols], "values": vector}],
        "authority": {"private_key": kp.secret_bytes().hex()},
        "function": {"name": "average_dot_products",
                     "args": {"matrix": "matrix", "vector": "vector"}},
    })


def run_bench(sizes=DEFAULT_SIZES, kappa: int = BENCH_KAPPA, seed: int = 0,
              workers: int = 1, log=None) -> list[BenchRow]:
    if not sizes:
        raise ValueError("need at least one size")
    rng = random.Random(seed)
    kp = KeyPair.generate(seed=seed)
    target = SoundnessTarget(kappa)
    rows = []
    for n in sizes:
        cfg = bench_config(n, rng, kp)
        t0 = time.perf_counter()
        bundle = compile_config(cfg)
        witness = bundle.witness()
        t1 = time.perf_counter()
        proof = prove(bundle.circuit, witness, bundle.publics, target,
                      seed=f"bench-{seed}-{n}".encode(), workers=workers)
        t2 = time.perf_counter()
        verdict = verify(bundle.circuit, bundle.publics, proof)
        t3 = time.perf_counter()
        if not verdict:
            raise RuntimeError(f"benchmark proof for N={n} rejected: {verdict}")
        stats = bundle.circuit.stats()
        row = BenchRow(n, stats["gates"], stats["mul_gates"], proof.t,
                       round((t1 - t0) * 1e3, 3), round((t2 - t1) * 1e3, 3),
                       round((t3 - t2) * 1e3, 3), len(proof.to_bytes()))
        rows.append(row)
        if log:
            log(row)
        del proof, witness, bundle
    return rows


def report_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(astuple(r))
    return buf.getvalue()


def parse_report(text: str) -> list[BenchRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected report header {reader.fieldnames}")
    out = []
    for rec in reader:
        out.append(BenchRow(*(float(rec[c]) if c.endswith("_ms") else int(rec[c])
                              for c in COLUMNS)))
    return out


def report_dat(rows) -> str:
    """Whitespace-separated columns for gnuplot/pgfplots."""
    lines = ["# " + " ".join(COLUMNS)]
    lines += [" ".join(str(v) for v in astuple(r)) for r in rows]
    return "\n".join(lines) + "\n"


def write_report(rows, out_dir: str | Path, plot: bool = True) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "bench.csv", "dat": out / "bench.dat"}
    paths["csv"].write_text(report_csv(rows))
    paths["dat"].write_text(report_dat(rows))
    if plot:
        from .plotting import plot_bench
        paths["png"] = plot_bench(rows, out / "bench.png")
    return paths
