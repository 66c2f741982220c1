#!/usr/bin/env python3
"""Benchmark the gap pipeline and the two evaluators.

Times gap_report per witness family and compares the tensor evaluator
against the recursive reference evaluator on the SF_BSR witness model.
"""

import time

from sepfrag.semantics import evaluate, evaluate_reference
from sepfrag.witnesses import WitnessFamily, gap_report, gen_witness, gen_witness_model


def benchmark_gap(family: WitnessFamily, n_values: list):
    """Time each row of the gap table."""
    print(f"\n{family.value}")
    print(f"{'n':>4} {'Source':>8} {'Target':>10} {'Leading':>8} {'Status':>16} {'Time (s)':>10}")
    print("-" * 62)

    for n in n_values:
        start = time.perf_counter()
        row = gap_report(family, [n])[0]
        elapsed = time.perf_counter() - start

        source = '' if row.source_len is None else row.source_len
        target = '' if row.target_len is None else row.target_len
        leading = '' if row.leading_exists is None else row.leading_exists
        print(f"{n:>4} {source:>8} {target:>10} {leading:>8} {row.status:>16} {elapsed:>10.3f}")


def benchmark_evaluators(repeats: int = 20):
    """Compare evaluate and evaluate_reference on the 12-element witness model."""
    phi = gen_witness(WitnessFamily.SF_BSR, 1)
    model = gen_witness_model(WitnessFamily.SF_BSR, 1).structure

    start = time.perf_counter()
    for _ in range(repeats):
        fast = evaluate(model, phi)
    tensor_time = (time.perf_counter() - start) / repeats

    start = time.perf_counter()
    for _ in range(repeats):
        slow = evaluate_reference(model, phi)
    reference_time = (time.perf_counter() - start) / repeats

    print(f"\n{'Evaluator':>12} {'Time (ms)':>10} {'Result':>8}")
    print("-" * 32)
    print(f"{'tensor':>12} {tensor_time * 1000:>10.2f} {str(fast):>8}")
    print(f"{'reference':>12} {reference_time * 1000:>10.2f} {str(slow):>8}")
    if tensor_time > 0:
        print(f"Speedup: {reference_time / tensor_time:.1f}x")


if __name__ == "__main__":
    print("=" * 62)
    print("Gap pipeline benchmark")
    print("=" * 62)

    benchmark_gap(WitnessFamily.MFO_BSR, [1, 2, 3, 4])
    benchmark_gap(WitnessFamily.SF_BSR, [1, 2])
    benchmark_gap(WitnessFamily.SFO2_FO2, [1, 2])
    benchmark_evaluators()
