#!/usr/bin/env python3
"""Run every certificate end to end and print one verdict line per stage.

This is the long-form companion to the acceptance tests: the same builds
and checks, but as a plain script with timings, suitable for leaving
running after a change to the construction internals.  Artifacts are
written (canonical JSON) when --outdir is given, so the byte-identity
stage can diff real files.

Run:  python3 scripts/run_certification.py [--outdir DIR] [--quick]
Exit status 0 when every stage passes, 1 otherwise.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cantor_shrink.exact import canonical_dumps, pow2
from cantor_shrink.graphcover import (
    build_sequence,
    check_bidirectional,
    check_edge_surjective,
    check_minimality_certificate,
    check_transitivity_certificate,
    check_weak_mixing_certificate,
    invariant_subsystem,
    periodic_point_free_certificate,
    preimage_counts,
)
from cantor_shrink.interval_embed import (
    audit_scheme,
    build_graph_scheme,
    build_odometer_scheme,
    derivative_ratio_bound,
    scheme_to_json,
    verify_derivative_ratios,
    verify_lrs_pairs,
)
from cantor_shrink.metric_systems import (
    OMEGA,
    build_attractor_repellor,
    build_fixed_point_system,
    check_lrs,
    entropy_estimate,
    full_shift_midpoint_system,
    midpoint_system,
    periodic_points,
    product_system,
    shrinking_propositions_oracle,
    verify_deformed_lrs,
    verify_extension_lrs,
)
from cantor_shrink.odometer import OdometerSpec

failures = 0


def stage(name: str, ok: bool, started: float, detail: str = "") -> None:
    global failures
    failures += not ok
    note = f"  [{detail}]" if detail else ""
    print(f"{'ok  ' if ok else 'FAIL'} {time.perf_counter() - started:7.2f}s  {name}{note}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", help="write the built artifacts here")
    parser.add_argument("--quick", action="store_true", help="shallower builds for a smoke run")
    args = parser.parse_args()
    outdir = Path(args.outdir) if args.outdir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)

    od_depth = 5 if args.quick else 8
    spec = OdometerSpec.from_list([2, 4, 8])

    t = time.perf_counter()
    odometer = build_odometer_scheme(spec, od_depth + 1)
    audit = audit_scheme(odometer)
    stage(f"odometer depth {od_depth + 1}: build + audit", audit.passed, t,
          f"{audit.stats['cells']} cells")

    t = time.perf_counter()
    ratios = verify_derivative_ratios(odometer)
    last = derivative_ratio_bound(odometer, od_depth)
    stage("derivative ratios under bound, strictly decreasing", ratios.passed, t,
          f"depth-{od_depth} ratio {last}")

    t = time.perf_counter()
    lrs_ok = True
    for depth in range(1, od_depth):
        report = verify_lrs_pairs(odometer, depth)
        lrs_ok = lrs_ok and report.passed and bool(report.margins)
    stage(f"odometer sibling-pair margins, depths 1..{od_depth - 1}", lrs_ok, t)

    t = time.perf_counter()
    wm_levels = 2 if args.quick else 4
    wm = build_sequence("weakly-mixing", wm_levels)
    wm_ok = all(
        check_bidirectional(wm.homs[n], wm.graph(n + 1), wm.graph(n))
        and check_edge_surjective(wm.graph(n))
        and check_minimality_certificate(wm, n)
        for n in range(wm.top)
    )
    wm_ok = wm_ok and check_weak_mixing_certificate(wm, wm.top)
    wm_ok = wm_ok and max(max(preimage_counts(wm, n).values()) for n in range(wm.top)) <= 12
    stage(f"weakly-mixing tower to {wm_levels}: covers + minimality + weak mixing", wm_ok, t)

    t = time.perf_counter()
    tr = build_sequence("transitive", 3)
    tr_ok = all(
        check_transitivity_certificate(tr, n) and not check_minimality_certificate(tr, n)
        for n in range(tr.top)
    )
    lengths = [lvl.cycle_lengths[0] for lvl in invariant_subsystem(tr).levels]
    tr_ok = tr_ok and lengths == [2 * 3**n for n in range(4)]
    free = periodic_point_free_certificate(tr, tr.top)
    stage("transitive tower: transitive, non-minimal, periodic-free",
          tr_ok and free.ok, t, f"restricted lengths {lengths}")

    t = time.perf_counter()
    graph_depth = 2 if args.quick else 3
    graph_scheme = build_graph_scheme(wm, graph_depth)
    graph_audit = audit_scheme(graph_scheme)
    ratio_ok = all(
        derivative_ratio_bound(graph_scheme, n) == 12 * pow2(-len(wm.graph(n).vertices))
        for n in range(graph_depth)
    )
    pair_ok = all(verify_lrs_pairs(graph_scheme, d).passed for d in range(graph_depth))
    stage(f"graph scheme depth {graph_depth}: audit + exact 12*2^-s ratio + margins",
          graph_audit.passed and ratio_ok and pair_ok, t)

    t = time.perf_counter()
    base3 = build_odometer_scheme(spec, 3)
    product = product_system(midpoint_system(base3, 3), midpoint_system(base3, 3))
    result = check_lrs(product)
    stage("product of depth-3 midpoint systems is locally shrinking",
          result.ok and result.min_margin > 0, t, f"min margin {result.min_margin}")

    t = time.perf_counter()
    tall = build_odometer_scheme(OdometerSpec.from_list([2, 4, 8, 16, 32]), 5)
    tail = 8 if args.quick else 16
    extension = build_attractor_repellor(tall, levels=3, tail=tail, refine=5)
    ext_report = verify_extension_lrs(extension)
    stage(f"attractor-repellor extension (3 levels, tail {tail})", ext_report.passed, t,
          f"{ext_report.stats['points']} points")

    t = time.perf_counter()
    small_ext = build_attractor_repellor(base3, levels=1, tail=4, refine=3, rate=4)
    triple = build_fixed_point_system(base3, small_ext, base3, truncation=5)
    triple_report = verify_deformed_lrs(triple)
    cycle = periodic_points(triple.as_system())
    stage("deformed triple: shrinking + unique periodic point",
          triple_report.passed and cycle == [OMEGA], t)

    t = time.perf_counter()
    trials = 200 if args.quick else 1000
    oracle = shrinking_propositions_oracle(trials=trials, max_size=8, seed=0)
    stage(f"shrinking-map oracle, {trials} systems", not oracle["counterexamples"], t,
          f"{oracle['shrinking_systems']} shrinking")

    t = time.perf_counter()
    rows = entropy_estimate(midpoint_system(base3, 3), [Fraction(1, 1_572_864)], [1, 2, 3])
    decreasing = all(a["estimate"] > b["estimate"] for a, b in zip(rows, rows[1:]))
    control = entropy_estimate(full_shift_midpoint_system(6), [Fraction(1, 4)], [6])[0]
    stage("entropy: odometer decays, shift control near log 2",
          decreasing and abs(control["estimate"] - math.log(2)) <= 0.15 * math.log(2), t,
          f"control {control['estimate']:.4f}")

    t = time.perf_counter()
    blob = canonical_dumps(scheme_to_json(base3))
    again = canonical_dumps(scheme_to_json(build_odometer_scheme(spec, 3)))
    stage("byte-identical rebuild", blob == again, t, f"{len(blob)} bytes")
    if outdir:
        (outdir / "odometer3.json").write_text(blob)
        (outdir / "graph_scheme.json").write_text(canonical_dumps(scheme_to_json(graph_scheme)))
        print(f"artifacts written to {outdir}")

    print(f"\n{'ALL STAGES PASSED' if not failures else f'{failures} STAGE(S) FAILED'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
