#!/usr/bin/env python3
"""Smoke test for the fsrswitch_py extension module.

Builds nothing itself: run `cargo build -p fsrswitch-py --release` first,
then `python3 python/smoke_test.py`. The script locates the cdylib in
target/, exposes it under the importable module name, and drives the
bindings end to end.
"""
import math
import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libfsrswitch_py.so", "libfsrswitch_py.dylib", "fsrswitch_py.dll")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "fsrswitch_py cdylib not found; run `cargo build -p fsrswitch-py --release`"
        )
    staging = Path(tempfile.mkdtemp(prefix="fsrswitch_py_"))
    suffix = ".so" if built.suffix in (".so", ".dylib") else ".pyd"
    shutil.copy2(built, staging / f"fsrswitch_py{suffix}")
    sys.path.insert(0, str(staging))
    import fsrswitch_py

    return fsrswitch_py


def approx(a, b, tol=1e-9):
    assert math.isfinite(a) and abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    fsr = load_module()
    print(f"loaded fsrswitch_py {fsr.__version__}")

    # Routing: the 4x4 AWG with four FSRs, checked against the known map.
    config = fsr.SwitchConfig(4, 8, 4)
    assert config.wavelength_count == 16
    assert fsr.link_wavelengths(config, 1, 2) == [2, 6, 10, 14]
    assert fsr.link_wavelengths(config, 2, 4) == [1, 5, 9, 13]
    assert fsr.reciprocity_check(config, 1, 2)
    w1, w2 = fsr.partition(config, 1, 2)
    assert (w1, w2) == ([2, 6], [10, 14])
    print("routing ok")

    # Traffic and scheduling on a mid-sized switch.
    config = fsr.SwitchConfig.from_wavelength_budget(32, 8, 2)
    batch = fsr.generate_batch(config, 0.7, 0.25, seed=11)
    assert len(batch) > 0
    reparsed = fsr.RequestBatch.from_lines(config, batch.to_lines())
    assert reparsed.requests() == batch.requests()
    outcome = fsr.schedule(config, batch, seed=3, cycle=1)
    inter = outcome.interdomain()
    intra = outcome.intradomain()
    assert inter["offered"] + intra["offered"] == len(batch)
    decided = outcome.decisions()
    assert len(decided) == len(batch)
    assert sum(1 for kind, _ in decided if kind == "granted") == (
        inter["granted"] + intra["granted"]
    )
    trace = outcome.render_trace(batch)
    assert len(trace.splitlines()) == len(batch)
    rerun = fsr.schedule(config, batch, seed=3, cycle=1)
    assert rerun.decisions() == decided, "scheduling must be replayable"
    print(f"scheduling ok ({inter['granted']} inter + {intra['granted']} intra grants)")

    # Analytics against reference values.
    approx(fsr.bp_occupancy(2, 2), 0.25, 1e-12)
    f1 = fsr.bp_inter_f1(64, 64, 0.5, 0.25)
    approx(f1["m1"], 7.875, 1e-12)
    approx(f1["b_inter"], 0.15669303137304022, 1e-9)
    f2 = fsr.bp_inter_f2(32, 64, 0.5, 0.25)
    approx(f2["b_inter"], 0.08070675542694902, 1e-9)
    intra_bp = fsr.bp_intra(64, 64, 0.5, 0.25, f1["b_inter"])
    approx(intra_bp["b_intra"], 0.2484976646882586, 1e-9)
    approx(fsr.bp_single_coupler(2, 64, 1.0, 0.25), 0.10737824615948696, 1e-9)
    print("analytics ok")

    # FEC rate adaptation spot values.
    assert fsr.fec_select(0.0)["k"] == 255
    assert fsr.fec_select(1e-3)["k"] == 223
    assert fsr.fec_select(0.031)["k"] is None
    print("fec ok")

    # A small Monte Carlo sweep: defined BPs, deterministic reruns, and the
    # headline trend (more FSRs help interdomain traffic).
    points = fsr.estimate(32, 8, [1, 2, 4], [0.8], 0.25, runs=300, master_seed=7)
    assert [p["fsr"] for p in points] == [1, 2, 4]
    for p in points:
        assert 0.0 <= p["b_inter"] <= 1.0
        assert p["inter_offered"] > 0
    assert points[-1]["b_inter"] <= points[0]["b_inter"] + 3 * (
        points[0]["b_inter_se"] + points[-1]["b_inter_se"]
    )
    again = fsr.estimate(32, 8, [1, 2, 4], [0.8], 0.25, runs=300, master_seed=7)
    assert again == points
    print(f"monte carlo ok (b_inter F=1 {points[0]['b_inter']:.4f} "
          f"-> F=4 {points[-1]['b_inter']:.4f})")

    # Cross-layer: 4-PAM beats 2-PAM under the shipped model.
    t2 = fsr.evaluate_crosslayer(32, 8, [2], [0.6], 0.25, 100, 7, 2)
    t4 = fsr.evaluate_crosslayer(32, 8, [2], [0.6], 0.25, 100, 7, 4)
    assert t4[0]["t_inter_gbps"] >= t2[0]["t_inter_gbps"] > 0
    print(f"crosslayer ok (T_inter 2-PAM {t2[0]['t_inter_gbps']:.2f} Gb/s, "
          f"4-PAM {t4[0]['t_inter_gbps']:.2f} Gb/s)")

    print("smoke test passed")


if __name__ == "__main__":
    main()
