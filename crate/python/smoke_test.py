#!/usr/bin/env python3
"""Smoke test for the capa_py extension module.

Builds the cdylib with cargo, stages it as an importable module, and runs a
handful of end-to-end checks against known values.

Usage: python3 python/smoke_test.py [--release]
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension(release: bool) -> Path:
    cmd = ["cargo", "build", "-p", "capa-py"]
    profile = "debug"
    if release:
        cmd.append("--release")
        profile = "release"
    subprocess.run(cmd, cwd=REPO, check=True)
    lib = REPO / "target" / profile / "libcapa_py.so"
    if not lib.exists():  # e.g. macOS
        lib = REPO / "target" / profile / "libcapa_py.dylib"
    if not lib.exists():
        raise SystemExit(f"extension library not found under target/{profile}")
    stage = Path(tempfile.mkdtemp(prefix="capa_py_"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    target = stage / f"capa_py{suffix}"
    shutil.copyfile(lib, target)
    return stage


def approx(a, b, rel=1e-9, abs_tol=0.0):
    assert abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_tol), f"{a} != {b}"


def main() -> None:
    release = "--release" in sys.argv[1:]
    sys.path.insert(0, str(build_extension(release)))
    import capa_py as cp

    wave = cp.Wave(0.0107)
    approx(wave.wavenumber * wave.lambda_m, 2 * math.pi, rel=1e-12)

    # boresight gain: closed form and quadrature both give 1/6 for L = 2r
    boresight = cp.UserSource(3.0, math.pi / 2, math.pi / 2)
    rect = cp.ApertureRegion.planar_rect(6.0, 6.0)
    approx(cp.closed_form_gain_planar(6.0, 6.0, boresight), 1.0 / 6.0, rel=1e-12)
    approx(cp.channel_gain(wave, rect, boresight), 1.0 / 6.0, rel=1e-6)

    # two-user statistics and order-independent sum rate
    u1 = cp.UserSource(10.0, math.pi / 3, math.pi / 6)
    u2 = cp.UserSource(20.0, math.pi / 3, math.pi / 6)
    small = cp.ApertureRegion.planar_rect(0.2, 0.2)
    spec = cp.QuadratureSpec(panel_order=8)
    ch = cp.channel_statistics(wave, small, u1, u2, spec)
    assert 0.0 < ch.rho_u_abs <= 1.0
    lb1 = cp.LinkBudget.from_db(30.0)
    lb2 = cp.LinkBudget.from_db(40.0)
    r21 = cp.rates(lb1, lb2, ch, "2->1")
    r12 = cp.rates(lb1, lb2, ch, "1->2")
    c = cp.sum_rate_capacity(lb1, lb2, ch)
    approx(sum(r21), c, rel=0, abs_tol=1e-9)
    approx(sum(r12), c, rel=0, abs_tol=1e-9)
    assert c <= cp.sum_rate_capacity_upper_bound(lb1, lb2, ch) + 1e-12

    # whitening roots and the decode SNR's branch independence
    plus, minus = cp.lambda_star_roots(1e3, 0.1)
    approx(plus, -10.0 + 10.0 / math.sqrt(101.0), rel=1e-12)
    plus_ch, minus_ch = cp.lambda_star_roots(lb1.gamma_bar, ch.a1)
    g_plus = cp.gamma2_sic(lb2, ch, plus_ch)
    g_minus = cp.gamma2_sic(lb2, ch, minus_ch)
    approx(g_plus, g_minus, rel=1e-10)

    # capacity region pentagon
    region = cp.capacity_region(lb1, lb2, ch, segment_points=5)
    approx(
        region["corner_21"][0] + region["corner_21"][1],
        region["corner_12"][0] + region["corner_12"][1],
        rel=0,
        abs_tol=1e-9,
    )
    assert len(region["segment"]) == 5

    # element grid bookkeeping
    grid = cp.ApertureRegion.spd_grid(3, 3, 0.00535, 0.003)
    assert len(grid.element_centers()) == 9
    approx(grid.occupation_ratio(), (0.003 / 0.00535) ** 2, rel=1e-12)

    # short SIC pipeline run, seeded and reproducible
    a = cp.sic_pipeline(wave, small, u1, u2, lb1, lb2, 1.0, 7, 200, n_per_axis=8)
    b = cp.sic_pipeline(wave, small, u1, u2, lb1, lb2, 1.0, 7, 200, n_per_axis=8)
    assert a["snr2_empirical"] == b["snr2_empirical"]
    assert 0.0 <= a["ser_user1"] <= 1.0

    # asymptotic sum rate
    approx(cp.asymptotic_sum_rate(2.0, 2.0, 1.0), 2.0, rel=1e-12)

    print("capa_py smoke test: OK")


if __name__ == "__main__":
    main()
