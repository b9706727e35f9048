#!/usr/bin/env python3
"""Smoke test for the `unicover` Python extension module.

Builds nothing itself: run `cargo build -p unicover-py` first, then
`python3 python/smoke_test.py`. The script copies the produced cdylib
next to itself under the importable name `unicover.so`.
"""

import json
import math
import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def stage_module() -> None:
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libunicover.so", "libunicover.dylib", "unicover.dll")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p unicover-py")
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy2(built, HERE / f"unicover{suffix}")
    sys.path.insert(0, str(HERE))


def main() -> None:
    stage_module()
    import unicover

    # arc-set algebra
    a = unicover.ArcSet.ball(0.4, 0.05)
    b = unicover.ArcSet.ball(0.9, 0.2)  # wraps across 0
    u = a.union(b)
    assert abs(u.measure() - (0.1 + 0.4)) < 1e-12, u.measure()
    assert u.contains(0.38) and u.contains(0.05) and not u.contains(0.6)
    assert u.complement().measure() + u.measure() == 1.0
    assert a.intersect(b).is_empty()

    # full-circle Riesz energy has the closed form 2^s / (1 - s)
    for s in (0.2, 0.5, 0.8):
        exact = unicover.ArcSet.full_circle().riesz_energy(s)
        assert abs(exact - 2.0**s / (1.0 - s)) < 1e-10, (s, exact)

    # headline lower-bound constant and its theta-optimum
    at = unicover.lower_bound(1.0, 8.6)
    assert at["valid"] and abs(at["value"] - 0.2177444298485995) < 1e-12, at
    opt = unicover.optimize_lower(1.0)
    assert opt["value"] >= at["value"] - 1e-9, opt

    # boundary identity s(c*(theta), theta) = 1
    for theta in (1.5, 2.0, 8.6):
        s = unicover.s_exponent(unicover.c_star(theta), theta)
        assert abs(s - 1.0) < 1e-10, (theta, s)

    # family parsing and classification
    fam = unicover.Family("pow:c=1,alpha=3")
    assert math.isclose(fam.r(10), 1e-3)
    verdict = json.loads(fam.classify_json())
    assert verdict["countable"] == "yes", verdict

    # seeded sample paths are deterministic and stream-separated
    p1 = unicover.sample_path(123, 0, 50)
    p2 = unicover.sample_path(123, 0, 50)
    p3 = unicover.sample_path(123, 1, 50)
    assert p1 == p2 and p1 != p3
    assert all(0.0 <= x < 1.0 for x in p1)

    # a tiny end-to-end experiment
    res = json.loads(
        unicover.measure_experiment_json(
            unicover.Family("pow:c=1,alpha=1"), 2.0, 2, 4, 200,
            unicover.DEFAULT_MASTER_SEED,
        )
    )
    assert abs(res["mean"] - res["expected"]) <= 4 * res["std_err"], res

    print("smoke test ok")


if __name__ == "__main__":
    main()
