"""Smoke test for the spherelab extension module.

Build first:

    cargo build --release -p spherelab-py

then run `python python/smoke_test.py`. The script looks for the built
library under target/ and imports it as `spherelab`.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    here = pathlib.Path(__file__).resolve().parent
    candidates = [here / "spherelab.so"]
    for profile in ("release", "debug"):
        for name in ("libspherelab_py.so", "libspherelab_py.dylib", "spherelab_py.dll"):
            candidates.append(ROOT / "target" / profile / name)
    for path in candidates:
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("spherelab", str(path))
            spec = importlib.util.spec_from_loader("spherelab", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("spherelab library not found; run `cargo build -p spherelab-py` first")


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    sl = load()
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        failures += not ok
        print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")

    check("gamma(1/2)", close(sl.gamma(0.5), math.sqrt(math.pi), 1e-14))

    one2 = sl.Density.constant(2)
    one3 = sl.Density.constant(3)
    check("cosine n=2", close(sl.lp_cosine(one2, 1.0, [1.0, 0.0]), 4.0, 1e-12))
    check("cosine n=3", close(sl.lp_cosine(one3, 1.0, [0.0, 0.0, 1.0]), 2 * math.pi, 1e-12))
    check("radon n=3", close(sl.radon(one3, [0.0, 0.0, 1.0]), 2 * math.pi, 1e-12))

    w = sl.Density.preset("watson", 3)
    x = [0.3, -0.5, 0.8]
    f = lambda y: sl.lp_cosine(w, 2.5, y)
    a = sl.analytic_deriv_frac(w, 2.5, [2, 0, 0], x)
    fd = sl.finite_diff(f, [2, 0, 0], x)
    check("second derivative p=2.5", close(a, fd, 1e-4), f"{a:.8g} vs {fd:.8g}")

    g = sl.grad_hp(w, 2.5, x)
    euler = sum(gi * xi for gi, xi in zip(g, x))
    check("euler identity", close(euler, 2.5 * f(x), 1e-10))

    radii = sl.principal_radii(one3, 2.0, [0.0, 0.0, 1.0])
    check("radii of a ball", all(r > 0 for r in radii) and close(radii[0], radii[1], 1e-10), str(radii))

    grid = sl.direction_grid(3, 40)
    rep = sl.convexity_check(one3, 2.5, grid)
    check("constant density is convex", rep["convex"] and rep["disagreements"] == 0)

    inv = sl.inversion_ratio_check()
    check("inversion constant", close(inv["c_estimate"], 0.5, 1e-6), f"c = {inv['c_estimate']:.12f}")

    try:
        sl.lp_cosine(one3, 0.5, [1.0, 0.0, 0.0])
        check("p < 1 rejected", False)
    except ValueError:
        check("p < 1 rejected", True)

    d = sl.Density.from_json(one3.to_json())
    check("json round trip", d.to_json() == one3.to_json() and d.dim == 3)

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
