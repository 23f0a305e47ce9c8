"""Smoke test for the wmprotect_py extension.

Builds the cdylib with cargo when the module is not importable, loads it from
a temporary directory and checks a handful of values.
"""

import cmath
import importlib
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("wmprotect_py")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "wmprotect-py"],
        cwd=ROOT,
        check=True,
    )
    release = ROOT / "target" / "release"
    candidates = [release / n for n in ("libwmprotect_py.so", "libwmprotect_py.dylib")]
    lib = next(p for p in candidates if p.exists())
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "wmprotect_py.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("wmprotect_py")


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    wm = load()
    p = 1 - math.exp(-2.5)
    wr = wm.reversal_strength(0.1, p)
    close(wr, 0.1 + p * 0.9, 1e-15)

    phi2 = wm.DensityState.pure(math.pi / 2, math.pi / 2)
    rho, n = wm.rho_protect_analytic(phi2, 0.1, p, wr)
    m = rho.matrix()
    close(m[0][0].real, 0.646158422, 1e-8)
    close(abs(m[0][1]), 0.353841578, 1e-8)
    close(n, 0.104392, 1e-6)
    close(rho.fidelity(phi2), 0.853842, 1e-6)

    circ = wm.ProtectionCircuit(0.1, p, wr)
    assert len(circ) == 10, circ.gate_labels()
    sigma = circ.run(phi2)
    assert sigma.dim() == 16
    got, n_sim = wm.extract_protected(sigma)
    close(n_sim, n, 1e-10)
    read = wm.readout_reconstruct(sigma.matrix())
    close(read.matrix()[1][1].real, got.matrix()[1][1].real, 1e-8)

    fixed = wm.nearest_physical([[1.2, 0], [0, -0.2]]).matrix()
    close(fixed[0][0].real, 1.0, 1e-12)
    close(fixed[1][1].real, 0.0, 1e-12)

    e0, e1 = wm.ad_kraus(0.36)
    close(e0[1][1].real, 0.8, 1e-15)
    close(e1[0][1].real, 0.6, 1e-15)

    u = wm.snd_unitary([[0.5, 0], [0, 0.3j]])
    close(abs(u[0][0] - 0.5), 0.0, 1e-12)
    close(abs(u[1][1] - 0.3j), 0.0, 1e-12)

    recs = wm.sweep_time(t=[5.0], theta=[math.pi])
    close(recs[0]["F_protect_theory"], 0.547608, 1e-6)
    close(recs[0]["F_protect_sim"], recs[0]["F_protect_theory"], 1e-8)

    pts = wm.frontier(theta=[0.4225 * math.pi, math.pi])
    assert pts[0][1] == 0.0
    close(pts[1][1], 0.866237, 1e-6)

    passed, suites = wm.verify_all()
    assert passed, suites

    try:
        wm.ProtectionCircuit(1.0, 0.2, 0.3)
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate strength accepted")

    assert cmath.isclose(m[0][1], m[1][0].conjugate())
    print("python smoke test ok:", len(suites), "verify suites passed")


if __name__ == "__main__":
    main()
