"""Builds the extension module and checks a handful of values through it.

Run from the repository root: python3 python/smoke_test.py
"""

import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "sharpbe-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libsharpbe_py.so"
    dest = pathlib.Path(tempfile.mkdtemp()) / "sharpbe_py.so"
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    build()
    import sharpbe_py as sb

    c = json.loads(sb.constants())
    close(c["theta0"], 3.99589567, 1e-7)
    close(c["kappa"], 0.09916191, 1e-7)

    rad = sb.Distribution("rademacher")
    close(rad.kolmogorov_to_normal(), 0.5 * math.erf(1 / math.sqrt(2)), 1e-12)
    rows = json.loads(rad.verify_inequality(20, "theorem2"))
    assert len(rows) == 20 and all(r["pass"] for r in rows)
    rho, tail = rad.compound_poisson_distance(4.0)
    assert rho - tail <= sb.poisson_be_bound(0.0, 1.0, 1.0, 4.0)

    cert = sb.Certificate(0.425, 0.822, 0.385, 5.755, n=5)
    assert cert.c <= 0.335789 and cert.verify()
    again = sb.Certificate.from_json(cert.to_json())
    assert again.c == cert.c

    close(sb.mixed_bound("exponential:t=100"), 0.05408, 5e-6)
    close(sb.limit_cdf(0.7, r=1.0), sb.limit_cdf(0.7), 1e-9)
    assert sb.n_star(1.0, 0.5) == 16

    report = json.loads(sb.certify(2))
    assert report["passed"]
    print("python smoke test passed")


if __name__ == "__main__":
    main()
