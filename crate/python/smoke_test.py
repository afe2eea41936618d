"""Builds the extension module and exercises it end to end.

Run from anywhere: python3 python/smoke_test.py
"""

import importlib
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "pygriforge", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libpygriforge.so"
    out = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, out / "pygriforge.so")
    sys.path.insert(0, str(out))
    return importlib.import_module("pygriforge")


def main():
    g = build()

    assert g.is_prime(257) and not g.is_prime(4)

    src = g.GaloisRing.random(2, 8, 6, seed=1)
    dst = g.GaloisRing.random(2, 8, 6, seed=2)
    iso = g.RingIsomorphism.build(src, dst, seed=3)
    a, b = src.random_element(4), src.random_element(5)
    assert iso.apply(src.mul(a, b)) == dst.mul(iso.apply(a), iso.apply(b))
    assert iso.apply_inverse(iso.apply(a)) == a

    inst = g.GriInstance.sample(iso, beta=1, k=12, seed=6)
    inst.verify()
    assert all(max(map(abs, v)) <= 1 for v in inst.preimages)
    public = inst.to_text(public_only=True)
    assert "secret" not in public
    again = g.GriInstance.from_text(inst.to_text())
    assert again.to_text() == inst.to_text()

    report = g.attack(inst)
    print(report)
    assert report.lattice_rank == 12
    assert len(report.candidates) > 0 and all(report.verified)

    rnd = inst.distinguish("random", trials=2000, seed=7)
    orc = inst.distinguish("oracle", trials=500, seed=7)
    assert 0.45 <= rnd.rate <= 0.55, rnd.rate
    assert orc.rate >= 0.99, orc.rate

    f, m = g.crt_combine([(2, 3, [1, 1, 0, 1]), (5, 1, [2, 0, 0, 1])])
    assert m == 40 and f[-1] == 1

    try:
        g.GaloisRing(4, 2, [1, 1, 1])
    except g.GriforgeError as e:
        assert "prime" in str(e)
    else:
        raise AssertionError("composite p accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
