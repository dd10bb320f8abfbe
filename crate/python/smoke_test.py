"""Import the extension and run each exposed operation once on 11a1.

Build first, for example:
    maturin develop -m crates/py/Cargo.toml --features extension-module
or
    cargo build -p ecbf-py --release --features extension-module
    cp target/release/libecbf.so python/ecbf.so
"""

import json
import pathlib
import sys
from fractions import Fraction

import ecbf

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def main() -> int:
    e = ecbf.Curve([0, -1, 1, -10, -20])
    assert e.discriminant == -161051
    assert e.conductor() == 11
    assert e.an(6) == [1, -2, -1, 2, 1, 2]
    assert e.a_p(7) == -2 and e.is_good_ordinary(7)
    (ld,) = e.local_data()
    assert (ld["kodaira"], ld["split"], ld["tamagawa"]) == ("I5", True, 5)
    assert e.torsion_order() == 5
    assert abs(e.omega_plus() - 1.269209304279553) < 1e-12

    ms = ecbf.ModularSymbols(e)
    assert ms.plus(0, 1) == Fraction(1, 5)
    lp = ms.stabilized_lp(7, 1, 3)
    assert (lp["mu"], lp["lambda"]) == (0, 0)
    assert ms.lhs_valuation(7, 1) == 0

    report = ms.check_theorem(7, 0, str(FIXTURES / "11a1_p7_n0.json"))
    assert report["verdict"] == "pass", report
    bad = ms.check_theorem(7, 0, str(FIXTURES / "11a1_p7_n0_corrupt.json"))
    assert bad["verdict"] == "fail"

    s = ecbf.BFSystem.load(str(FIXTURES / "z9_times3.json"))
    assert s.sum("brute") == s.sum("closed") == 27

    assert ecbf.primes_above(7, 5, 2) == 5
    print(json.dumps({"ok": True, "theorem": report["verdict"], "bf": s.sum()}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
