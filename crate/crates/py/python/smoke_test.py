"""Smoke test for the compiled `rainbow` module.

Build and install first, for example `pip install --no-build-isolation crates/py`
or `maturin develop -m crates/py/Cargo.toml`, then run this script.
"""

import json
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import rainbow


def main() -> int:
    assert rainbow.census_count(4) == 15
    assert rainbow.census_count(3, mode="exact") == 10

    g = rainbow.ColoredGraph.iterated_blowup(2)
    assert g.n == 16
    assert g.rainbow_triangles() == rainbow.recursive_count(16) == 272
    assert g.density("RBT") == Fraction(272, 560)
    assert rainbow.ColoredGraph("3:012").rainbow_triangles() == 1

    limits = rainbow.limits()
    assert limits["RBT"] == Fraction(2, 5)
    assert limits["MONOT"] == Fraction(1, 5)

    result = rainbow.search(5)
    assert result["maximum"] == rainbow.recursive_count(5) == 7

    with tempfile.TemporaryDirectory() as tmp:
        cert = Path(tmp) / "trivial.cert"
        cert.write_text("CERT v1\nSENSE GEQ\nBOUND 1\nTARGET\n  1: 1/1\nSLACK\nEND\n")
        assert rainbow.verify_certificate(str(cert))["accepted"]
        cert.write_text("CERT v1\nSENSE GEQ\nBOUND 2\nTARGET\n  1: 1/1\nSLACK\nEND\n")
        verdict = rainbow.verify_certificate(str(cert))
        assert not verdict["accepted"] and verdict["diagnostics"]

    assert "one_color_case1" in rainbow.programs()
    report = rainbow.solve("one_color_case1")
    assert report["optimum"]["verified"], json.dumps(report)

    try:
        rainbow.ColoredGraph("3:019")
    except ValueError:
        pass
    else:
        raise AssertionError("bad color accepted")

    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
