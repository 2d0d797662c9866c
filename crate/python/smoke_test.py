"""Build the extension, import it and exercise a few calls."""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "idealc-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libidealc_py.so"
    dest = pathlib.Path(tempfile.mkdtemp()) / "idealc.so"
    shutil.copy(lib, dest)
    return dest.parent


def main():
    sys.path.insert(0, str(build()))
    import idealc

    ib = idealc.Submeasure("ib")
    assert ib.eval([3, 4, 5, 6]) == "4"
    assert idealc.Submeasure("summable:1/(n+1)").eval([0, 1]) == "3/2"
    assert ib.check_axioms(seed=1, trials=50)["passed"]

    r = idealc.Submeasure("counting").hull([0, 2, 4], prefix=6)
    assert r["hull_value"] == "3" and r["gap"] == "0"

    assert idealc.Ideal("Fin (x) Fin").member("(column 0)", prefix=64)["verdict"] == "ProvedIn"

    c = idealc.Ideal("BI").classify()
    assert c["attributes"]["egorov"]["value"] == "Yes"
    assert idealc.replay(json.dumps(c["derivation"]))

    rows = idealc.golden()
    assert len(rows) == 15 and all(r["expected"] == r["derived"] for r in rows)

    try:
        idealc.Ideal("Bogus")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")

    code, out, _ = idealc.cli(["golden", "--format", "text"])
    assert code == 0 and len(out.splitlines()) == 15
    print("smoke test ok")


if __name__ == "__main__":
    main()
