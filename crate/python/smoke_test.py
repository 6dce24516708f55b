"""Smoke test for the pytpkit extension module.

Uses an installed `pytpkit` when there is one, and otherwise loads the
library built by `cargo build -p tpkit-py --release --features extension-module`.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "crates" / "cli" / "tests" / "data"


def load():
    try:
        import pytpkit

        return pytpkit
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libpytpkit.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("pytpkit", str(lib))
            spec = importlib.util.spec_from_file_location("pytpkit", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pytpkit not found: build it with cargo or maturin first")


def main():
    tp = load()

    ack = tp.Trs.from_file(str(DATA / "ackermann.trs"))
    assert len(ack) == 3
    cert = ack.check()
    assert cert["status"] == "YES", cert
    assert ack.greater("ack(s(0),0)", "ack(0,s(0))") is True
    run = ack.normalize("ack(s(0),s(0))")
    assert run["outcome"] == "normal" and run["normal_form"] == "s(s(s(0)))", run

    selfembed = tp.Trs.from_file(str(DATA / "selfembed.trs"))
    assert selfembed.check()["status"] == "NO_INSTANCE"
    assert selfembed.normalize("f(0)", fuel=5)["outcome"] == "fuel_exhausted"

    universe = ack.export(2)
    assert len(universe) == 13 and all(universe.wellfounded())
    assert universe.gl()["discrepancy"] is False

    cycle = tp.Instance.from_json((DATA / "cycle.json").read_text())
    assert cycle.wellfounded() == [False, False, False]
    mbs = cycle.mbs(4)
    assert mbs["outcome"] == "minimal_bad" and mbs["prefix"] == [0, 1, 0, 1], mbs
    assert cycle.stp()["verdict"] == "HypothesesFail"
    assert tp.Instance.from_json(cycle.to_json()).labels() == ["a", "b", "c"]

    report = tp.campaign("stp", seed=7, count=200)
    assert report["passed"] == report["count"] == 200, report

    out = tp.phi("5,4,3;7")
    assert out["result"] == {"outcome": "index", "index": 2}, out["result"]
    cut = tp.phi("5,4,3;7", realizer="consult", max_depth=1)
    assert cut["result"]["outcome"] == "budget_exceeded"

    try:
        tp.Trs.parse("(VAR x)\n(RULES\n f(x, -> x\n)")
    except ValueError as e:
        assert "3:" in str(e)
    else:
        raise AssertionError("malformed TRS accepted")

    print(json.dumps({"smoke_test": "ok", "stp_campaign": f"{report['passed']}/{report['count']}"}))


if __name__ == "__main__":
    main()
