"""Smoke test for the `lpdecode` Python extension.

Build and install the wheel first, e.g.

    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/lpdecode-*.whl
"""

import lpdecode


def main():
    h = lpdecode.ParityCheck.hamming_7_4()
    print(h, "facets:", h.inequality_count())
    assert h.inequality_count() == 24

    cfg = lpdecode.SolverConfig("pdip", "cg", rounding_cadence=0)
    res = lpdecode.decode(h, [1.0] * 7, cfg)
    print(res)
    assert res.status == "Integral" and res.word == [0] * 7 and res.ml_certificate

    gamma = [-1.2, 0.4, 0.9, -0.3, 1.1, 0.6, 0.8]
    costs = {}
    for alg in lpdecode.ALGORITHMS:
        for inner in ("cg", "dense"):
            dec = lpdecode.Decoder(h, lpdecode.SolverConfig(alg, inner, rounding_cadence=0))
            costs[alg, inner] = dec.decode(gamma).cost
    spread = max(costs.values()) - min(costs.values())
    print("cost spread over solvers:", spread)
    assert spread < 1e-5

    llr = lpdecode.transmit([0] * 7, "bsc:0.05", seed=1)
    assert len(llr) == 7

    summary = lpdecode.simulate(h, "bsc:0.05", 2000, seed=7, compare_ml=True)
    print("FER", summary["fer"], "ML FER", summary["ml"]["fer"])
    assert summary["ml"]["certificate_violations"] == 0
    assert summary["invalid_early_rounded"] == 0

    try:
        lpdecode.SolverConfig("simplex")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("bad solver name accepted")

    print("ok")


if __name__ == "__main__":
    main()
