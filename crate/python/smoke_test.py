"""Smoke test for the Python extension.

Build and install first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/sarkozy-*.whl
"""

import sarkozy


def main():
    f4 = sarkozy.Field(4)
    assert f4.modulus == [1, 1, 1]
    assert f4.mul(2, 2) == 3
    assert f4.mul(2, f4.inv(2)) == 1
    assert sarkozy.Field(2).parse("b^2+b") == [0, 1, 1]

    rep = sarkozy.bound(2, 2, n=10)
    assert abs(rep["x_star"] - 0.6) < 1e-6
    assert abs(rep["t"] - 1.93783) < 1e-4
    assert rep["value"]["bound"] > 0

    phi = sarkozy.phi(3, "b^2", 3)
    assert phi["m"] == 2

    built = sarkozy.construct(3, "b^2", 3)
    assert built["support"] and built["identity"]["ok"]

    cert = sarkozy.certify(2, "b^2", 3)
    assert cert["pass"]

    found = sarkozy.search(2, "b^2", 2)
    assert found["alpha"] == 2 and found["witness"] == [0, 2]
    assert sarkozy.search(2, "b^2", 2, setting="field")["alpha"] == 1

    tr = sarkozy.prove(2, "b^2+b", 2, a=[0, 1, 2, 3])
    assert tr["certificate"]["rank"] == 4

    out = sarkozy.sweep([2], [2], [1, 2, 3])
    assert len(out["entries"]) == 3

    assert int(sarkozy.count_monomials(2, 3, 2, 1)) == 6

    try:
        sarkozy.prove(2, "b^2", 2, a=[0, 1])
    except ValueError as e:
        assert "not free" in str(e)
    else:
        raise AssertionError("expected ValueError")

    assert all(s["failure"] is None for s in sarkozy.selftest())
    print("smoke test ok")


if __name__ == "__main__":
    main()
