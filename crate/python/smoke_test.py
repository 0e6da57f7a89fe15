"""Smoke test for the `padic` extension module.

Build and install it first:
    pip install --no-build-isolation -e crates/py
"""

import padic


def main():
    o2 = padic.Lattice.standard(2, 2)
    s = padic.Lattice(2, [["1/2", "0"], ["0", "4"]])
    assert o2.complex_distance(s) == [1, -2]
    assert s.complex_distance(o2) == [2, -1]

    l = padic.Lattice(2, [[1, 1], [0, 2]])
    assert l.norm(["2", "2"]) == -1
    assert l.norm([0, 0]) is None
    assert l.member([1, 1]) and not l.member([0, 1])
    assert l.dual().dual() == l
    assert o2.sum(l) == o2 and o2.meet(l) == l
    assert padic.Lattice.from_json(l.to_json()) == l

    band = padic.Relation(2, 1, [["1", "1"], ["0", "4"]])
    o1 = padic.Lattice.standard(2, 1)
    assert band.dom() == o1 and band.im() == o1
    assert band.ker() == padic.Lattice(2, [[4]])
    assert band.act(o1) == o1
    assert band.compose(band) == band
    assert band.structure_map() == [["1"]]

    report = padic.check_theorem(p=2, n=2, bound=3, trials=200, seed=7)
    assert report["violations"] == 0, report
    assert all(r["violations"] == 0 for r in padic.check_lemmas(trials=10, seed=1))
    assert all(r["violations"] == 0 for r in padic.oracle_diff(p=2, n=1, window=2, trials=50, seed=7))

    try:
        padic.Lattice(4, [[1]])
    except ValueError as e:
        assert "not a prime" in str(e)
    else:
        raise AssertionError("p = 4 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
