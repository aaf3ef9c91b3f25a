"""Smoke test for the quiverforge Python extension.

Build and install first:
    pip install --no-build-isolation ./crates/py
"""

import json
import math

import quiverforge_py as qf


def main():
    k3 = qf.Quiver.kronecker(3)
    assert k3.euler_form([1, 1]) == -1
    assert qf.Quiver.from_json(k3.to_json()) == k3

    point = qf.Representation(qf.Quiver.kronecker(2), [1, 1], [[[1.0]], [[0.0]]])
    verdict, witness = point.thin_stability([1.0, -1.0])
    assert verdict == "stable" and witness is None
    assert point.thin_stability([-1.0, 1.0])[0] == "unstable"

    # flow lands on |z|^2 = 1 for theta' = (1, -1)
    z = qf.Representation(qf.Quiver.kronecker(2), [1, 1], [[[3.0]], [[4.0j]]])
    limit, report = z.flow([1.0, -1.0])
    assert report["status"] == "converged", report
    assert report["kappa"] == -1
    norm_sq = sum(abs(m[0][0]) ** 2 for m in limit.matrices)
    assert math.isclose(norm_sq, 1.0, rel_tol=1e-7), norm_sq
    assert z.certify([1.0, -1.0])["verdict"] == "polystable"

    w = qf.Representation(qf.Quiver.kronecker(2), [1, 1], [[[1.0]], [[0.0]]])
    check = qf.verify_tensor_polystability(limit, [1.0, -1.0], w, [1.0, -1.0])
    assert check["within_bound"], check

    diamond = z.tensor(w)
    assert diamond.dims == [1, 1, 1, 1]
    segre = diamond.segre_check()
    assert segre["in_image"], segre

    rep = qf.Representation.random(qf.Quiver.jordan(), [3], seed=5)
    assert qf.Representation.from_json(rep.to_json()) == rep
    assert rep.dual().dual() == rep

    assert qf.tau(2, 2, [2, 1], [1, 2]) == [3, 4, 1, 2]
    is_grid, factors = qf.grid_test([[1, 3], [1, 5], [2, 3], [2, 5]], [2, 2])
    assert is_grid and factors is not None
    assert not qf.grid_test([[1, 3], [1, 5], [2, 3], [2, 7]], [2, 2])[0]

    e = qf.char_poly_invariants([[2, 0], [0, 3]])
    assert abs(e[0] - 5) < 1e-12 and abs(e[1] - 6) < 1e-12

    poly = {"families": [["lambda", 4], ["mu", 4]], "terms": [{"exp": [1, 0, 0, 0, 0, 0, 0, 0], "coeff": "1"}]}
    image = json.loads(qf.phi(json.dumps(poly), [2, 2]))
    assert [f[0] for f in image["families"]] == ["alpha", "beta"]

    try:
        qf.tau(2, 2, [1, 1], [1, 2])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid permutation accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
