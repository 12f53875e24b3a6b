"""Smoke test for the `nda` extension module.

Build and install first:

    cd crates/py && maturin build --release -o dist && pip install dist/nda-*.whl
"""

import nda


def main():
    pow15 = nda.Arithmetic("projective:pow:1.5@int:0:200")
    assert pow15.eval("2+2") == 3.0
    assert pow15.eval("(2+3)+3 == 2+(3+3)") is False

    rep = pow15.check_law("assoc-add", 100)
    assert rep["status"] == "fails"
    assert rep["witness"] == [2.0, 3.0, 3.0]
    assert rep["sides"] == [5.0, 4.0]

    assert nda.Arithmetic("projective:pow:2@int:0:200").add(2, 2) == 2.0
    exp = nda.Arithmetic("projective:exp2m1@int:0:200")
    assert exp.add(5, 5) == 5.0
    assert exp.mul(2, 2) == 3.0
    assert exp.nsum(1, 1000) == 1.0
    assert len(exp.search_identities("a_plus_b_eq_a", 50)) == 50 * 51 // 2

    quad = nda.Arithmetic("projective:quad@int:0:200")
    dist = quad.check_law("dist", 100)
    assert dist["witness"] == [2.0, 1.0, 1.0]
    assert quad.mul(2, 2) == 3.0

    pow2 = nda.Arithmetic("projective:pow:2@int:0:200")
    th = pow2.theorem(150)
    assert th["consistent"] and not th["archimedean"]
    assert th["archimedean_witness"] == [1.0, 2.0]
    assert nda.Arithmetic("dual:quad@int:0:200").archimedean(150)["archimedean"]

    light = nda.Arithmetic("projective:atanh:1@grid:0:1:0.001")
    assert light.format(light.add(0.5, 0.5)) == "0.800"
    assert light.add(1.0, 0.6) == 1.0
    assert not light.multiplicative

    assert nda.practical_convergence("powfact:1000", 100)["verdict"] == "practically-divergent"
    assert nda.practical_convergence("factpow:1000", 100)["verdict"] == "practically-convergent"
    assert nda.practical_convergence("powfact:1000", 5000)["verdict"] == "practically-convergent"

    sums = exp.partial_sums("const:1", 50)
    assert sums["stationary_at"] == 1 and sums["sums"][-1] == 1.0

    assert nda.normalize("(1+2)+3") == "1 + 2 + 3"

    try:
        nda.Arithmetic("dual:id@int:0:10").add(9, 9)
    except nda.EvaluationError:
        pass
    else:
        raise AssertionError("expected carrier exhaustion")
    try:
        nda.Arithmetic("projective:nope@int:0:10")
    except nda.SpecError:
        pass
    else:
        raise AssertionError("expected a spec error")
    assert issubclass(nda.ValidationError, ValueError)

    print("smoke ok")


if __name__ == "__main__":
    main()
