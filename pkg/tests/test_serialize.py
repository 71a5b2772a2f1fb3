import json
from fractions import Fraction

from commcert import make_instance
from commcert import serialize as ser
from commcert.budget import HFactor, HFactorList
from commcert.normalform import decompose_huvu
from commcert.quaternion import QuaternionAlgebra

from conftest import rand_invertible, rand_unit


def test_rational_strings():
    assert ser.rat_to_json(Fraction(-3, 7)) == "-3/7"
    assert ser.rat_to_json(Fraction(5)) == "5"
    assert ser.rat_from_json("-3/7") == Fraction(-3, 7)


def test_algebra_roundtrip():
    alg = QuaternionAlgebra(Fraction(-1), Fraction(-2, 3))
    data = ser.algebra_to_json(alg)
    assert data == {"a": "-1", "b": "-2/3"}
    assert ser.algebra_from_json(data) == alg


def test_quat_roundtrip(alg, rng):
    q = alg.quat(Fraction(1, 2), -3, 0, Fraction(7, 5))
    data = ser.quat_to_json(q)
    assert data == ["1/2", "-3", "0", "7/5"]
    assert ser.quat_from_json(data, alg) == q


def test_matrix_roundtrip(alg, rng):
    m = rand_invertible(alg, 3, rng)
    data = json.loads(json.dumps(ser.mat_to_json(m)))
    assert ser.mat_from_json(data, alg) == m


def test_hfactors_roundtrip(alg, rng):
    hf = HFactorList(alg, 3, (HFactor(1, rand_unit(alg, rng)), HFactor(2, rand_unit(alg, rng))))
    data = json.loads(json.dumps(ser.hfactors_to_json(hf)))
    assert ser.hfactors_from_json(data, alg, 3) == hf


def test_uvuform_roundtrip(alg, rng):
    g = rand_invertible(alg, 3, rng)
    _, form = decompose_huvu(g)
    data = json.loads(json.dumps(ser.uvuform_to_json(form)))
    back = ser.uvuform_from_json(data, alg)
    assert back == form


def test_cert_and_instance_roundtrip(alg):
    g, inst = make_instance(5, 3, 2)
    data = json.loads(json.dumps(ser.instance_to_json(inst)))
    back = ser.instance_from_json(data)
    assert back.element() == g
    assert back.delta == inst.delta
    assert back.delta_cert.pairs == inst.delta_cert.pairs

    cert_data = json.loads(json.dumps(ser.cert_to_json(inst.delta_cert)))
    assert ser.cert_from_json(cert_data, inst.alg) == inst.delta_cert


def test_matrix_cert_elements_distinguished(alg, rng):
    from commcert import CommutatorCert
    from conftest import mat_comm

    x, y = rand_invertible(alg, 2, rng), rand_invertible(alg, 2, rng)
    cert = CommutatorCert(((x, y),), mat_comm(x, y))
    data = json.loads(json.dumps(ser.cert_to_json(cert)))
    back = ser.cert_from_json(data, alg)
    assert back == cert and back.verify()
