"""JSON encodings: exact rational strings everywhere, no floats.

A quaternion is ["w", "x", "y", "z"] with each coordinate "p/q" or "p";
a matrix is a nested array of quaternion encodings with the dimension
inferred; certificates, h-factor lists, normal forms and based
instances are tagged dicts built from those two.  Files carry the
algebra parameters alongside the payload so they re-verify standalone.
"""

from __future__ import annotations

from fractions import Fraction

from .budget import HFactor, HFactorList
from .certify import BasedInstance
from .errors import PreconditionError
from .matrix import MatD
from .normalform import UVUForm
from .quaternion import Quat, QuaternionAlgebra
from .wordcalc import CommutatorCert


def rat_to_json(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def rat_from_json(s: str) -> Fraction:
    return Fraction(s)


def algebra_to_json(alg: QuaternionAlgebra) -> dict:
    return {"a": rat_to_json(alg.a), "b": rat_to_json(alg.b)}


def algebra_from_json(data: dict) -> QuaternionAlgebra:
    return QuaternionAlgebra(rat_from_json(data["a"]), rat_from_json(data["b"]))


def quat_to_json(q: Quat) -> list[str]:
    return [rat_to_json(c) for c in q.coords()]


def quat_from_json(data: list, alg: QuaternionAlgebra) -> Quat:
    if len(data) != 4:
        raise PreconditionError("quaternion encoding needs four coordinates")
    return alg.quat(*(rat_from_json(c) for c in data))


def mat_to_json(m: MatD) -> list:
    return [[quat_to_json(q) for q in row] for row in m.rows]


def mat_from_json(data: list, alg: QuaternionAlgebra) -> MatD:
    return MatD(alg, [[quat_from_json(q, alg) for q in row] for row in data])


def _elem_to_json(e) -> list:
    if isinstance(e, Quat):
        return quat_to_json(e)
    if isinstance(e, MatD):
        return mat_to_json(e)
    raise PreconditionError(f"cannot encode {type(e)!r}")


def _elem_from_json(data: list, alg: QuaternionAlgebra):
    # a quaternion is a flat list of strings, a matrix a list of lists
    if data and isinstance(data[0], str):
        return quat_from_json(data, alg)
    return mat_from_json(data, alg)


def hfactors_to_json(hf: HFactorList) -> list:
    return [{"i": f.index, "eps": quat_to_json(f.eps)} for f in hf.factors]


def hfactors_from_json(data: list, alg: QuaternionAlgebra, n: int) -> HFactorList:
    return HFactorList(
        alg, n, tuple(HFactor(d["i"], quat_from_json(d["eps"], alg)) for d in data)
    )


def uvuform_to_json(form: UVUForm) -> dict:
    return {
        "h": hfactors_to_json(form.hfactors),
        "u1": mat_to_json(form.u1),
        "v": mat_to_json(form.v),
        "u2": mat_to_json(form.u2),
    }


def uvuform_from_json(data: dict, alg: QuaternionAlgebra) -> UVUForm:
    u1 = mat_from_json(data["u1"], alg)
    return UVUForm(
        alg,
        u1.n,
        hfactors_from_json(data["h"], alg, u1.n),
        u1,
        mat_from_json(data["v"], alg),
        mat_from_json(data["u2"], alg),
    )


def cert_to_json(cert: CommutatorCert) -> dict:
    return {
        "pairs": [[_elem_to_json(g), _elem_to_json(h)] for g, h in cert.pairs],
        "target": _elem_to_json(cert.target),
    }


def cert_from_json(data: dict, alg: QuaternionAlgebra) -> CommutatorCert:
    return CommutatorCert(
        tuple(
            (_elem_from_json(g, alg), _elem_from_json(h, alg)) for g, h in data["pairs"]
        ),
        _elem_from_json(data["target"], alg),
    )


def instance_to_json(inst: BasedInstance) -> dict:
    return {
        "algebra": algebra_to_json(inst.alg),
        "n": inst.n,
        "v": mat_to_json(inst.v),
        "u": mat_to_json(inst.u),
        "delta": quat_to_json(inst.delta),
        "delta_cert": cert_to_json(inst.delta_cert),
        "gamma": mat_to_json(inst.gamma),
    }


def instance_from_json(data: dict) -> BasedInstance:
    alg = algebra_from_json(data["algebra"])
    return BasedInstance(
        alg,
        data["n"],
        mat_from_json(data["v"], alg),
        mat_from_json(data["u"], alg),
        quat_from_json(data["delta"], alg),
        cert_from_json(data["delta_cert"], alg),
        mat_from_json(data["gamma"], alg),
    )
