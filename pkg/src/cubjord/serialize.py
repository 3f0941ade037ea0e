"""JSON encoding/decoding: field descriptors, scalars, vectors, sparse
polynomials, norm structures, certificates.

Conventions: rationals as "num/den" strings; finite-field elements as
coefficient arrays with the field header {p, k, modulus}; polynomials as
sorted sparse monomial lists; basis order is fixed by the constructors,
so vectors are plain coefficient arrays.
"""

from .errors import RecipeError
from .fields import GF, ExtensionField, PrimeField, Rationals
from .polys import Poly


def field_to_json(F):
    if isinstance(F, Rationals):
        return {"kind": "rationals"}
    if isinstance(F, PrimeField):
        return {"kind": "gf", "p": F.p}
    if isinstance(F, ExtensionField):
        return {"kind": "gf", "p": F.p, "k": F.k, "modulus": list(F.modulus)}
    raise RecipeError(f"unserializable field {F!r}")


def field_from_json(obj):
    try:
        kind = obj["kind"]
    except (TypeError, KeyError):
        raise RecipeError("field descriptor needs a 'kind'") from None
    if kind == "rationals":
        return Rationals()
    if kind == "gf":
        p = obj["p"]
        k = obj.get("k", 1)
        modulus = obj.get("modulus")
        return GF(p, k, tuple(modulus) if modulus else None)
    raise RecipeError(f"unknown field kind {kind!r}")


def scalar_to_json(F, a):
    return F.to_json(a)


def scalar_from_json(F, obj):
    return F.from_json(obj)


def vector_to_json(F, v):
    return [F.to_json(a) for a in v]


def vector_from_json(F, obj):
    if not isinstance(obj, list):
        raise RecipeError("vector literal must be a list")
    return [F.from_json(a) for a in obj]


def matrix_to_json(F, M):
    return [vector_to_json(F, row) for row in M]


def matrix_from_json(F, obj):
    return [vector_from_json(F, row) for row in obj]


def poly_to_json(poly):
    return {
        "nvars": poly.nvars,
        "terms": [[list(exps), poly.field.to_json(c)] for exps, c in poly.items_decoded()],
    }


def poly_from_json(F, obj):
    terms = {tuple(exps): F.from_json(c) for exps, c in obj["terms"]}
    return Poly.from_dict(F, obj["nvars"], terms)


def cns_to_json(X):
    F = X.field
    return {
        "field": field_to_json(F),
        "dim": X.dim,
        "label": X.label,
        "basepoint": vector_to_json(F, X.c),
        "adjoint": [poly_to_json(q) for q in X.adjoint],
        "norm": poly_to_json(X.norm),
    }


def cns_from_json(obj):
    from .cns import CubicNormStructure

    F = field_from_json(obj["field"])
    adjoint = [poly_from_json(F, q) for q in obj["adjoint"]]
    norm = poly_from_json(F, obj["norm"])
    return CubicNormStructure(
        F, obj["dim"], vector_from_json(F, obj["basepoint"]), adjoint, norm, label=obj.get("label", "")
    )


def certificate_to_json(cert):
    F = cert.source.field
    return {
        "kind": cert.kind,
        "multiplier": None if cert.multiplier is None else F.to_json(cert.multiplier),
        "matrix": matrix_to_json(F, cert.matrix),
        "structural_checked": cert.structural_checked,
        "reason": cert.reason,
    }
