"""JSON Schemas (draft 2020-12) for every report the command line prints.

Plain dictionaries, so the package itself needs no validator; the test
suite checks real output against them.
"""

RAT = {"type": "string", "pattern": r"^-?[0-9]+/[0-9]+$"}
VERTEX = {"type": "string", "pattern": r"^\(n=-?[0-9]+,u=-?[0-9]+(/[0-9]+)?\)$"}
HEADER = {"schema": {"const": "v1"}}


def _obj(props: dict, required=None, extra=False) -> dict:
    props = {**HEADER, **props}
    return {
        "type": "object",
        "properties": props,
        "required": ["schema"] + list(required if required is not None else props.keys() - {"schema"}),
        "additionalProperties": extra,
    }


GROUP = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["trivial", "cyclic", "elemab", "klein4"]},
        "n": {"type": "integer", "minimum": 1},
        "p": {"type": "integer"},
        "r": {"type": "integer"},
    },
    "required": ["kind"],
}

EDGE = {
    "type": "object",
    "properties": {"from": {"type": "string"}, "to": {"type": "string"}, "group": GROUP},
    "required": ["from", "to", "group"],
}

GRAPH = {
    "type": "object",
    "properties": {
        "p": {"type": "integer"},
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"id": {"type": "string"}, "group": GROUP},
                "required": ["id", "group"],
            },
        },
        "tree_edges": {"type": "array", "items": EDGE},
        "extra_edges": {"type": "array", "items": EDGE},
    },
    "required": ["p", "vertices", "tree_edges", "extra_edges"],
}

ERROR = _obj({"error": {"type": "string"}, "message": {"type": "string"}})

GRAPH_VOLUME = _obj({"mu": RAT, "tree_mu": RAT})
GRAPH_CURVATURE = _obj({"curvatures": {"type": "object", "additionalProperties": RAT}, "total": RAT})
GRAPH_REDUCE = _obj({"graph": GRAPH, "mu": RAT, "reduced": {"type": "boolean"}})
GRAPH_GENUS = _obj(
    {
        "genus": {"type": "integer"},
        "index": {"type": "integer"},
        "mu": RAT,
        "method": {"enum": ["formula", "cover"]},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
    required=["genus", "index", "mu", "method"],
)
GRAPH_CHECK_GB = _obj(
    {
        "betti": {"type": "integer"},
        "genus": {"type": "integer"},
        "quotient_order": {"type": "integer"},
        "mu": RAT,
        "betti_minus_1": {"type": "integer"},
        "order_times_mu": RAT,
        "holds": {"type": "boolean"},
        "cover": {"type": "object"},
        "edge_images": {"type": "object"},
    },
)

TREE_RECORD = _obj(
    {
        "name": {"type": "string"},
        "graph": GRAPH,
        "volume": RAT,
        "curvatures": {"type": "object", "additionalProperties": RAT},
        "ratio": {"oneOf": [RAT, {"type": "null"}]},
        "classification": {"enum": ["nonpositive", "le3", "le4", "gt4"]},
    },
)
MIN_VOLUME = _obj({"min": RAT, "witnesses": {"type": "array", "items": {"type": "string"}}})
CENSUS = _obj(
    {
        "p": {"type": "integer"},
        "buckets": {
            "type": "object",
            "propertyNames": RAT,
            "additionalProperties": {"type": "array", "items": {"type": "string"}},
        },
    },
    required=["p", "buckets"],
    extra=True,
)
BOUND_SUMMARY = _obj({"summary": {
    "type": "object",
    "properties": {
        "counts": {"type": "object", "additionalProperties": {"type": "integer"}},
        "exceptional": {"type": "object", "additionalProperties": RAT},
        "unexpected": {"type": "array"},
        "ok": {"type": "boolean"},
    },
    "required": ["counts", "exceptional", "unexpected", "ok"],
}})
SCAN_RECORD = _obj(
    {
        "name": {"type": "string"},
        "volume": RAT,
        "genus": {"type": ["integer", "null"]},
        "divisible": {"type": ["boolean", "null"]},
    },
)
SCAN_SUMMARY = _obj({"summary": {
    "type": "object",
    "properties": {
        "ell": {"type": "integer"},
        "s": {"type": "integer"},
        "trees": {"type": "integer"},
        "with_quotient": {"type": "integer"},
        "violations": {"type": "array"},
        "ok": {"type": "boolean"},
    },
    "required": ["ell", "s", "trees", "with_quotient", "violations", "ok"],
}})

BT_CLASSIFY = _obj(
    {
        "class": {"enum": ["identity", "parabolic", "hyperbolic", "elliptic", "nontorsion_unit"]},
        "order": {"enum": [2, 3, 4, 6]},
        "rational_fixed_points": {"type": "boolean"},
    },
    required=["class"],
)
BT_FIXED_POINTS = _obj({"fixed_points": {"type": "array", "items": {"type": "string"}}, "precision": {"type": "integer"}})
BT_GEODESIC = _obj({"vertices": {"type": "array", "items": VERTEX}, "window": {"type": "array", "items": {"type": "integer"}}})
BT_INTERSECT = _obj(
    {
        "kind": {"enum": ["empty", "single_vertex", "segment"]},
        "truncated": {"type": "boolean"},
        "vertex": VERTEX,
        "vertices": {"type": "array", "items": VERTEX},
        "exact_kind": {"enum": ["empty", "single_vertex", "segment", "ray"]},
    },
    required=["kind", "truncated"],
)
BT_MIRROR = _obj(
    {
        "vertices": {"type": "array", "items": VERTEX},
        "count": {"type": "integer"},
        "reason": {"type": "string"},
        "truncated": {"type": "boolean"},
        "radius": {"type": "integer"},
    },
)
BT_RHO = _obj(
    {
        "vertex": VERTEX,
        "rho": {"type": "array", "items": {"type": "integer"}, "minItems": 4, "maxItems": 4},
        "in_kernel": {"type": "boolean"},
    },
)
BT_PAIR = _obj(
    {
        "kind": {"enum": ["cyclic", "klein_four", "infinite_or_other"]},
        "evidence": {"type": "object"},
        "mirrors_meet": {"type": ["boolean", "null"]},
    },
)

SUBRAO = _obj(
    {
        "p": {"type": "integer"},
        "r": {"type": "integer"},
        "q": {"type": "integer"},
        "genus": {"type": "integer"},
        "gauss_bonnet_genus": {"type": "integer"},
        "mu": RAT,
        "subgroup_order": {"type": "integer"},
        "full_aut_order": {"type": "integer"},
        "bound_2g_minus_2": {
            "type": "object",
            "properties": {
                "lhs": {"type": "integer"},
                "rhs": {"type": "integer"},
                "holds": {"type": "boolean"},
                "equality": {"type": "boolean"},
            },
            "required": ["lhs", "rhs", "holds", "equality"],
        },
        "nakajima_4g_plus_4": {"type": "integer"},
        "full_aut_exceeds_nakajima": {"type": "boolean"},
        "fq_modulus": {"type": "array", "items": {"type": "integer"}},
        "flags": {"type": "array", "items": {"type": "string"}},
        "c": {"oneOf": [RAT, {"type": "null"}]},
    },
)

CRITERION = {
    "type": "object",
    "properties": {
        "criterion": {"type": "integer"},
        "name": {"type": "string"},
        "passed": {"type": "boolean"},
        "detail": {"type": "string"},
        "data": {"type": "object"},
    },
    "required": ["criterion", "name", "passed", "detail"],
}
FINDING_ROW = {
    "type": "object",
    "properties": {
        "group": {"type": "string"},
        "quotient_order": {"type": "integer"},
        "mu": RAT,
        "genus_cover": {"type": "integer"},
        "genus_formula": {"type": "integer"},
        "kernel_rank": {"type": "integer"},
        "routes_agree": {"type": "boolean"},
        "matches_reference": {"type": "boolean"},
    },
    "required": ["group", "quotient_order", "mu", "genus_cover", "genus_formula", "routes_agree", "matches_reference"],
}
FINDINGS = {
    "type": "object",
    "properties": {"table": {"type": "array", "items": FINDING_ROW}, "d2_z3": FINDING_ROW},
    "required": ["table", "d2_z3"],
}
VERIFY = _obj(
    {
        "criteria": {"type": "array", "items": CRITERION},
        "passed": {"type": "boolean"},
        "findings": FINDINGS,
    },
    required=["criteria", "passed"],
)
