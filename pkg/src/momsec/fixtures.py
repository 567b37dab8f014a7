"""Built-in example models.

Each fixture is rendered to canonical JSON bytes once, at import time,
so ``emit`` writes byte-identical files on every run.
"""

from __future__ import annotations

import json

_BOX2 = [[-1.5, 1.5], [-1.5, 1.5]]
_BOX3 = [[-1.5, 1.5], [-1.5, 1.5], [-1.5, 1.5]]

_FIXTURES: dict[str, dict] = {}

# Rank-1 rotation action on the plane with the area form; the boundary
# one-form eta generates both the 2-form (B = d eta) and the section
# mu = -iota_rho eta, which is a Hamiltonian for the rotation field.
_FIXTURES["rotation_momentum_map"] = {
    "schema": 1,
    "chart": {"coordinates": ["x", "y"], "box": _BOX2},
    "algebroid": {
        "rank": 1,
        "anchor": [
            {"idx": [1, 1], "expr": "-y"},
            {"idx": [1, 2], "expr": "x"},
        ],
    },
    "metric": [
        {"idx": [1, 1], "expr": "1"},
        {"idx": [2, 2], "expr": "1"},
    ],
    "eta_boundary": [
        {"idx": [1], "expr": "-y/2"},
        {"idx": [2], "expr": "x/2"},
    ],
    "mu": [{"idx": [1], "expr": "-(x^2 + y^2)/2"}],
    "multisym": {
        "n": 1,
        "eta": {
            "0": [{"idx_form": [], "idx_bundle": [1], "expr": "-(x^2 + y^2)/2"}],
            "1": [
                {"idx": [1], "expr": "-y/2"},
                {"idx": [2], "expr": "x/2"},
            ],
        },
    },
    "sampling": {"seed": 42, "points": 32},
}

# Two commuting translations of the plane with the area form.  The
# section (y, -x) satisfies the momentum condition exactly but fails
# bracket compatibility: the pairing B(rho_1, rho_2) = 1 obstructs it.
_FIXTURES["translation_nonequivariant"] = {
    "schema": 1,
    "chart": {"coordinates": ["x", "y"], "box": _BOX2},
    "algebroid": {
        "rank": 2,
        "anchor": [
            {"idx": [1, 1], "expr": "1"},
            {"idx": [2, 2], "expr": "1"},
        ],
    },
    "metric": [
        {"idx": [1, 1], "expr": "1"},
        {"idx": [2, 2], "expr": "1"},
    ],
    "b_field": [{"idx": [1, 2], "expr": "-1"}],
    "eta_boundary": [
        {"idx": [1], "expr": "-y"},
        {"idx": [2], "expr": "x"},
    ],
    "mu": [
        {"idx": [1], "expr": "y"},
        {"idx": [2], "expr": "-x"},
    ],
    "multisym": {
        "n": 1,
        "h": [{"idx": [1, 2], "expr": "-1"}],
        "eta": {
            "0": [
                {"idx_form": [], "idx_bundle": [1], "expr": "y"},
                {"idx_form": [], "idx_bundle": [2], "expr": "-x"},
            ],
            "1": [
                {"idx": [1], "expr": "-y"},
                {"idx": [2], "expr": "x"},
            ],
        },
    },
    "sampling": {"seed": 42, "points": 32},
}

# The rotation algebra acting on R^3: anchors are the infinitesimal
# rotations, structure constants the alternating symbol.
_FIXTURES["so3_action_algebroid"] = {
    "schema": 1,
    "chart": {"coordinates": ["x1", "x2", "x3"], "box": _BOX3},
    "algebroid": {
        "rank": 3,
        "anchor": [
            {"idx": [1, 2], "expr": "x3"},
            {"idx": [1, 3], "expr": "-x2"},
            {"idx": [2, 3], "expr": "x1"},
            {"idx": [2, 1], "expr": "-x3"},
            {"idx": [3, 1], "expr": "x2"},
            {"idx": [3, 2], "expr": "-x1"},
        ],
        "structure": [
            {"idx": [3, 1, 2], "expr": "1"},
            {"idx": [1, 2, 3], "expr": "1"},
            {"idx": [2, 1, 3], "expr": "-1"},
        ],
    },
    "sampling": {"seed": 42, "points": 32},
}

# Free particle in a rotationally symmetric magnetic gauge: the linear
# momentum term beta = (-y, x) absorbs into the twist B = 2 dx^dy and
# the shifted constraint constant becomes a momentum section.
_FIXTURES["magnetic_twist_mechanics"] = {
    "schema": 1,
    "chart": {"coordinates": ["x", "y"], "box": _BOX2},
    "algebroid": {
        "rank": 1,
        "anchor": [
            {"idx": [1, 1], "expr": "-y"},
            {"idx": [1, 2], "expr": "x"},
        ],
    },
    "metric": [
        {"idx": [1, 1], "expr": "1"},
        {"idx": [2, 2], "expr": "1"},
    ],
    "beta": [
        {"idx": [1], "expr": "-y"},
        {"idx": [2], "expr": "x"},
    ],
    "V": "0",
    "sampling": {"seed": 42, "points": 32},
}

# Translation flux model on R^3 with the volume 3-form: eta^(1) = x dy
# satisfies the degree-2 momentum condition for the anchor d/dz.
_FIXTURES["plectic2_flux_model"] = {
    "schema": 1,
    "chart": {"coordinates": ["x", "y", "z"], "box": _BOX3},
    "algebroid": {
        "rank": 1,
        "anchor": [{"idx": [1, 3], "expr": "1"}],
    },
    "multisym": {
        "n": 2,
        "h": [{"idx": [1, 2, 3], "expr": "1"}],
        "eta": {
            "1": [{"idx_form": [2], "idx_bundle": [1], "expr": "x"}]
        },
    },
    "sampling": {"seed": 42, "points": 32},
}

# A bracket that is not a Lie bracket: [e1,e2] = e2, [e1,e3] = e3,
# [e2,e3] = e1 violates the cyclic identity, and the anchor (only e1
# flows) is not a morphism for it.
_FIXTURES["broken_jacobi"] = {
    "schema": 1,
    "chart": {"coordinates": ["x"], "box": [[-1.5, 1.5]]},
    "algebroid": {
        "rank": 3,
        "anchor": [{"idx": [1, 1], "expr": "1"}],
        "structure": [
            {"idx": [2, 1, 2], "expr": "1"},
            {"idx": [3, 1, 3], "expr": "1"},
            {"idx": [1, 2, 3], "expr": "1"},
        ],
    },
    "sampling": {"seed": 42, "points": 32},
}


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_FIXTURES))


def fixture_bytes(name: str) -> bytes:
    if name not in _FIXTURES:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(fixture_names())}")
    return (json.dumps(_FIXTURES[name], indent=2, sort_keys=True) + "\n").encode("utf-8")


# Suites whose expected outcome is locked by the test suite; also the
# suites exercised for registry coverage.
FIXTURE_SUITES: dict[str, tuple[str, ...]] = {
    "rotation_momentum_map": ("axioms", "momentum", "sigma2d", "multisym"),
    "translation_nonequivariant": ("axioms", "momentum", "sigma2d", "multisym"),
    "so3_action_algebroid": ("axioms",),
    "magnetic_twist_mechanics": ("axioms", "mechanics"),
    "plectic2_flux_model": ("axioms", "multisym"),
    "broken_jacobi": ("axioms",),
}
