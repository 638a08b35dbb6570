"""Exact analyzer for zero-order perturbations of vector fields on tori.

The heavy lifting lives in the compiled extension; this wrapper adds a
dict-friendly surface so specs and reports stay plain Python data.
"""

import json

from ._hypotor import (  # noqa: F401
    PreconditionError,
    RefinementExhaustedError,
    SpecParseError,
    render_csv,
    run_file,
    run_spec_string,
    version,
)

__all__ = [
    "PreconditionError",
    "RefinementExhaustedError",
    "SpecParseError",
    "classify",
    "render_csv",
    "run",
    "run_file",
    "run_spec_string",
    "version",
]


def run(spec, parallel=False):
    """Run a spec given as a dict or JSON text; returns (report_dict, exit_code)."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    report_text, code = run_spec_string(text, parallel)
    return json.loads(report_text), code


def classify(alphas, basis=None, lam=None):
    """Classify the perturbation sets of D_t + sum alpha_j D_xj - lambda.

    `alphas` is a list of (re, im) pairs of exact literals ("1/2", {"sqrt2": "1"}),
    `basis` an optional list of basis atom declarations, `lam` an optional
    (re, im) pair. Returns the classification outcome dict.
    """
    spec = {
        "version": "hypotor-spec/1",
        "basis": basis or [],
        "operators": [
            {
                "id": "op",
                "type": "constant",
                "alphas": [{"re": re, "im": im} for re, im in alphas],
            }
        ],
        "tasks": [{"id": "t", "kind": "classify", "op": "op"}],
    }
    if lam is not None:
        spec["operators"][0]["lambda"] = {"re": lam[0], "im": lam[1]}
    report, code = run(spec)
    if code != 0:
        raise RuntimeError(f"classification run failed with exit code {code}")
    return report["tasks"][0]["outcome"]
