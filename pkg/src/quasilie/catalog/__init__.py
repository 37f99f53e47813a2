"""Ready-made models, the JSON model format and the Gauss hypergeometric function."""
from __future__ import annotations

from ..errors import ModelFileError
from .hypergeom import gauss_2f1
from .modelfile import InvariantSpec, ModelSpec, load_model, model_from_dict, save_model
from .models import (
    build_emden,
    build_mathews_lakshmanan,
    build_milne_pinney,
    build_nonlinear_oscillator,
    build_perelomov,
    build_riccati,
    emden_relation,
)
from .rules import RuleSpec, build_rule

CATALOG = {
    "milne-pinney-demo": (
        "dissipative Milne-Pinney, a=0.2, b=-1, k=1 on [0, 2]",
        lambda: build_milne_pinney("1/5", -1, 1, name="milne-pinney-demo")),
    "milne-pinney-equilibrium": (
        "Milne-Pinney, a=0, b=-1, k=1 from the equilibrium (1, 0) on [0, 10]",
        lambda: build_milne_pinney(0, -1, 1, window=(0, 10), initial_states=[[1.0, 0.0]],
                                   name="milne-pinney-equilibrium")),
    "milne-pinney-broken": (
        "Milne-Pinney demo with c scaled by 1.1 (integrability condition violated)",
        lambda: build_milne_pinney("1/5", -1, 1, c_scale="11/10", name="milne-pinney-broken")),
    "nonlinear-oscillator": (
        "x'' = x + exp(-5t) x^2 (b=1, gamma1=exp(t), n=2, c0=1) on [0, 2]",
        lambda: build_nonlinear_oscillator(1, 2, 1, "exp(t)")),
    "perelomov": (
        "Perelomov oscillator, omega=1, s=4, c=1/2, gamma1=cos(t) on [0, 1]",
        lambda: build_perelomov(1, 4, "1/2", "cos(t)")),
    "emden": (
        "Emden equation, a=0, n=2 on [0, 2]",
        lambda: build_emden(0, 2)),
    "mathews-lakshmanan": (
        "dissipative Mathews-Lakshmanan, F=-0.1, lambda=1 on [0, 5]",
        lambda: build_mathews_lakshmanan("-1/10", 1)),
    "mathews-lakshmanan-autonomous": (
        "Mathews-Lakshmanan, F=0, lambda=1 on [0, 5]",
        lambda: build_mathews_lakshmanan(0, 1, name="mathews-lakshmanan-autonomous")),
    "riccati": (
        "Riccati x' = 1 + x^2 on [0, 1]",
        lambda: build_riccati(1, 0, 1)),
}


def list_models() -> list:
    return [(k, desc) for k, (desc, _) in CATALOG.items()]


def get_model(name: str) -> ModelSpec:
    if name not in CATALOG:
        raise ModelFileError(f"unknown catalog model {name!r}; known: {', '.join(CATALOG)}")
    return CATALOG[name][1]()


def emit(name: str, path) -> ModelSpec:
    model = get_model(name)
    save_model(model, path)
    return model


__all__ = ["CATALOG", "list_models", "get_model", "emit", "gauss_2f1", "ModelSpec", "InvariantSpec", "RuleSpec",
           "load_model", "save_model", "model_from_dict", "build_rule", "build_milne_pinney",
           "build_nonlinear_oscillator", "build_perelomov", "build_emden", "emden_relation",
           "build_mathews_lakshmanan", "build_riccati"]
