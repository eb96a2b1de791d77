"""Built-in problems with known continuation behavior.

Each fixture is a complete problem document plus the status its run is
expected to reach under the default configuration.  They double as
regression anchors for the engine's termination classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expressions import Const, Expr, Guard, Split, X, Z, exp, mul, neg, powi, sin, sub, to_text

__all__ = ["Fixture", "get_fixture", "fixture_names", "list_fixtures"]


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    expected_status: str
    problem: dict


def _interval_problem(expr: Expr, x0: float, z0: complex) -> dict:
    return {
        "function": to_text(expr),
        "domain": {"kind": "interval"},
        "seed": {"x": x0, "z": [z0.real, z0.imag]},
    }


def _phi(e: Expr) -> Expr:
    return mul(e, exp(neg(e)))


def _example2_expr() -> Expr:
    # parameter curve: 4x e^{i pi (2x-1)/2} up to the half-way point (image
    # stays off the value 1), then 1/(1-x), which escapes to infinity
    om1 = 4.0 * X() * exp(Const(0.5j * math.pi) * (2.0 * X() - 1.0))
    om2 = powi(1.0 - X(), -1)
    inner = sub(_phi(Z()), Split(0.5, _phi(om1), _phi(om2)))
    return Guard(1.0, _phi(Z()), inner)


def _cubic_series_texts() -> list[str]:
    # three root curves with pairwise separation >= ~0.5; dyadic
    # coefficients keep parse/eval round-trips exact
    x = X()
    r1 = 1.0 + 0.25 * x
    r2 = -1.0 + Const(0.5j) * x
    r3 = Const(-0.25j) + 0.5 * x
    e1 = r1 + r2 + r3
    e2 = r1 * r2 + r1 * r3 + r2 * r3
    e3 = r1 * r2 * r3
    return [to_text(neg(e3)), to_text(e2), to_text(neg(e1)), "1.0"]


def _fixtures() -> list[Fixture]:
    out = []

    expr = sub(mul(powi(X(), 2), Z()), X())
    out.append(
        Fixture(
            "counterexample-x2z-x",
            "pow(x, 2)*z - x: the tracked root 1/x escapes to infinity as x -> 0",
            "AsymptoticBlowup",
            _interval_problem(expr, 1.0, 1 + 0j),
        )
    )

    expr = sub(exp(mul(X(), Z())), Const(1 + 0j))
    out.append(
        Fixture(
            "remark-exp",
            "exp(x*z) - 1 seeded on the zero branch, which continues across the whole interval",
            "Completed",
            _interval_problem(expr, 1.0, 0j),
        )
    )
    out.append(
        Fixture(
            "remark-exp-asymptotic",
            "exp(x*z) - 1 seeded at 2*pi*i: the branch 2*pi*i/x escapes as x -> 0",
            "AsymptoticBlowup",
            _interval_problem(expr, 1.0, complex(0.0, 2.0 * math.pi)),
        )
    )

    expr = Guard(
        0.0,
        Const(0j),
        mul(X(), sub(exp(Z()), exp(sin(powi(X(), -1))))),
    )
    out.append(
        Fixture(
            "example1-sin",
            "branch sin(1/x) oscillates without a limit at x = 0, where the function degenerates",
            "NonConvergent",
            _interval_problem(expr, 1.0, complex(math.sin(1.0), 0.0)),
        )
    )

    out.append(
        Fixture(
            "example2-phi",
            "z*exp(-z) matched against a parameter curve whose value escapes as x -> 1",
            "AsymptoticBlowup",
            _interval_problem(_example2_expr(), 0.0, 0j),
        )
    )

    expr = sub(powi(Z(), 2), X())
    out.append(
        Fixture(
            "monic-sqrt",
            "pow(z, 2) - x seeded exactly at the double root; deterministic tie-break picks -sqrt(x)",
            "Completed",
            _interval_problem(expr, 0.0, 0j),
        )
    )

    series = _cubic_series_texts()
    out.append(
        Fixture(
            "monic-cubic-interval",
            "monic cubic with polynomial coefficient curves and three well-separated roots",
            "Completed",
            {
                "series": series,
                "domain": {"kind": "interval"},
                "seed": {"x": 0.0, "z": [1.0, 0.0]},
            },
        )
    )
    out.append(
        Fixture(
            "monic-cubic-ytree",
            "the same monic cubic followed outward over a three-leaf star tree",
            "Completed",
            {
                "series": series,
                "domain": {
                    "kind": "tree",
                    "vertices": ["c", "a", "b", "d"],
                    "edges": [["c", "a", 0.5], ["c", "b", 0.5], ["c", "d", 0.5]],
                },
                "seed": {"point": {"vertex": "c"}, "z": [1.0, 0.0]},
            },
        )
    )
    return out


_REGISTRY = {fx.name: fx for fx in _fixtures()}


def fixture_names() -> list[str]:
    return sorted(_REGISTRY)


def get_fixture(name: str) -> Fixture:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")


def list_fixtures() -> list[Fixture]:
    """All built-ins, stable-sorted by name."""
    return [_REGISTRY[n] for n in fixture_names()]
