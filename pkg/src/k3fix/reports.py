"""JSON and markdown renderings of solution sets."""

from __future__ import annotations

import json
from collections import Counter

from .enumeration import EqualityCheck, SolutionSet
from .lefschetz import FixedLocusConfig


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


def describe_curves(c: FixedLocusConfig) -> str:
    parts = []
    for g, n in sorted(Counter(c.curves.genera).items()):
        if g == 0:
            parts.append(_plural(n, "rational curve"))
        elif g == 1:
            parts.append(_plural(n, "elliptic curve"))
        else:
            parts.append(_plural(n, "curve") + f" of genus {g}")
    return " + ".join(parts)


def describe(c: FixedLocusConfig) -> str:
    """One-line summary such as ``11 isolated points + 1 rational curve``."""
    text = _plural(c.isolated_count, "isolated point")
    curves = describe_curves(c)
    return f"{text} + {curves}" if curves else text


def _points_cell(c: FixedLocusConfig) -> str:
    if not c.points:
        return "none"
    return ", ".join(
        (f"{m}×" if m > 1 else "") + f"P^{{{t.i},{t.j}}}" for t, m in c.points
    )


def _curves_cell(c: FixedLocusConfig) -> str:
    if not c.curves.genera:
        return "none"
    return ", ".join("P¹" if g == 0 else f"C(g={g})" for g in c.curves.genera)


def to_json_text(solutions: SolutionSet, checks: list[EqualityCheck] | None = None) -> str:
    doc = solutions.to_json()
    if checks is not None:
        doc["equalities"] = [
            {
                "types": [[t.i, t.j] for t in chk.equality.types],
                "value": chk.equality.value,
                "observed": list(chk.observed),
                "holds": chk.holds,
            }
            for chk in checks
        ]
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def to_markdown(solutions: SolutionSet, checks: list[EqualityCheck] | None = None) -> str:
    title = solutions.name or f"order {solutions.order}"
    lines = [f"## Fixed loci: {title} (order {solutions.order})", ""]
    if not solutions.configs:
        lines += ["No configuration satisfies the constraints (infeasible).", ""]
    else:
        lines += [
            "| # | isolated points | M | fixed curves | N | χ | summary |",
            "|---|---|---|---|---|---|---|",
        ]
        for n, c in enumerate(solutions, 1):
            lines.append(
                f"| {n} | {_points_cell(c)} | {c.isolated_count} | {_curves_cell(c)} "
                f"| {c.curves.count} | {c.euler} | {describe(c)} |"
            )
        lines.append("")
    if checks:
        lines += ["### Equalities", ""]
        lines += [f"- {chk}" for chk in checks]
        lines.append("")
    return "\n".join(lines)
