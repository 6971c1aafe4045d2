"""LP-file emission for the MIS and MVC integer programs.

MIS maximizes the sum of binary vertex variables with one ``xi + xj <= 1``
constraint per edge; MVC minimizes the same objective with ``xi + xj >= 1``.
Variables are named x1..xn, matching the 1-based ids of the graph format.
"""

from __future__ import annotations

from .graph import Graph, GraphError

MIS = "mis"
MVC = "mvc"

_TERMS_PER_LINE = 10


def emit_lp(g: Graph, problem: str) -> str:
    problem = problem.lower()
    if problem not in (MIS, MVC):
        raise GraphError(f"problem must be 'mis' or 'mvc', got {problem!r}")
    sense = "Maximize" if problem == MIS else "Minimize"
    op = "<=" if problem == MIS else ">="
    lines = [sense]
    lines.extend(_objective_lines(g.n))
    lines.append("Subject To")
    for i, (u, v) in enumerate(g.edges(), start=1):
        lines.append(f" e{i}: x{u + 1} + x{v + 1} {op} 1")
    lines.append("Binary")
    lines.extend(f" x{i + 1}" for i in range(g.n))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _objective_lines(n: int) -> list[str]:
    if n == 0:
        return [" obj:"]
    lines = []
    for start in range(0, n, _TERMS_PER_LINE):
        chunk = " + ".join(f"x{i + 1}" for i in range(start, min(start + _TERMS_PER_LINE, n)))
        prefix = " obj: " if start == 0 else "      + "
        lines.append(prefix + chunk)
    return lines
