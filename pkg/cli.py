"""
Command Line Front End

    python cli.py analyze        --input fixtures/five_point.json
    python cli.py diagram        --input fixtures/five_point.json --format text
    python cli.py deform         --input fixtures/five_point_three_edges.json
    python cli.py verify         --input fixtures/five_point.json --dmax 6
    python cli.py fo             --n 5 --k 1 --z 0.07+0.02j --tau 12j
    python cli.py superpotential --input fixtures/five_point_three_edges.json --seed 7

Input files (or inline JSON passed to --input) hold
{"numerators" | "matrix": [[...]], "denominator": d, "edges": [[i, j]], "gammas": [...]}.

Exit codes: 0 success, 2 invalid input, 3 solver or confluence failure,
4 numeric singularity. The worker-thread count for overlap checks comes
from QDEFORM_WORKERS (default 1).
"""

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from deform import (
    CyclePresentError,
    InternalConsistencyError,
    UnsolvableError,
    assemble_mixed,
    braiding_defects,
    build_ansatz,
    q_symmetric_system,
    solve_confluence,
    specialize,
)
from diagram import ClassificationError, build_diagram, classify_cycle, decompose, render_text
from exact import PoleError
from fo import SingularParameterError, ThetaParams, degeneration_check, fo_relation_coeffs
from matrix import (
    AltMatrix,
    RankError,
    biresidue,
    corank,
    from_numerators,
    is_normalized,
)
from ncalg import NotConfluentError, check_diamond, hilbert_function
from potential import calabi_yau_check, cyclic_check, random_points, superpotential_q
from weights import genericity_report, obstructed_combinations, smoothable_weights

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_NUMERIC = 4

COMMANDS = ("analyze", "diagram", "deform", "verify", "fo", "superpotential")

DEFAULT_TAUS = ("8j", "10j", "12j")


@dataclass
class JobSpec:
    """One CLI invocation: a command, its input and its options."""

    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    format: str = "json"
    options: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("json", "text"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.command != "fo" and self.input is None:
            raise ValueError(f"{self.command} needs --input")


@dataclass
class Problem:
    lam: AltMatrix
    edges: List[Tuple[int, int]]
    gammas: Optional[List[object]]


def load_problem(source: str) -> Problem:
    """
    Read the input JSON from a path or an inline string.

    Args:
        source (str): A file path, or JSON text starting with "{".

    Returns:
        Problem: The validated matrix with its edges and optional gammas.

    Raises:
        ValueError: If the JSON is malformed or the matrix fails validation.
        OSError: If the file cannot be read.
    """
    text = source if source.lstrip().startswith("{") else Path(source).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"input is not valid JSON: {exc}") from exc
    numerators = data.get("numerators", data.get("matrix"))
    if numerators is None:
        raise ValueError("input needs a 'numerators' (or 'matrix') field")
    lam = from_numerators(numerators, data.get("denominator", 1))
    edges = [tuple(e) for e in data.get("edges", [])]
    if any(len(e) != 2 for e in edges):
        raise ValueError("edges must be pairs")
    return Problem(lam, edges, data.get("gammas"))


def workers() -> int:
    """
    Thread count for overlap checks.

    Returns:
        int: QDEFORM_WORKERS as a positive integer, 1 when unset or invalid.
    """
    try:
        return max(1, int(os.environ.get("QDEFORM_WORKERS", "1")))
    except ValueError:
        logger.warning("ignoring non-integer QDEFORM_WORKERS")
        return 1


def _complex(text) -> complex:
    return complex(str(text).replace(" ", "").replace("i", "j"))


def _analyze(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    problem = load_problem(spec.input)
    lam = problem.lam
    artifact: Dict[str, object] = {
        "matrix": lam.to_json(),
        "normalized": is_normalized(lam),
        "corank": corank(lam),
    }
    report = genericity_report(lam)
    artifact["genericity"] = report.to_dict()
    if is_normalized(lam) and corank(lam) == 1:
        b = biresidue(lam)
        found = smoothable_weights(b)
        artifact["biresidue"] = b.to_json()
        artifact["smoothable"] = [
            {"edge": list(edge), "weight": list(theta)} for edge, theta in found.items()
        ]
        artifact["obstructed_combinations"] = [
            list(nu) for nu in obstructed_combinations(b, list(found.values()))
        ]
    return EXIT_OK, artifact


def _diagram(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    problem = load_problem(spec.input)
    diagram = build_diagram(biresidue(problem.lam))
    parts = decompose(diagram)
    artifact = {
        "diagram": diagram.to_dict(),
        "decomposition": parts.to_dict(),
        "cycles": [classify_cycle(problem.lam, c).to_dict() for c in parts.cycles],
        "text": render_text(diagram, parts),
    }
    return EXIT_OK, artifact


def _solve(problem: Problem):
    ansatz = build_ansatz(problem.lam, problem.edges, problem.gammas)
    return solve_confluence(ansatz, workers())


def _deform(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    solved = _solve(load_problem(spec.input))
    artifact = solved.to_dict()
    artifact["braiding_defects"] = [list(d) for d in braiding_defects(solved)]
    return EXIT_OK, artifact


def _verify(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    problem = load_problem(spec.input)
    dmax = int(spec.options.get("dmax", 6))
    if problem.edges:
        system = specialize(_solve(problem), spec.options.get("eps") or 1, spec.options.get("v0"))
    else:
        system = q_symmetric_system(problem.lam)
    report = check_diamond(system, workers())
    artifact: Dict[str, object] = {"diamond": report.to_dict()}
    if not report.passed:
        return EXIT_SOLVER, artifact
    artifact["hilbert"] = hilbert_function(system, dmax, workers())
    return EXIT_OK, artifact


def _fo(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    opts = spec.options
    z = _complex(opts.get("z", "0.07+0.02j"))
    tau = _complex(opts.get("tau", "12j"))
    if spec.input is not None:
        problem = load_problem(spec.input)
        eps = [_complex(x) for x in opts.get("eps_list") or []] or None
        mixed = assemble_mixed(problem.lam, problem.edges, z, tau, eps)
        return EXIT_OK, mixed.to_dict()
    n, k = int(opts["n"]), int(opts["k"])
    coeffs = fo_relation_coeffs(n, k, z, ThetaParams(tau, n))
    artifact: Dict[str, object] = {"coefficients": coeffs.to_dict()}
    taus = [_complex(t) for t in opts.get("taus") or DEFAULT_TAUS]
    artifact["degeneration"] = degeneration_check(n, k, z, taus).to_dict()
    return EXIT_OK, artifact


def _superpotential(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    problem = load_problem(spec.input)
    if not problem.edges:
        phi = superpotential_q(problem.lam.exponents())
        report = cyclic_check(phi)
        return EXIT_OK, {"superpotential": phi.to_dict(), "twist": report.to_dict()}
    solved = _solve(problem)
    if spec.options.get("v0") is not None:
        points = [(spec.options.get("eps") or 1, spec.options["v0"])]
    else:
        rng = random.Random(int(spec.options.get("seed", 0)))
        points = random_points(rng, int(spec.options.get("points", 3)))
    reports = calabi_yau_check(solved.system, points)
    status = EXIT_OK if all(r.dimension == 1 for r in reports) else EXIT_SOLVER
    return status, {"reports": [r.to_dict() for r in reports]}


HANDLERS = {
    "analyze": _analyze,
    "diagram": _diagram,
    "deform": _deform,
    "verify": _verify,
    "fo": _fo,
    "superpotential": _superpotential,
}


def run(spec: JobSpec) -> Tuple[int, Dict[str, object]]:
    """
    Execute a job, mapping failures to exit codes.

    Returns:
        Tuple[int, dict]: Exit status and the JSON artifact (an {"error"}
        object on failure).
    """
    try:
        return HANDLERS[spec.command](spec)
    except (UnsolvableError, InternalConsistencyError, NotConfluentError) as exc:
        logger.error("solver failure: %s", exc)
        return EXIT_SOLVER, {"error": str(exc), "kind": type(exc).__name__}
    except (PoleError, SingularParameterError, ArithmeticError) as exc:
        logger.error("numeric singularity: %s", exc)
        return EXIT_NUMERIC, {"error": str(exc), "kind": type(exc).__name__}
    except (CyclePresentError, ClassificationError, RankError, ValueError, KeyError, OSError) as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_INVALID, {"error": str(exc), "kind": type(exc).__name__}


def render(artifact: Dict[str, object], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(artifact, sort_keys=True, indent=2)
    if "text" in artifact:
        return str(artifact["text"])
    lines = []
    for key, value in sorted(artifact.items()):
        lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdeform", description="Deformations of toric quantum projective spaces."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", "-i", help="JSON file or inline JSON")
        p.add_argument("--output", "-o", help="write the artifact here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")
        if name == "verify":
            p.add_argument("--dmax", type=int, default=6)
        if name in ("verify", "superpotential"):
            p.add_argument("--eps", help="rational eps value")
            p.add_argument("--v0", help="rational v value")
        if name == "superpotential":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--points", type=int, default=3)
        if name == "fo":
            p.add_argument("--n", type=int)
            p.add_argument("--k", type=int)
            p.add_argument("--z", default="0.07+0.02j")
            p.add_argument("--tau", default="12j")
            p.add_argument(
                "--taus",
                nargs="*",
                default=list(DEFAULT_TAUS),
                help="taus for the degeneration check",
            )
            p.add_argument("--eps-list", nargs="*", help="chain and cycle eps values")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    options = {
        key: value
        for key, value in vars(args).items()
        if key not in ("command", "input", "output", "format", "verbose") and value is not None
    }
    try:
        spec = JobSpec(args.command, args.input, args.output, args.format, options)
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID
    if spec.command == "fo" and spec.input is None and ("n" not in options or "k" not in options):
        logger.error("fo needs --n and --k, or --input")
        return EXIT_INVALID

    status, artifact = run(spec)
    text = render(artifact, spec.format)
    if spec.output:
        Path(spec.output).write_text(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
