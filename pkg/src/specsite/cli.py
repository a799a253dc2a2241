"""Command-line interface.

Exit status: 0 success, 1 verification failure, 2 input error, 3 budget
exhausted.  Reports are deterministic JSON carrying the tool version and an
echo of the run configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import __version__
from .algebra import default_budget
from .errors import BudgetExceeded, InputError, VerificationFailure
from .factorization import factorize
from .fibered import FiberedInput, continuous_section_check, fibered_structural_sheaf, total_cod_presheaf, total_site
from .geometry import is_local_object
from .io import algebra_to_json, dumps, hom_to_json, load_algebra, load_hom, load_presheaf, load_site, presheaf_to_json
from .site import check_sheaf, sheafify
from .spectrum import points, specialization, spectrum_report
from .theories import GEOMETRIES, THEORIES, dlat, geometry, slat
from .theories.lattices import hasse_edges
from .verify import SUITES, run_suite


@dataclass
class RunConfig:
    command: str
    theory: Optional[str] = None
    geometry: Optional[str] = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    budget: Optional[int] = None
    max_size: Optional[int] = None
    suite: Optional[str] = None
    verbose: bool = False


def _validate_ids(cfg: RunConfig):
    if cfg.theory is not None and cfg.theory not in THEORIES:
        raise InputError(f"unknown theory {cfg.theory!r}; known: {', '.join(THEORIES)}")
    if cfg.geometry is not None:
        known = sorted(g for t, g in GEOMETRIES if cfg.theory in (None, t))
        if cfg.geometry not in known:
            raise InputError(f"unknown geometry {cfg.geometry!r} for theory {cfg.theory}; known: {', '.join(known)}")
    if cfg.suite is not None and cfg.suite not in SUITES:
        raise InputError(f"unknown suite {cfg.suite!r}; known: {', '.join(SUITES)}")


def _geometry(cfg: RunConfig):
    theory = cfg.theory or "dlat"
    name = cfg.geometry or next(g for t, g in GEOMETRIES if t == theory)
    return geometry(theory, name)


def _envelope(cfg: RunConfig, body: dict) -> dict:
    echo = asdict(cfg)
    echo.pop("verbose")
    echo["budget"] = cfg.budget if cfg.budget is not None else default_budget()
    return {"tool": "specsite", "version": __version__, "config": echo, **body}


def _label_text(label) -> str:
    return "{" + ",".join(str(x) for x in label) + "}"


def specialization_dot(pts, order) -> str:
    """Hasse diagram of the specialization order, nodes labelled by filter elements."""
    k = len(pts)
    edges = hasse_edges(range(k), lambda i, j: i != j and order[i][j])
    lines = ["digraph specialization {", "  rankdir=BT;"]
    for i, p in enumerate(pts):
        lines.append(f'  p{i} [label="{_label_text(p.label)}"];')
    for i, j in edges:
        lines.append(f"  p{i} -> p{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# commands


def cmd_spec(cfg: RunConfig) -> int:
    G = _geometry(cfg)
    B = load_algebra(cfg.inputs["input"], G.theory)
    report = spectrum_report(B, G, cfg.budget)
    pts = points(B, G, cfg.budget)
    dot = specialization_dot(pts, specialization(pts))
    report["dot"] = dot
    _write(cfg.outputs.get("out"), dumps(_envelope(cfg, report)))
    if cfg.outputs.get("dot"):
        _write(cfg.outputs["dot"], dot)
    return 0 if all(report["verdicts"].values()) else 1


def cmd_points(cfg: RunConfig) -> int:
    G = _geometry(cfg)
    B = load_algebra(cfg.inputs["input"], G.theory)
    pts = points(B, G, cfg.budget)
    order = specialization(pts)
    k = len(pts)
    body = {
        "points": [{"label": list(p.label), "map": list(p.map.map), "local_size": p.local_object.size} for p in pts],
        "specialization": [[i, j] for i in range(k) for j in range(k) if i != j and order[i][j]],
        "base_is_local": is_local_object(B, G, cfg.budget),
    }
    _write(cfg.outputs.get("out"), dumps(_envelope(cfg, body)))
    if cfg.outputs.get("dot"):
        _write(cfg.outputs["dot"], specialization_dot(pts, order))
    return 0


def cmd_factorize(cfg: RunConfig) -> int:
    G = _geometry(cfg)
    f = load_hom(cfg.inputs["hom"], G.theory)
    witness, u = factorize(f, G)
    body = {
        "etale": witness.to_json(G),
        "middle": algebra_to_json(witness.codomain),
        "local": hom_to_json(u),
        "verdicts": {"composite": witness.map.then(u).map == f.map, "replay": witness.replay(G) == witness.map,
                     "local_test": G.local_map_test(u)},
    }
    _write(cfg.outputs.get("out"), dumps(_envelope(cfg, body)))
    return 0 if all(body["verdicts"].values()) else 1


def cmd_verify(cfg: RunConfig, fmt: str) -> int:
    report = run_suite(cfg.suite, cfg.theory, cfg.geometry, cfg.max_size, cfg.budget)
    if fmt == "text":
        lines = [f"suite {report['suite']} ({report['theory']}/{report['geometry']}, max size {report['max_size']})"]
        for row in report["rows"]:
            lines.append(f"  {'PASS' if row['ok'] else 'FAIL'}  {row['instance']}")
        lines.append(f"{'PASS' if report['passed'] else 'FAIL'}: {report['instances']} instances, "
                     f"failures {report['failures']}")
        _write(cfg.outputs.get("out"), "\n".join(lines) + "\n")
    else:
        _write(cfg.outputs.get("out"), dumps(_envelope(cfg, report)))
    return 0 if report["passed"] else 1


def cmd_sheaf(cfg: RunConfig) -> int:
    site = load_site(cfg.inputs["site"])
    P = load_presheaf(cfg.inputs["presheaf"], site)
    report = check_sheaf(P)
    body = {"check_sheaf": {"ok": report["ok"], "failures": report["failures"]}}
    if cfg.outputs.get("sheafified"):
        Q, _ = sheafify(P)
        body["sheafified_sizes"] = list(Q.sizes)
        _write(cfg.outputs["sheafified"], dumps(presheaf_to_json(Q, cfg.inputs["site"])))
    _write(cfg.outputs.get("out"), dumps(_envelope(cfg, body)))
    return 0


def cmd_fibered(cfg: RunConfig) -> int:
    G = _geometry(cfg)
    base = load_site(cfg.inputs["base"])
    F = load_presheaf(cfg.inputs["presheaf"], base)
    inp = FiberedInput(base, F)
    TS = total_site(inp, G, cfg.budget)
    Ft, rep = fibered_structural_sheaf(inp, G, cfg.budget, TS=TS)
    checks = {}
    for name, X in (("structural", Ft), ("cod", total_cod_presheaf(TS))):
        checks[name] = continuous_section_check(X, inp, TS)
    body = {
        "total_site": {"objects": [[c, i] for c, i in TS.objects], "arrows": len(TS.site.arrows),
                       "covers": [[{"kind": kind, "family": list(fam)} for fam, kind in zip(fams, kinds)]
                                  for fams, kinds in zip(TS.site.covers, TS.kinds)]},
        "structural_sizes": list(Ft.sizes),
        "restriction": rep,
        "continuous_sections": checks,
    }
    _write(cfg.outputs.get("out"), dumps(_envelope(cfg, body)))
    return 0


def cmd_enumerate(cfg: RunConfig, method: str) -> int:
    theory = cfg.theory or "dlat"
    n_max = cfg.max_size or 6
    per_size = {}
    for n in range(1, n_max + 1):
        if theory == "dlat":
            algs = dlat.distributive_lattices_birkhoff(n) if method == "downsets" else dlat.distributive_lattices(n)
        elif theory == "slat":
            algs = slat.semilattices(n)
        else:
            raise InputError(f"enumeration is not available for theory {theory}")
        per_size[str(n)] = [algebra_to_json(A) for A in algs]
    body = {"method": method, "counts": {n: len(v) for n, v in per_size.items()}, "algebras": per_size}
    _write(cfg.outputs.get("out"), dumps(_envelope(cfg, body)))
    return 0


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specsite", description="Spectra of finite algebras under geometries.")
    parser.add_argument("--version", action="version", version=f"specsite {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, geometry=True):
        p.add_argument("--theory", help="theory id (dlat, slat, cring)")
        if geometry:
            p.add_argument("--geometry", help="geometry id (zariski, cozariski, jm, ring-zariski)")
        p.add_argument("--budget", type=int, help="homomorphism search cap (default: SPECSITE_BUDGET or 10^6)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("spec", help="spectral site, points, structural sheaf and stalks of an algebra")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--dot", help="write the specialization Hasse diagram here")

    p = sub.add_parser("points", help="points of the spectrum and their specialization order")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--dot")

    p = sub.add_parser("factorize", help="etale-local factorization of a homomorphism")
    common(p)
    p.add_argument("--hom", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p)
    p.add_argument("--suite", required=True)
    p.add_argument("--max-size", type=int)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("sheaf", help="sheaf condition of a presheaf on a finite site")
    common(p, geometry=False)
    p.add_argument("--site", required=True)
    p.add_argument("--presheaf", required=True)
    p.add_argument("--sheafified", help="write the sheafification here")

    p = sub.add_parser("fibered", help="total site and continuous sections of a presheaf of algebras")
    common(p)
    p.add_argument("--base", required=True)
    p.add_argument("--presheaf", required=True)

    p = sub.add_parser("enumerate", help="enumerate lattices or semilattices up to a size")
    common(p, geometry=False)
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--method", choices=("order", "downsets"), default="order")
    return parser


def config_from_args(args) -> RunConfig:
    inputs = {k: getattr(args, k) for k in ("input", "hom", "site", "presheaf", "base") if getattr(args, k, None)}
    outputs = {k: getattr(args, k) for k in ("out", "dot", "sheafified") if getattr(args, k, None)}
    return RunConfig(
        command=args.command,
        theory=args.theory,
        geometry=getattr(args, "geometry", None),
        inputs=inputs,
        outputs=outputs,
        budget=args.budget,
        max_size=getattr(args, "max_size", None),
        suite=getattr(args, "suite", None),
        verbose=args.verbose,
    )


def run(cfg: RunConfig, args=None) -> int:
    _validate_ids(cfg)
    if cfg.command == "spec":
        return cmd_spec(cfg)
    if cfg.command == "points":
        return cmd_points(cfg)
    if cfg.command == "factorize":
        return cmd_factorize(cfg)
    if cfg.command == "verify":
        return cmd_verify(cfg, getattr(args, "format", "json"))
    if cfg.command == "sheaf":
        return cmd_sheaf(cfg)
    if cfg.command == "fibered":
        return cmd_fibered(cfg)
    if cfg.command == "enumerate":
        return cmd_enumerate(cfg, getattr(args, "method", "order"))
    raise InputError(f"unknown command {cfg.command}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        return run(cfg, args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except VerificationFailure as exc:
        print(f"verification failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        if cfg.verbose and getattr(exc, "witness", None) is not None:
            print(json.dumps(exc.witness, default=str), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
