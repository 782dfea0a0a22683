"""Command line front end: ``fractal-spectra <command> <problem.json> [flags]``.

Exit codes: 0 success, 1 unexpected error, 2 usage or parse error,
3 invalid mathematical input, 4 computation failure (caps, tolerances,
failed constructions). Reports are JSON with sorted keys; rationals are
written as ``"p/q"`` strings and complex numbers as ``{"re", "im"}``.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dynamics as dy
from . import latmath as lm
from . import spectrum as sp
from . import tower as tw
from . import triple as tr
from .fourier import MuHatEvaluator, ToleranceUnreachable

SCHEMA = "fractal-spectra/report/1"
EXIT_OK, EXIT_UNEXPECTED, EXIT_USAGE, EXIT_INVALID, EXIT_COMPUTE = 0, 1, 2, 3, 4


class ProblemError(Exception):
    """Parse or shape error in a problem file, with a source position."""

    def __init__(self, path: str, line: int, col: int, msg: str):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.line, self.col = line, col


@dataclasses.dataclass
class Problem:
    R: lm.Matrix
    B: tuple
    L: tuple | None = None
    tower: list | None = None
    options: dict = dataclasses.field(default_factory=dict)
    raw: dict = dataclasses.field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.R)


def _key_position(text: str, key: str) -> tuple[int, int]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return 1, 1
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _int_vectors(obj, dim: int | None, what: str) -> tuple:
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"{what} must be a non-empty list")
    out = []
    for v in obj:
        v = [v] if isinstance(v, int) and not isinstance(v, bool) else v
        if not isinstance(v, list) or not all(isinstance(t, int) and not isinstance(t, bool) for t in v):
            raise ValueError(f"{what} entries must be integers or integer lists, got {v!r}")
        out.append(tuple(v))
    dims = {len(v) for v in out}
    if len(dims) != 1 or (dim is not None and dims != {dim}):
        raise ValueError(f"{what} vectors must all have length {dim}")
    return tuple(out)


def parse_problem(text: str, path: str = "<problem>") -> Problem:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(path, exc.lineno, exc.colno, exc.msg) from None
    if not isinstance(raw, dict):
        raise ProblemError(path, 1, 1, "top level must be a JSON object")
    unknown = set(raw) - {"R", "B", "L", "tower", "options", "name", "note"}
    for k in sorted(unknown):
        raise ProblemError(path, *_key_position(text, k), f"unknown key {k!r}")

    def fail(key, msg):
        raise ProblemError(path, *_key_position(text, key), msg)

    if "R" not in raw:
        fail("R", "missing required key 'R'")
    R = raw["R"]
    if isinstance(R, int) and not isinstance(R, bool):
        R = [[R]]
    if (
        not isinstance(R, list) or not R
        or not all(isinstance(r, list) and len(r) == len(R) for r in R)
        or not all(isinstance(t, int) and not isinstance(t, bool) for r in R for t in r)
    ):
        fail("R", "R must be an integer or a square list of integer rows")
    d = len(R)
    if "B" not in raw:
        fail("B", "missing required key 'B'")
    try:
        B = _int_vectors(raw["B"], d, "B")
    except ValueError as exc:
        fail("B", str(exc))
    L = None
    if raw.get("L") is not None:
        try:
            L = _int_vectors(raw["L"], d, "L")
        except ValueError as exc:
            fail("L", str(exc))
    tower = None
    if raw.get("tower") is not None:
        tower = []
        if not isinstance(raw["tower"], list):
            fail("tower", "tower must be a list of (M, K, alpha) records")
        for rec in raw["tower"]:
            if isinstance(rec, dict):
                rec = [rec.get("M"), rec.get("K"), rec.get("alpha")]
            if not (isinstance(rec, list) and len(rec) == 3 and all(isinstance(t, int) for t in rec)):
                fail("tower", f"bad tower record {rec!r}; expected [M, K, alpha] or an object with M, K, alpha")
            tower.append(tuple(rec))
    options = raw.get("options", {})
    if not isinstance(options, dict):
        fail("options", "options must be an object")
    return Problem(tuple(tuple(r) for r in R), B, L, tower, options, raw)


def load_problem(path: str) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(path, 0, 0, f"cannot read file: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ProblemError(path, 0, 0, "file is not UTF-8") from None
    return parse_problem(text, path)


# ---------------------------------------------------------------------------
# serialisation


def to_json(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_json(obj.real), "im": to_json(obj.imag)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [to_json(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_json(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else json.dumps(to_json(k))): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_json(x) for x in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_report(report: dict) -> str:
    return json.dumps(to_json(report), sort_keys=True, indent=2) + "\n"


def _vec(v):
    """Scalars for one-dimensional vectors, lists otherwise."""
    return v[0] if len(v) == 1 else list(v)


# ---------------------------------------------------------------------------
# commands


def _opt(args, prob: Problem, name: str, default):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return prob.options.get(name, default)


def _need_triple(prob: Problem, tol: float) -> tr.HadamardTriple:
    if prob.L is None:
        raise tr.TripleError("this command needs the key 'L'")
    return tr.HadamardTriple.from_data(prob.R, prob.B, prob.L, tol)


def cmd_verify(prob: Problem, args) -> dict:
    R = prob.R
    exp = lm.expansivity(R)
    verdicts = {"expansive": exp.value}
    results: dict = {"det": lm.det(R)}
    if exp == lm.Expansivity.EXPANSIVE:
        verdicts["B simple"] = lm.residues_distinct(R, prob.B)
        inv = lm.smallest_invariant_lattice(R, prob.B)
        results["digit lattice"] = {"basis": inv.basis, "full rank": inv.full_rank, "index": inv.index() if inv.full_rank else None}
        verdicts["digit lattice is Z^d"] = inv.full_rank and inv.index() == 1
        if verdicts["digit lattice is Z^d"]:
            results["notes"] = [f"Z[R,B] = Z^{len(R)}"]
    if prob.L is not None:
        rep = tr.verify_triple(R, prob.B, prob.L, _opt(args, prob, "tol", tr.UNITARY_TOL))
        verdicts["Hadamard triple"] = rep.is_triple
        verdicts["exactly certified"] = rep.exact_certified
        results["triple"] = rep
    return {"verdicts": verdicts, "results": results}


def cmd_cycles(prob: Problem, args) -> dict:
    T = _need_triple(prob, tr.UNITARY_TOL)
    ts = dy.TransitionSystem(T)
    cs = dy.enumerate_extreme_cycles(ts, _opt(args, prob, "cap", dy.CANDIDATE_CAP))
    simp = dy.dynamical_simplicity(ts, cycles=cs.cycles)
    cycles = [{"word": [_vec(l) for l in c.word], "points": [_vec(p) for p in c.points]} for c in cs.cycles]
    return {
        "verdicts": {"complete": cs.complete, "dynamically simple": simp.verdict},
        "results": {
            "cycles": cycles,
            "candidates": cs.candidates,
            "box": {"lo": list(cs.box.lo), "hi": list(cs.box.hi), "power": cs.box.power},
            "simplicity": simp,
        },
        "provenance": {"cycles": "exact"},
    }


def cmd_spectrum(prob: Problem, args) -> dict:
    T = _need_triple(prob, tr.UNITARY_TOL)
    mode = _opt(args, prob, "mode", "canonical")
    n = int(_opt(args, prob, "n", 3))
    if mode == "canonical":
        cand = sp.canonical_levels(T, n, _opt(args, prob, "cap", tr.PRODUCT_CAP))
    elif mode == "cycles":
        cand = sp.cycle_levels(T, n)
    elif mode == "complete":
        cfg = sp.CompletionConfig(
            eps0=_opt(args, prob, "eps0", 0.1), delta0=_opt(args, prob, "delta0", 1e-4),
            kmax=_opt(args, prob, "kmax", 5), levels=n, cap=_opt(args, prob, "cap", tr.PRODUCT_CAP),
        )
        cand = sp.complete_spectrum(T, cfg)
    else:
        raise UsageError(f"unknown spectrum mode {mode!r}")
    ev = MuHatEvaluator(T.R, T.B)
    delta = sp.delta_estimate(ev, cand)
    last = cand.levels[-1]
    orth = sp.orthogonality_check(ev, last) if len(last) <= 512 else None
    return {
        "verdicts": {"nested": cand.is_nested(), "contains zero": tuple([0] * T.dim) in set(cand.levels[0])},
        "results": {
            "provenance": cand.provenance,
            "scales": cand.scales,
            "sizes": [len(l) for l in cand.levels],
            "levels": [[_vec(v) for v in l] for l in cand.levels],
            "offsets": [[{"j": _vec(j), "k": _vec(k)} for j, k in sorted(o.items())] for o in cand.offsets],
            "delta upper bound": delta,
            "orthogonality": orth,
        },
        "provenance": {"delta upper bound": "numeric, certified per evaluation", "orthogonality": "certified bound"},
    }


def cmd_delta(prob: Problem, args) -> dict:
    T = _need_triple(prob, tr.UNITARY_TOL)
    depth = int(_opt(args, prob, "depth", 10))
    cand = sp.canonical_levels(T, depth, _opt(args, prob, "cap", 1 << 20))
    d = sp.delta_estimate(MuHatEvaluator(T.R, T.B), cand)
    table = [{"depth": k + 1, "level min": m, "running min": r} for k, (m, r) in enumerate(zip(d.level_min, d.per_depth))]
    decreasing = all(b < a for a, b in zip(d.per_depth, d.per_depth[1:]))
    return {
        "verdicts": {"strictly decreasing": decreasing},
        "results": {"table": table, "value": d.value, "argmin": {"level": d.argmin[0], "lambda": _vec(d.argmin[1])}},
        "provenance": {"value": "upper bound for delta at the examined depth"},
    }


def cmd_parseval(prob: Problem, args) -> dict:
    T = _need_triple(prob, tr.UNITARY_TOL)
    n = int(_opt(args, prob, "n", 3))
    samples = int(prob.options.get("samples", 100))
    seed = int(_opt(args, prob, "seed", 0))
    rng = np.random.default_rng(seed)
    mh = None
    worst, ratios = 0.0, []
    RT = lm.transpose(T.R)
    ev = MuHatEvaluator(T.R, T.B)
    mh = sp._mu_hat_level(ev, RT, tr.digit_expansion(RT, T.L, n), n)
    for _ in range(samples):
        w = rng.normal(size=T.N**n) + 1j * rng.normal(size=T.N**n)
        r = sp.parseval_defect(T, sp.StepFunction(n, w), mh)
        worst = max(worst, r.identity_defect)
        ratios.append(r.ratio)
    delta = float(np.min(np.abs(mh) ** 2))
    return {
        "verdicts": {"identity holds": worst <= 1e-10, "upper sandwich": max(ratios) <= 1 + 1e-9},
        "results": {"max identity defect": worst, "ratio min": min(ratios), "ratio max": max(ratios), "delta at level": delta},
        "provenance": {"seed": seed, "samples": samples},
    }


def cmd_zeroscan(prob: Problem, args) -> dict:
    pair = tr.AffinePair(prob.R, prob.B)
    den = int(_opt(args, prob, "den", 3))
    kmax = int(_opt(args, prob, "kmax", 3))
    depth = int(_opt(args, prob, "depth", 200))
    grid = prob.options.get("points")
    grid = [tuple(Fraction(t) for t in (p if isinstance(p, list) else [p])) for p in grid] if grid else dy.rational_grid(pair.dim, den)
    entries = dy.periodic_zero_scan(pair, grid, depth, kmax)
    hits = [e for e in entries if e.certified]
    return {
        "verdicts": {"periodic zero set certified nonempty": bool(hits)},
        "results": {
            "certified": [{"xi": _vec(e.xi), "levels": e.levels} for e in hits],
            "scanned": len(entries),
            "kmax": kmax,
        },
        "provenance": {"certified": "exact, for all shifts up to kmax"},
    }


def cmd_tower(prob: Problem, args) -> dict:
    if not prob.tower:
        raise tw.TowerError("this command needs the key 'tower'")
    t = tw.build_tower_th01(prob.tower)
    n = int(_opt(args, prob, "n", len(t.levels)))
    spec = tw.tower_frame_spectrum(t, n, with_delta=t.scale(n) <= 1 << 40 and len(tw.tower_levels(t, n)) <= 1 << 14)
    levels = [
        {"N": lv.N, "B": list(lv.B), "L": list(lv.L), "eps": lv.eps, "eps measured": r.eps_meas,
         "perturbation norm": r.perturbation, "bounds": r.bounds}
        for lv, r in zip(t.levels, t.reports)
    ]
    return {
        "verdicts": {"all levels verified": True},
        "results": {
            "levels": levels, "epsilon sum": t.epsilon_sum,
            "constants": {"lower": spec.lower_constant, "upper": spec.upper_constant},
            "delta": spec.delta, "frequencies": len(spec.freqs),
        },
    }


def cmd_select(prob: Problem, args) -> dict:
    pair = tr.AffinePair(prob.R, prob.B)
    n = int(_opt(args, prob, "n", 1))
    seed = int(_opt(args, prob, "seed", 0))
    method = _opt(args, prob, "method", "all")
    p = tw.SelectionProblem(pair, n)
    out = []
    if method in ("all", "exhaustive"):
        out.append(tw.exhaustive_select(p, _opt(args, prob, "cap", tw.SELECTION_CAP)))
    if method in ("all", "greedy"):
        out.append(tw.heuristic_select(p, tw.Method.GREEDY))
    if method in ("all", "randomswap"):
        out.append(tw.heuristic_select(p, tw.Method.RANDOM_SWAP, seed))
    if not out:
        raise UsageError(f"unknown selection method {method!r}")
    return {
        "results": {
            "universe": len(p.universe), "target": p.target,
            "selections": [{"J": [_vec(v) for v in r.J], **r.record()} for r in out],
            "csv": tw.records_csv(out),
        },
        "provenance": {"bounds": "singular values of the selected matrix"},
    }


def cmd_attractor(prob: Problem, args) -> dict:
    depth = int(_opt(args, prob, "depth", 6))
    if getattr(args, "dual", False):
        if prob.L is None:
            raise tr.TripleError("--dual needs the key 'L'")
        pair = tr.AffinePair(lm.transpose(prob.R), prob.L)
    else:
        pair = tr.AffinePair(prob.R, prob.B)
    pts = dy.attractor_points(pair, depth, _opt(args, prob, "cap", dy.POINT_CAP))
    path = getattr(args, "points", None) or "attractor.csv"
    labels = [f"x{i}" for i in range(1, pair.dim + 1)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(labels) + "\n")
        for row in pts:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return {
        "results": {
            "points": len(pts), "file": str(path),
            "min": pts.min(axis=0), "max": pts.max(axis=0),
        },
    }


def cmd_orthosearch(prob: Problem, args) -> dict:
    pair = tr.AffinePair(prob.R, prob.B)
    box = prob.options.get("box", {"lo": [-10] * pair.dim, "hi": [10] * pair.dim})
    den = int(_opt(args, prob, "den", 12))
    max_size = int(prob.options.get("max_size", 8))
    r = sp.orthogonal_set_search(pair, [Fraction(t) for t in box["lo"]], [Fraction(t) for t in box["hi"]], den, max_size)
    return {
        "verdicts": {"max size reached": r.max_size_reached, "exhaustive": r.exhaustive},
        "results": {"best": [_vec(v) for v in r.best], "size": len(r.best), "nodes": r.nodes, "edges": r.edges},
        "provenance": {"edges": "exact zero certificates"},
    }


def cmd_quasi(prob: Problem, args) -> dict:
    pair = tr.AffinePair(prob.R, prob.B)
    bound = int(prob.options.get("entry_bound", 2))
    w = tr.search_quasi_product(pair, bound, _opt(args, prob, "cap", 10**6))
    res = None if w is None else {"M": w.M, "r": w.r, "R1": w.R1, "R2": w.R2, "C": w.C, "Q": w.Q, "N1": w.N1}
    return {"verdicts": {"witness found": w is not None}, "results": {"witness": res, "entry bound": bound}}


COMMANDS = {
    "verify": cmd_verify,
    "cycles": cmd_cycles,
    "spectrum": cmd_spectrum,
    "delta": cmd_delta,
    "parseval": cmd_parseval,
    "zeroscan": cmd_zeroscan,
    "tower": cmd_tower,
    "select": cmd_select,
    "attractor": cmd_attractor,
    "orthosearch": cmd_orthosearch,
    "quasi": cmd_quasi,
}


class UsageError(Exception):
    pass


INVALID = (tr.TripleError, tw.TowerError, lm.IndeterminateError)
COMPUTE = (OverflowError, ToleranceUnreachable, sp.CompletionFailure, ArithmeticError)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fractal-spectra", description="Spectral self-affine measure toolkit.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("problem", help="problem file (JSON)")
    p.add_argument("--tol", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--eps0", type=float)
    p.add_argument("--delta0", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--n", type=int, help="level")
    p.add_argument("--den", type=int, help="grid denominator bound")
    p.add_argument("--mode", choices=["canonical", "cycles", "complete"])
    p.add_argument("--method", choices=["all", "exhaustive", "greedy", "randomswap"])
    p.add_argument("--points", help="CSV path for the attractor command")
    p.add_argument("--dual", action="store_true", help="attractor of (R^T, L) instead of (R, B)")
    p.add_argument("--timing", action="store_true", help="record wall time (reports stop being byte-reproducible)")
    return p


def run(argv=None) -> tuple[int, str]:
    """Run a command; returns ``(exit code, report text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), ""
    try:
        prob = load_problem(args.problem)
    except ProblemError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE, ""
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "problem", "out", "timing") and v not in (None, False)}
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "inputs": {"R": prob.R, "B": prob.B, "L": prob.L, "tower": prob.tower, "options": prob.options, "flags": flags},
        "verdicts": {},
        "results": {},
        "provenance": {},
        "error": None,
        "timing": None,
    }
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        report.update(COMMANDS[args.command](prob, args))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE, ""
    except INVALID as exc:
        report["error"] = {"class": "invalid input", "type": type(exc).__name__, "message": str(exc)}
        code = EXIT_INVALID
    except COMPUTE as exc:
        report["error"] = {"class": "computation", "type": type(exc).__name__, "message": str(exc)}
        code = EXIT_COMPUTE
    except (ValueError, KeyError, TypeError) as exc:
        report["error"] = {"class": "invalid input", "type": type(exc).__name__, "message": str(exc)}
        code = EXIT_INVALID
    if args.timing:
        report["timing"] = {"seconds": time.perf_counter() - t0}
    text = dump_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code, text


def main(argv=None) -> int:
    try:
        code, _ = run(argv)
    except Exception as exc:  # last resort; module errors are mapped above
        print(f"unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return code


if __name__ == "__main__":
    sys.exit(main())
