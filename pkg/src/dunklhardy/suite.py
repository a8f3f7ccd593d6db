"""Configuration-driven verification suites.

A config is one JSON document.  Every (context, theorem, test function)
triple becomes an independent task; tasks are described by plain data so
they can be rebuilt inside worker processes, and random test functions are
seeded from ``(seed, task index)`` so the output does not depend on how the
work is scheduled.
"""
from __future__ import annotations

import csv
import io
import json
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import inequalities as ineq
from . import many_particle as mp
from .fields import bump, gaussian, radial_annulus_bump, random_test_field
from .quadrature import Ball
from .roots import DunklContext, make_context

DEFAULT_CONFIG = "default_suite.json"


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, field_path: str | None = None):
        self.line, self.field_path, self.message = line, field_path, message
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field_path:
            where.append(f"field {field_path}")
        super().__init__(("config error: " + ", ".join(where) + ": " if where else "config error: ") + message)


# -----------------------------------------------------------------------------
# config
# -----------------------------------------------------------------------------

THEOREM_PARAMS = {
    "hardy_type_gradient": {"p": [2.0]},
    "hardy_type_dunkl_gradient": {"p": [2.0]},
    "hardy_type_identity": {"p": [2.0]},
    "lp_hardy": {"p": None},  # default: midpoint of the admissible range
    "l2_hardy": {},
    "l2_hardy_sharpness": {"n_max": 50},
    "fractional_hardy_rank1": {"s": [0.25, 0.5]},
    "improved_hardy": {},
    "weighted_hardy_1d": {},
    "poincare": {},
    "hardy_poincare": {},
    "rellich": {},
    "rellich_sharpness": {"n": [4, 16, 64]},
    "ckn": {"ab": [[0.0, 0.0], [0.0, 1.0], [0.3, 0.8]]},
    "dirichlet_form": {},
    "many_particle_hardy": {},
    "many_particle_hardy_a": {},
    "many_particle_hardy_b": {},
    "lp_gradient_comparison": {"p": [1.5, 3.0]},
}

# theorems that run once per context rather than once per test function
FIXED_FUNCTION = {"l2_hardy_sharpness", "rellich_sharpness", "weighted_hardy_1d",
                  "many_particle_hardy", "many_particle_hardy_a", "many_particle_hardy_b"}

FUNCTION_KINDS = {"gaussian", "bump", "annulus", "random"}


@dataclass(frozen=True)
class ExperimentConfig:
    contexts: tuple  # (family, rank, k tuple)
    theorems: tuple  # (name, params dict)
    test_functions: tuple  # dicts
    coarse: int
    fine: int
    seed: int = 0
    output: str | None = None

    @property
    def resolution(self) -> tuple:
        return self.coarse, self.fine


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _require(cond, text, key, path, message):
    if not cond:
        raise ConfigError(message, _line_of(text, key), path)


def parse_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno, None) from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object", 1, None)
    known = {"seed", "resolution", "contexts", "theorems", "test_functions", "output"}
    for key in doc:
        _require(key in known, text, key, key, f"unknown field {key!r}")

    seed = doc.get("seed", 0)
    _require(isinstance(seed, int) and not isinstance(seed, bool), text, "seed", "seed", "must be an integer")
    res = doc.get("resolution", {"coarse": 8, "fine": 16})
    _require(isinstance(res, dict) and {"coarse", "fine"} <= set(res), text, "resolution", "resolution",
             "needs integer fields coarse and fine")
    coarse, fine = res["coarse"], res["fine"]
    _require(isinstance(coarse, int) and coarse > 0, text, "coarse", "resolution.coarse", "must be a positive integer")
    _require(isinstance(fine, int) and fine > coarse, text, "fine", "resolution.fine",
             "must be an integer strictly greater than coarse")

    contexts = []
    raw_ctx = doc.get("contexts", [])
    _require(isinstance(raw_ctx, list), text, "contexts", "contexts", "must be a list")
    for i, c in enumerate(raw_ctx):
        path = f"contexts[{i}]"
        _require(isinstance(c, dict) and "family" in c and "rank" in c, text, "contexts", path,
                 "needs family and rank")
        k = c.get("k", 0.0)
        k = list(k) if isinstance(k, list) else [k]
        _require(all(isinstance(v, (int, float)) and v >= 0 for v in k), text, "k", path + ".k",
                 "multiplicities must be nonnegative numbers")
        try:
            ctx = make_context(c["family"], int(c["rank"]), k[0] if len(k) == 1 else tuple(k))
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), _line_of(text, "contexts"), path) from None
        contexts.append((c["family"], int(c["rank"]), tuple(float(v) for v in ctx.k)))

    theorems = []
    raw_th = doc.get("theorems", [])
    _require(isinstance(raw_th, list), text, "theorems", "theorems", "must be a list")
    for i, t in enumerate(raw_th):
        path = f"theorems[{i}]"
        name, params = (t, {}) if isinstance(t, str) else (t.get("theorem") if isinstance(t, dict) else None, t)
        _require(name in THEOREM_PARAMS, text, "theorems", path, f"unknown theorem {name!r}")
        merged = dict(THEOREM_PARAMS[name])
        for key, val in params.items():
            if key == "theorem":
                continue
            _require(key in merged, text, key, f"{path}.{key}", f"unknown parameter for {name}")
            merged[key] = val
        theorems.append((name, merged))

    funcs = []
    raw_f = doc.get("test_functions", [{"kind": "random", "family": "gauss_poly", "count": 2}])
    _require(isinstance(raw_f, list), text, "test_functions", "test_functions", "must be a list")
    for i, f in enumerate(raw_f):
        path = f"test_functions[{i}]"
        _require(isinstance(f, dict) and f.get("kind") in FUNCTION_KINDS, text, "kind", path + ".kind",
                 f"kind must be one of {sorted(FUNCTION_KINDS)}")
        if f["kind"] == "random":
            for _ in range(int(f.get("count", 1))):
                funcs.append({"kind": "random", "family": f.get("family", "gauss_poly"), "index": len(funcs)})
        else:
            funcs.append(dict(f))
    output = doc.get("output")
    _require(output is None or isinstance(output, str), text, "output", "output", "must be a string")
    return ExperimentConfig(tuple(contexts), tuple(theorems), tuple(funcs), coarse, fine, seed, output)


def load_config(path: str | None) -> ExperimentConfig:
    if path is None or path == "default":
        text = resources.files("dunklhardy").joinpath(DEFAULT_CONFIG).read_text()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(str(exc)) from None
    return parse_config(text)


# -----------------------------------------------------------------------------
# test functions
# -----------------------------------------------------------------------------

def build_function(spec: dict, dim: int, seed: int):
    kind = spec["kind"]
    if kind == "random":
        rng = np.random.default_rng([seed, spec["index"]])
        return random_test_field(dim, rng, spec.get("family", "gauss_poly"))
    center = np.resize(np.asarray(spec.get("center", [0.0]), dtype=float), dim)
    if kind == "gaussian":
        return gaussian(center, spec.get("scale", 1.0), spec.get("amplitude", 1.0))
    if kind == "bump":
        return bump(center, spec.get("radius", 1.0), spec.get("amplitude", 1.0))
    if kind == "annulus":
        return radial_annulus_bump(spec.get("r_in", 0.5), spec.get("r_out", 2.0), dim, spec.get("amplitude", 1.0))
    raise ValueError(kind)


def _label(spec: dict) -> str:
    return json.dumps(spec, sort_keys=True, separators=(",", ":"))


# -----------------------------------------------------------------------------
# rows
# -----------------------------------------------------------------------------

def skip_row(theorem: str, ctx_descriptor: str, reason: str, function: str | None = None) -> dict:
    row = {"theorem": theorem, "ctx_descriptor": ctx_descriptor, "lhs": None, "rhs": None, "constant": None,
           "ratio": None, "margin": None, "quad_error": None, "pass": None, "skip": reason}
    if function is not None:
        row["function"] = function
    return row


def _row(report: ineq.RayleighReport, function: str | None = None) -> dict:
    out = report.as_dict()
    if function is not None:
        out["function"] = function
    return out


def _hardy_sharpness_rows(ctx, n_max):
    rows = []
    for pt in ineq.hardy_sharpness_sequence(ctx, n_max):
        rep = ineq.RayleighReport(
            "l2_hardy_sharpness", ctx.descriptor,
            ineq.IntegralEstimate(pt.numerator, 0.0, None), ineq.IntegralEstimate(pt.denominator, 0.0, None),
            ineq.hardy_constant(ctx),
            {"n": pt.n, "c_n": pt.c_n, "ratio_quadrature": pt.ratio_quadrature,
             "closed_form_displayed": pt.closed_form_displayed, "closed_form_exact": pt.closed_form_exact})
        rows.append(_row(rep))
    return rows


def _rellich_sharpness_rows(ctx, ns):
    rows = []
    for n in ns:
        pt = ineq.rellich_sharpness(ctx, int(n))
        rep = ineq.RayleighReport("rellich_sharpness", ctx.descriptor, ineq.IntegralEstimate(pt.numerator, 0.0, None),
                                  ineq.IntegralEstimate(pt.denominator, 0.0, None), ineq.rellich_constant(ctx),
                                  {"n": pt.n, "c1": pt.c1, "c2": pt.c2})
        rows.append(_row(rep))
    return rows


def _improved_hardy_delta(f) -> float:
    if f.support_radius is None:
        raise ineq.HypothesisError("improved Hardy needs a compactly supported f")
    return f.support_radius


def _ckn_rows(ctx, f, res, pairs, label):
    rows = []
    for a, b in pairs:
        try:
            rows.append(_row(ineq.ckn_check(ctx, float(a), float(b), f, res), label))
        except ineq.HypothesisError as exc:
            rows.append(skip_row("ckn", ctx.descriptor, f"(a, b) = ({a}, {b}): {exc}", label))
    return rows


def _per_p(fn, tag, ctx, ps, label):
    rows = []
    for p in ps:
        try:
            rows.append(_row(fn(float(p)), label))
        except ineq.HypothesisError as exc:
            rows.append(skip_row(tag, ctx.descriptor, f"p = {p}: {exc}", label))
    return rows


def _lp_default_p(ctx) -> list:
    lo, hi = ineq.lp_hardy_range(ctx)
    if hi <= lo:
        raise ineq.HypothesisError(f"no admissible p > 1: (N + 2 gamma)/(1 + 2 gamma) = {hi:.6g}")
    return [0.5 * (lo + hi)]


def _many_particle_rows(name, ctx, seed, task_index, res):
    family = ctx.system.family
    rng = np.random.default_rng([seed, task_index, 7])
    f, support = mp.chamber_bumps(ctx.system, rng)
    if name == "many_particle_hardy":
        rep = mp.many_particle_check(ctx, f, support, res)
    elif name == "many_particle_hardy_a":
        if not family.startswith("A"):
            raise ineq.HypothesisError("pair-distance form needs a type A system")
        rep = mp.many_particle_check_a(ctx.dim, float(ctx.k[0]), f, support, res)
    else:
        if not family.startswith("B"):
            raise ineq.HypothesisError("type B form needs a type B system")
        rep = mp.many_particle_check_b(ctx.dim, float(ctx.k[0]), float(ctx.k[1]), f, support, res)
    return [_row(rep.as_report(), "chamber_bumps")]


def run_task(task: tuple) -> tuple:
    """Evaluate one task; returns (rows, seconds).  Pure given the task."""
    index, (family, rank, k), (name, params), fspec, seed, res = task
    start = time.perf_counter()
    ctx = make_context(family, rank, k if len(k) > 1 else k[0])
    label = None if fspec is None else _label(fspec)
    try:
        rows = _dispatch(index, ctx, name, params, fspec, seed, res, label)
    except ineq.HypothesisError as exc:
        rows = [skip_row(name, ctx.descriptor, str(exc), label)]
    except mp.HyperplaneError as exc:
        rows = [skip_row(name, ctx.descriptor, f"support: {exc}", label)]
    return rows, time.perf_counter() - start


def _dispatch(index, ctx: DunklContext, name, params, fspec, seed, res, label):
    if name == "l2_hardy_sharpness":
        return _hardy_sharpness_rows(ctx, int(params["n_max"]))
    if name == "rellich_sharpness":
        return _rellich_sharpness_rows(ctx, params["n"])
    if name == "weighted_hardy_1d":
        q = ineq.sobolev_exponent(ctx) if ctx.homogeneous_dim > 2 else 4.0
        g, dg = (lambda t: t * (1.0 - t)), (lambda t: 1.0 - 2.0 * t)
        return [_row(ineq.weighted_hardy_1d(g, dg, q, 1.0, max(res[0], 16)), "t(1-t)")]
    if name.startswith("many_particle"):
        return _many_particle_rows(name, ctx, seed, index, res)

    f = build_function(fspec, ctx.dim, seed)
    if name == "hardy_type_identity":
        return _per_p(lambda p: ineq.hardy_type_identity_check(ctx, p, f, res), name, ctx, params["p"], label)
    if name in ("hardy_type_gradient", "hardy_type_dunkl_gradient"):
        variant = "gradient" if name == "hardy_type_gradient" else "dunkl_gradient"
        return _per_p(lambda p: ineq.hardy_type_check(ctx, p, f, variant, res), name, ctx, params["p"], label)
    if name == "lp_hardy":
        ps = params["p"] if params["p"] is not None else _lp_default_p(ctx)
        return _per_p(lambda p: ineq.lp_hardy_check(ctx, p, f, res), name, ctx, ps, label)
    if name == "lp_gradient_comparison":
        return _per_p(lambda p: ineq.lp_gradient_comparison(ctx, p, f, res), name, ctx, params["p"], label)
    if name == "l2_hardy":
        return [_row(ineq.l2_hardy_check(ctx, f, res), label)]
    if name == "dirichlet_form":
        return [_row(ineq.dirichlet_form_check(ctx, f, res), label)]
    if name == "fractional_hardy_rank1":
        if ctx.dim != 1:
            raise ineq.HypothesisError("rank-one transform only (N = 1)")
        rows = []
        for s in params["s"]:
            try:
                rows.append(_row(ineq.fractional_hardy_check_rank1(float(ctx.k[0]), float(s), f), label))
            except ineq.HypothesisError as exc:
                rows.append(skip_row(name, ctx.descriptor, f"s = {s}: {exc}", label))
        return rows
    if name == "improved_hardy":
        return [_row(ineq.improved_hardy_check(ctx, f, _improved_hardy_delta(f), res), label)]
    if name == "poincare":
        if f.support_radius is None:
            raise ineq.HypothesisError("Poincare needs f supported in the ball")
        return [_row(ineq.poincare_check(ctx, f, Ball(f.support_radius), res), label)]
    if name == "hardy_poincare":
        if f.support_radius is None:
            raise ineq.HypothesisError("needs f supported in a bounded domain")
        return [_row(ineq.hardy_poincare_check(ctx, f, f.support_radius, res), label)]
    if name == "rellich":
        return [_row(ineq.rellich_check(ctx, f, res), label)]
    if name == "ckn":
        return _ckn_rows(ctx, f, res, params["ab"], label)
    raise ValueError(f"unhandled theorem {name}")


# -----------------------------------------------------------------------------
# running
# -----------------------------------------------------------------------------

@dataclass
class SuiteResult:
    rows: list = field(default_factory=list)
    seconds: list = field(default_factory=list)  # wall clock per task (not part of the JSON output)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if r["pass"] is False and not r.get("informational")]

    @property
    def skips(self) -> list:
        return [r for r in self.rows if r["pass"] is None]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def json_lines(self) -> str:
        return "".join(json.dumps(r, allow_nan=False) + "\n" for r in self.rows)

    def csv_summary(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theorem", "ctx_descriptor", "rows", "passed", "failed", "skipped", "min_margin"])
        groups: dict = {}
        for r in self.rows:
            groups.setdefault((r["theorem"], r["ctx_descriptor"]), []).append(r)
        for (thm, desc), rows in groups.items():
            margins = [r["margin"] for r in rows if r["margin"] is not None and not r.get("informational")]
            writer.writerow([thm, desc, len(rows), sum(r["pass"] is True for r in rows),
                             sum(r["pass"] is False for r in rows), sum(r["pass"] is None for r in rows),
                             repr(min(margins)) if margins else ""])
        return buf.getvalue()


def tasks(config: ExperimentConfig) -> list:
    out = []
    for ctx_spec in config.contexts:
        for name, params in config.theorems:
            fspecs = [None] if name in FIXED_FUNCTION else list(config.test_functions)
            for fspec in fspecs:
                out.append((len(out), ctx_spec, (name, params), fspec, config.seed, config.resolution))
    return out


def run(config: ExperimentConfig, jobs: int = 1) -> SuiteResult:
    """Evaluate every task; rows come back in task order whatever ``jobs`` is."""
    work = tasks(config)
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_task, work))
    else:
        results = [run_task(t) for t in work]
    res = SuiteResult()
    for rows, secs in results:
        res.rows.extend(rows)
        res.seconds.append(secs)
    return res
