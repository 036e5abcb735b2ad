"""Command-line front end: experiment configs in, verdict tables out.

One experiment per invocation.  The JSON config selects the command
(pressure, bound, sweep, verify, thinning) and its parameters; --seed,
--threads, --out and --format override the matching config keys.  Output
is a fixed-schema CSV or JSONL table; every row carries the master seed
and a hash of the semantic config (presentation keys excluded) so any
row can be replayed exactly.

Exit codes: 0 all verdicts pass, 1 at least one verdict failed, 2 the
config was invalid.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import jsonschema

from .bounds import (canonical_sk_bound, canonical_vb_bound, delta_n,
                     prop_a_bound)
from .errors import ConfigInvalid, GlasslabError
from .laws import law_from_json
from .levy import connectivity_sweep
from .models import (couple, model_from_json, sk_spherical_pair,
                     thinning_equivalence_test, vb_edge_canonical,
                     vb_edge_grand)
from .montecarlo import (difference_estimate, difference_for_plan,
                         quenched_pressure, variance_check)
from .seeding import SeedPlan
from .verify import (_bound_row, _row, all_passed, config_hash, rows_to_csv,
                     rows_to_jsonl, run_all)

BOUND_KINDS = ("prop_a", "prop_b", "canonical_vb", "canonical_sk", "variance")
SWEEP_KINDS = ("delta", "connectivity")

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["command"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": ["pressure", "bound", "sweep", "verify",
                             "thinning"]},
        "master_seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
        "format": {"enum": ["csv", "jsonl"]},
        "kind": {"enum": list(BOUND_KINDS + SWEEP_KINDS)},
        "model": {"type": "object"},
        "model_a": {"type": "object"},
        "model_b": {"type": "object"},
        "base": {"type": "object"},
        "M": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "k_max": {"type": "integer", "minimum": 2},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "significance": {"type": "number", "exclusiveMinimum": 0,
                         "exclusiveMaximum": 1},
        "sizes": {"type": "array", "minItems": 1,
                  "items": {"type": "integer", "minimum": 1}},
        "alphas": {"type": "array", "minItems": 1,
                   "items": {"type": "number", "exclusiveMinimum": 0}},
    },
    "allOf": [
        {"if": {"properties": {"command": {"const": "pressure"}}},
         "then": {"required": ["model", "M"]}},
        {"if": {"properties": {"command": {"const": "bound"}}},
         "then": {"required": ["kind", "M"]}},
        {"if": {"properties": {"command": {"const": "sweep"}}},
         "then": {"required": ["kind"]}},
        {"if": {"properties": {"command": {"const": "thinning"}}},
         "then": {"required": ["alpha", "n", "samples"]}},
    ],
}


def _need(cfg: dict, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigInvalid(f"{cfg['command']}/{cfg.get('kind', '')} config "
                            f"missing keys: {', '.join(missing)}")


def _model(obj: dict):
    try:
        return model_from_json(obj)
    except GlasslabError as exc:
        raise ConfigInvalid(f"bad model spec: {exc}") from exc


def _law(obj: dict):
    try:
        return law_from_json(obj)
    except GlasslabError as exc:
        raise ConfigInvalid(f"bad law spec: {exc}") from exc


def _cmd_pressure(cfg: dict, seed: int, threads):
    model = _model(cfg["model"])
    est = quenched_pressure(model, int(cfg["M"]), SeedPlan(seed),
                            threads=threads)
    return [_row("pressure", model.name, model=model.name, n=model.n_sites,
                 beta=getattr(model, "beta", None), h=model.h, m=est.count,
                 mean=est.mean, stderr=est.stderr, verdict=True)]


def _cmd_bound(cfg: dict, seed: int, threads):
    kind = cfg["kind"]
    m = int(cfg["M"])
    plan = SeedPlan(seed)
    if kind == "prop_a":
        _need(cfg, "model_a", "model_b")
        a, b = _model(cfg["model_a"]), _model(cfg["model_b"])
        law_a = getattr(a, "entry_law", None)
        law_b = getattr(b, "entry_law", None)
        if law_a is None or law_b is None:
            raise ConfigInvalid("prop_a compares dense i.i.d.-entry models")
        if a.n_sites != b.n_sites:
            raise ConfigInvalid("models must share the site count")
        k_max = int(cfg.get("k_max", 60))
        est = difference_estimate(a, b, m, plan, coupling="independent",
                                  threads=threads)
        return [_bound_row("bound", "prop_a", model=f"{a.name}/{b.name}",
                           n=a.n_sites, m=m, k_max=k_max, mean=est.mean,
                           stderr=est.stderr,
                           bound=prop_a_bound(law_a, law_b, a.n_sites, k_max))]
    if kind == "prop_b":
        _need(cfg, "model_a", "model_b")
        a, b = _model(cfg["model_a"]), _model(cfg["model_b"])
        try:
            coupled = couple(a, b)
        except GlasslabError as exc:
            raise ConfigInvalid(f"prop_b needs a coupled pair: {exc}") from exc
        est = difference_for_plan(coupled, m, plan, threads=threads)
        n = a.n_sites
        return [_bound_row("bound", "prop_b", model=f"{a.name}/{b.name}",
                           n=n, m=m, mean=est.mean,
                           stderr=math.hypot(est.stderr, est.l1_stderr / n),
                           bound=est.l1_mean / n)]
    if kind == "canonical_vb":
        _need(cfg, "alpha", "beta", "n")
        alpha, beta, n = float(cfg["alpha"]), float(cfg["beta"]), int(cfg["n"])
        est = difference_estimate(vb_edge_grand(alpha, beta, n),
                                  vb_edge_canonical(alpha, beta, n),
                                  m, plan, coupling="crn", threads=threads)
        return [_bound_row("bound", "canonical_vb", model="vb_edge", n=n,
                           alpha=alpha, beta=beta, m=m, mean=est.mean,
                           stderr=est.stderr,
                           bound=canonical_vb_bound(alpha, beta, n))]
    if kind == "canonical_sk":
        _need(cfg, "beta", "n")
        beta, n = float(cfg["beta"]), int(cfg["n"])
        grand, canonical = sk_spherical_pair(beta, n)
        est = difference_estimate(grand, canonical, m, plan, coupling="crn",
                                  threads=threads)
        return [_bound_row("bound", "canonical_sk", model="sk_spherical", n=n,
                           beta=beta, m=m, mean=est.mean, stderr=est.stderr,
                           bound=canonical_sk_bound(beta, n))]
    if kind == "variance":
        _need(cfg, "model")
        model = _model(cfg["model"])
        rep = variance_check(model, m, plan, threads=threads)
        return [_bound_row("bound", "variance", model=model.name,
                           n=model.n_sites, m=m, mean=rep.sample_variance,
                           bound=rep.bound)]
    raise ConfigInvalid(f"unknown bound kind {kind!r}")


def _cmd_sweep(cfg: dict, seed: int, threads):
    kind = cfg["kind"]
    if kind == "delta":
        _need(cfg, "base")
        base = _law(cfg["base"])
        beta = float(cfg.get("beta", 1.0))
        sizes = [int(x) for x in cfg.get("sizes", (4, 16, 64, 256))]
        rows = []
        prev = None
        for n in sizes:
            value = delta_n(base, beta, n)
            rows.append(_row("sweep_delta", f"delta_N{n}", model=base.kind,
                             n=n, beta=beta, mean=value, bound=prev,
                             slack=None if prev is None else prev - value,
                             verdict=prev is None or value < prev))
            prev = value
        return rows
    if kind == "connectivity":
        _need(cfg, "beta", "n", "M")
        beta, n, m = float(cfg["beta"]), int(cfg["n"]), int(cfg["M"])
        alphas = [float(a) for a in cfg.get("alphas", (1, 2, 4, 8, 16))]
        k_max = int(cfg.get("k_max", 60))
        table = connectivity_sweep(beta, alphas, n, m, SeedPlan(seed),
                                   k_max=k_max, threads=threads)
        return [_bound_row("sweep_connectivity", f"gap_alpha_{r.alpha:g}",
                           model="vb_poissonized/sk", n=n, alpha=r.alpha,
                           beta=beta, m=m, k_max=k_max, mean=r.gap,
                           stderr=r.gap_stderr, bound=r.bound)
                for r in table]
    raise ConfigInvalid(f"unknown sweep kind {kind!r}")


def _cmd_verify(cfg: dict, seed: int, threads):
    return run_all(seed, threads)


def _cmd_thinning(cfg: dict, seed: int, threads):
    alpha = float(cfg["alpha"])
    n = int(cfg["n"])
    samples = int(cfg["samples"])
    significance = float(cfg.get("significance", 1e-3))
    rep = thinning_equivalence_test(alpha, n, samples,
                                    SeedPlan(seed).generator(),
                                    significance=significance)
    rows = []
    for i in range(n):
        for j in range(n):
            p = float(rep.cell_pvalues[i, j])
            rows.append(_row("thinning", f"cell_{i + 1}_{j + 1}_p", n=n,
                             alpha=alpha, m=samples, mean=p,
                             bound=significance, slack=p - significance,
                             verdict=p > significance))
    p = rep.independence_pvalue
    rows.append(_row("thinning", "independence_p", n=n, alpha=alpha,
                     m=samples, mean=p, bound=significance,
                     slack=p - significance, verdict=p > significance))
    for label, _emp, _exact, _se, z in rep.mgf_points:
        rows.append(_bound_row("thinning", f"mgf_{label}", n=n, alpha=alpha,
                               m=samples, mean=z, bound=rep.mgf_z_limit))
    return rows


_DISPATCH = {"pressure": _cmd_pressure, "bound": _cmd_bound,
             "sweep": _cmd_sweep, "verify": _cmd_verify,
             "thinning": _cmd_thinning}


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigInvalid(f"config rejected: {exc.message}") from exc
    return raw


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="glasslab",
        description="Deterministic spin-glass pressure experiments: "
                    "JSON config in, CSV/JSONL verdict table out.")
    parser.add_argument("--config", required=True,
                        help="path to the experiment config (JSON)")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed; overrides config master_seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads; overrides config and "
                             "GLASSLAB_THREADS")
    parser.add_argument("--out", default=None,
                        help="output path; default stdout")
    parser.add_argument("--format", choices=("csv", "jsonl"), default=None,
                        help="output format; default csv")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("master_seed")
        if seed is None:
            raise ConfigInvalid("master_seed required (config or --seed)")
        seed = int(seed)
        if seed < 0:
            raise ConfigInvalid("master_seed must be >= 0")
        merged = dict(cfg)
        merged["master_seed"] = seed
        digest = config_hash(merged)
        threads = args.threads if args.threads is not None \
            else cfg.get("threads")
        fmt = args.format or cfg.get("format") or "csv"
        out = args.out or cfg.get("out")
        command = cfg["command"]
        runner = _DISPATCH[command]
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        rows = runner(merged, seed, threads)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GlasslabError as exc:
        # run-time resource/model failures become a failing row, not a crash
        rows = [_row(command, f"error_{type(exc).__name__}", verdict=False)]
    for row in rows:
        row["seed"] = seed
        row["config_hash"] = digest
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_jsonl(rows)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if all_passed(rows) else 1


if __name__ == "__main__":
    sys.exit(main())
