"""Command-line front end.

Every subcommand resolves its flags (optionally merged over a JSON config
file whose keys mirror the flags) into an :class:`ExperimentConfig`, runs it
and writes one JSON report.  Exit codes: 0 ok, 1 a check failed,
2 usage error, 3 resource cap, 4 input/output or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import kernels
from .boolean import TruthTable, parse_truth_table, wht_forward
from .config import DEFAULT_CONSTANTS, Constants, ParseError, ResourceError
from .f2poly import F2Polynomial, lift_pm, parse_poly, prop51_check
from .families import FunctionFamily, explicit, from_descriptor
from .report import ExperimentReport
from .seeding import derive_vec, parse_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4
_CONSTANT_KEYS = {f.name for f in fields(Constants)}


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    constants: Constants = DEFAULT_CONSTANTS
    out: str | None = None

    def to_dict(self) -> dict:
        return {"command": self.command, "params": dict(sorted(self.params.items())),
                "seed": format(self.seed, "x"), "constants": self.constants.as_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        params = dict(d.get("params", {}))
        consts = dict(d.get("constants", {}))
        for key in list(params):
            if key in _CONSTANT_KEYS:
                consts[key] = params.pop(key)
        return cls(d["command"], params, parse_seed(d.get("seed", "0")),
                   replace(DEFAULT_CONSTANTS, **consts), d.get("out"))


class UsageError(ValueError):
    pass


def _req(p: dict, key: str):
    if p.get(key) is None:
        raise UsageError(f"missing required option --{key.replace('_', '-')}")
    return p[key]


# ---- input parsing ---------------------------------------------------------------

def parse_function_input(path: str, n: int | None = None):
    """Truth table (header ``n=``) or F2 polynomial (monomial lines)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", None, path) from None
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), None)
    if first is None:
        raise ParseError("empty input file", 1, path)
    if first.startswith("n="):
        return parse_truth_table(text, path)
    return parse_poly(text, n, path)


def _function_family(p: dict) -> FunctionFamily:
    if p.get("fn"):
        obj = parse_function_input(p["fn"], p.get("n"))
        tt = lift_pm(obj) if isinstance(obj, F2Polynomial) else obj
        return explicit([tt], name=f"file:{p['fn']}")
    if p.get("family"):
        return from_descriptor(p["family"])
    raise UsageError("give --fn or --family")


# ---- subcommand runners ----------------------------------------------------------

def _analyze(cfg: ExperimentConfig) -> ExperimentReport:
    from .spectral import class_metrics
    p = cfg.params
    fam = _function_family(p)
    n = fam.n
    levels = [p["k"]] if p.get("k") is not None else list(range(n + 1))
    closure = p.get("closure") or "as-given"
    out = [class_metrics(fam, k, closure=closure, seed=cfg.seed).as_dict() for k in levels]
    return ExperimentReport("analyze", "diagnostic", quantities={"levels": out},
                            params={"n": n, "family": fam.descriptor, "closure": closure},
                            mode="sampled" if any(m["mode"] == "sampled" for m in out) else "exact")


def _approx(cfg: ExperimentConfig) -> ExperimentReport:
    from . import taylor
    p = cfg.params
    mode = p.get("mode") or "lp"
    if mode == "chebyshev":
        return taylor.monic_chebyshev_check(_req(p, "d"))
    fam = _function_family(p)
    k = _req(p, "k")
    if mode == "ck-search":
        eps = _req(p, "eps")
        c = taylor.c_k_search(fam, k, eps, p.get("tol") or 1e-6)
        return ExperimentReport("ck_search", "diagnostic", quantities={"c": c},
                                params={"k": k, "eps": eps, "family": fam.descriptor})
    c = _req(p, "c")
    if mode == "cheby":
        return taylor.cheby_lower_check(fam, k, c)
    fes = fam.expansions()
    if mode == "taylor":
        reps = [taylor.taylor_tail_check(g, k, c) for g in fes]
        worst = max(reps, key=lambda r: r.quantities["lhs"] - r.quantities["rhs"])
        worst.params["family"] = fam.descriptor
        worst.params["members"] = len(fes)
        worst.status = "pass" if all(r.passed for r in reps) else "fail"
        return worst
    if mode == "lp":
        results = [taylor.best_lowdeg_approx(g, k, c).as_dict() for g in fes]
        return ExperimentReport("approx_lp", "diagnostic", quantities={"results": results},
                                params={"k": k, "c": c, "family": fam.descriptor})
    raise UsageError(f"unknown approx mode {mode!r}")


def _generator(p: dict):
    from .primitives import constant_generator, kwise_generator, smallbias_generator, uniform_generator
    kind = _req(p, "kind")
    n = _req(p, "n")
    if kind == "kwise":
        return kwise_generator(n, _req(p, "t"))
    if kind == "smallbias":
        return smallbias_generator(n, _req(p, "delta"))
    if kind == "uniform":
        return uniform_generator(n)
    if kind == "constant":
        return constant_generator(n)
    raise UsageError(f"unknown generator kind {kind!r}")


def _primitives(cfg: ExperimentConfig) -> ExperimentReport:
    from .primitives import bias_audit
    p = cfg.params
    gen = _generator(p)
    if p.get("seed_hex") is not None:
        s = parse_seed(p["seed_hex"])
        return ExperimentReport("sample", "diagnostic",
                                quantities={"output": gen.sample(s).tolist()},
                                params={"generator": gen.describe(), "seed": format(s, "x")})
    if p.get("audit"):
        mode = "sampled" if p.get("samples") else "exact"
        return bias_audit(gen, p.get("max_set_size"), mode, p.get("samples") or 0, cfg.seed)
    return ExperimentReport("generator", "diagnostic", params={"generator": gen.describe()})


def _fprg(p: dict, cfg: ExperimentConfig, fam=None):
    from .fractional import build_fracprg_l1, build_fracprg_mk
    from .spectral import class_metrics
    n, k, eps = _req(p, "n"), _req(p, "k"), _req(p, "eps")
    b = p.get("b")
    prov = "given"
    if b is None:
        if fam is None:
            raise UsageError("give --b or a --family to measure it from")
        m = class_metrics(fam, k, closure="restriction-closure", seed=cfg.seed)
        b = max(1.0, m.mk ** (1 / k)) if (p.get("kind") or "mk") == "mk" else \
            max(1.0, max(class_metrics(fam, i, closure="restriction-closure").l1 ** (1 / i) for i in range(1, k)))
        prov = f"measured ({m.mode})"
    kind = p.get("kind") or "mk"
    c_override = p.get("c")
    if p.get("lp_c"):
        from .taylor import c_k_search
        if fam is None:
            raise UsageError("--lp-c needs a --family")
        # the best degree-<k approximant is fooled exactly by (k-1)-wise signs, so
        # the error is at most twice its corner error: c_k(eps/2, F) suffices
        c_override = c_k_search(fam, k, eps / 2, tol=p.get("tol") or 1e-4)
    if c_override is not None and kind != "mk":
        raise UsageError("--c / --lp-c apply to --kind mk only")
    if kind == "mk":
        f = build_fracprg_mk(n, k, b, eps, cfg.constants, c_override=c_override)
        if c_override is not None:
            f.ledger["c_formula"] = build_fracprg_mk(n, k, b, eps, cfg.constants).c
            f.ledger["c_source"] = "lp" if p.get("lp_c") else "override"
            if p.get("lp_c"):
                f.ledger["design_error"] = eps  # 2 * (eps/2); the Taylor tail is not used here
    else:
        f = build_fracprg_l1(n, k, b, eps, cfg.constants)
    f.ledger["b_provenance"] = prov
    return f


def _fprg_cmd(cfg):
    f = _fprg(cfg.params, cfg)
    return ExperimentReport("fprg", "diagnostic", params={"fprg": f.describe()})


def _verify_fprg(cfg):
    from .fractional import fooling_error
    p = cfg.params
    fam = from_descriptor(_req(p, "family"))
    f = _fprg(p, cfg, fam)
    mode = "sampled" if p.get("samples") else "exact"
    return fooling_error(f, fam, mode, p.get("samples") or 0, cfg.seed)


def _prg(p: dict, cfg: ExperimentConfig):
    from .walk import build_prg_f2, build_prg_levelk, build_prg_uptok
    mode = _req(p, "mode")
    n, eps = _req(p, "n"), _req(p, "eps")
    if mode == "levelk":
        return build_prg_levelk(n, _req(p, "k"), p.get("b") or 1.0, eps, cfg.constants)
    if mode == "uptok":
        return build_prg_uptok(n, p.get("k"), p.get("b") or 1.0, eps, cfg.constants)
    if mode == "f2":
        return build_prg_f2(n, _req(p, "d"), eps, cfg.constants)
    raise UsageError(f"unknown prg mode {mode!r}")


def _prg_cmd(cfg):
    prg = _prg(cfg.params, cfg)
    return ExperimentReport("prg", "diagnostic", params={"prg": prg.describe()})


def _verify_prg(cfg):
    from .walk import prg_fooling_error
    p = cfg.params
    prg = _prg(p, cfg)
    desc = p.get("family")
    if desc is None:
        if p["mode"] != "f2":
            raise UsageError("--family is required for this mode")
        desc = f"f2:n={p['n']},d={p['d']},sample=500,seed=7"
    fam = from_descriptor(desc)
    if p.get("samples"):
        return prg_fooling_error(prg, fam, "sampled", p["samples"], cfg.seed)
    return prg_fooling_error(prg, fam, "exact")


def _corr(cfg):
    from . import correlation as corr
    p = cfg.params
    check = _req(p, "check")
    if check == "fact62":
        return corr.fact62_check(_req(p, "n"))
    if check == "fact64":
        return corr.fact64_check(_req(p, "n"), p.get("k") or 1)
    k = _req(p, "k")
    if check == "fact63":
        if p.get("fn"):
            obj = parse_function_input(p["fn"])
            return corr.fact63_check(lift_pm(obj) if isinstance(obj, F2Polynomial) else obj, k)
        n = _req(p, "n")
        count = p.get("random") or 1
        reps = [corr.fact63_check(_random_table(k * n, cfg.seed, j), k) for j in range(count)]
        bad = [j for j, r in enumerate(reps) if not r.passed]
        return ExperimentReport("fact63", "pass" if not bad else "fail",
                                quantities={"functions": count, "violations": bad},
                                params={"k": k, "n": n, "seed": format(cfg.seed, "x")})
    if check == "lemma61":
        n = _req(p, "n")
        fam = _function_family(p)
        return corr.lemma61_harness(fam, k, n, cfg.constants)
    raise UsageError(f"unknown check {check!r}")


def _random_table(n: int, master: int, j: int) -> TruthTable:
    from .seeding import stream
    bits = stream(master, j).bits(1 << n)
    vals = np.array([(bits >> i) & 1 for i in range(1 << n)], dtype=np.int8)
    return TruthTable(n, 1 - 2 * vals)


def _prop51(cfg):
    p = cfg.params
    if p.get("family"):
        fam = from_descriptor(p["family"])
    else:
        from .f2poly import family_f2
        n, d = _req(p, "n"), _req(p, "d")
        fam = family_f2(n, d, "sample", p.get("sample") or 500, cfg.seed) if p.get("sample") \
            else family_f2(n, d, "enumerate")
    d = _req(p, "d")
    return prop51_check(fam, d, _req(p, "k"))


RUNNERS = {
    "analyze": _analyze, "approx": _approx, "primitives": _primitives, "fprg": _fprg_cmd,
    "verify-fprg": _verify_fprg, "prg": _prg_cmd, "verify-prg": _verify_prg,
    "corr": _corr, "prop51": _prop51,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Dispatch; the report embeds the resolved config and the wall time."""
    runner = RUNNERS.get(cfg.command)
    if runner is None:
        raise UsageError(f"unknown command {cfg.command!r}")
    t0 = time.perf_counter()
    rep = runner(cfg)
    rep.wall_time = time.perf_counter() - t0
    rep.config = cfg.to_dict()
    return rep


def emit_bits(cfg: ExperimentConfig) -> list:
    """Output vectors as 0/1 strings (0 for +1, 1 for -1), character i = coordinate i+1."""
    p = cfg.params
    count = _req(p, "count")
    if count <= 0:
        raise UsageError("count must be positive")
    if p.get("kind") == "prg":
        prg = _prg(p, cfg)
        masks, n = prg.emit_masks(count, cfg.seed), prg.n
    else:
        gen = _generator(p)
        n = gen.n
        if p.get("enumerate"):
            seeds = np.arange(count, dtype=np.uint64)
        else:
            seeds = derive_vec(cfg.seed, np.arange(count))
            if gen.seed_len < 64:
                seeds &= np.uint64((1 << gen.seed_len) - 1)
        masks = kernels.gen_masks(gen, seeds)
    return ["".join("1" if (int(m) >> i) & 1 else "0" for i in range(n)) for m in masks]


# ---- argument parsing -------------------------------------------------------------

def _common(sp, *names):
    for name in names:
        {
            "n": lambda: sp.add_argument("--n", type=int),
            "k": lambda: sp.add_argument("--k", type=int),
            "d": lambda: sp.add_argument("--d", type=int),
            "b": lambda: sp.add_argument("--b", type=float),
            "c": lambda: sp.add_argument("--c", type=float),
            "t": lambda: sp.add_argument("--t", type=int),
            "eps": lambda: sp.add_argument("--eps", type=float),
            "delta": lambda: sp.add_argument("--delta", type=float),
            "family": lambda: sp.add_argument("--family", help="e.g. f2:n=8,d=2,sample=500,seed=7"),
            "fn": lambda: sp.add_argument("--fn", help="truth-table or F2-polynomial file"),
            "samples": lambda: sp.add_argument("--samples", type=int),
            "exact": lambda: sp.add_argument("--exact", action="store_true", default=None),
        }[name]()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polarwalk", description=__doc__.splitlines()[0], allow_abbrev=False)
    ap.add_argument("--config", help="JSON file whose keys mirror the flags")
    ap.add_argument("--out", help="write the JSON report (or emitted lines) here")
    ap.add_argument("--seed", dest="master_seed", help="master seed (hex)")
    ap.add_argument("--no-timing", action="store_true", help="omit wall_time from the report")
    for name in sorted(_CONSTANT_KEYS):
        ap.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="level-k metrics of a function or family")
    _common(sp, "fn", "family", "k", "n")
    sp.add_argument("--closure", choices=["as-given", "restriction-closure"])

    sp = sub.add_parser("approx", help="low-degree approximation on a subcube")
    _common(sp, "fn", "family", "k", "c", "eps", "d", "n")
    sp.add_argument("--mode", choices=["lp", "taylor", "cheby", "ck-search", "chebyshev"])
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("primitives", help="t-wise / small-bias generators and audits")
    sp.add_argument("--kind", choices=["kwise", "smallbias", "uniform", "constant"])
    _common(sp, "n", "t", "delta", "samples")
    sp.add_argument("--audit", action="store_true", default=None)
    sp.add_argument("--max-set-size", type=int)
    sp.add_argument("--seed-hex")

    for name in ("fprg", "verify-fprg"):
        sp = sub.add_parser(name, help="fractional PRG" + (" fooling check" if "verify" in name else ""))
        sp.add_argument("--kind", choices=["mk", "l1"])
        _common(sp, "n", "k", "b", "eps", "c")
        sp.add_argument("--lp-c", action="store_true", default=None,
                        help="take c from the LP search c_k(split*eps) over the family")
        sp.add_argument("--tol", type=float)
        if "verify" in name:
            _common(sp, "family", "samples", "exact")

    for name in ("prg", "verify-prg"):
        sp = sub.add_parser(name, help="polarizing-walk PRG" + (" fooling check" if "verify" in name else ""))
        sp.add_argument("--mode", choices=["levelk", "uptok", "f2"])
        _common(sp, "n", "k", "b", "d", "eps")
        if "verify" in name:
            _common(sp, "family", "samples", "exact")

    sp = sub.add_parser("emit", help="stream generator outputs as 0/1 lines")
    sp.add_argument("--kind", choices=["kwise", "smallbias", "uniform", "constant", "prg"])
    sp.add_argument("--mode", choices=["levelk", "uptok", "f2"])
    _common(sp, "n", "k", "b", "d", "t", "eps", "delta")
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed-hex")
    sp.add_argument("--enumerate", action="store_true", default=None,
                    help="use seeds 0..count-1 directly instead of derived seeds")

    sp = sub.add_parser("corr", help="correlation-reduction checks")
    sp.add_argument("--check", choices=["fact62", "fact63", "fact64", "lemma61"])
    _common(sp, "n", "k", "fn", "family")
    sp.add_argument("--random", type=int, help="number of random functions (fact63)")

    sp = sub.add_parser("prop51", help="level-k mass of F2 polynomials against (k 2^3d)^k")
    _common(sp, "n", "d", "k", "family")
    sp.add_argument("--sample", type=int)
    return ap


_GLOBAL = {"config", "out", "master_seed", "no_timing", "command"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_cfg: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise ParseError(f"cannot read: {exc.strerror}", None, args.config) from None
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, args.config) from None
        if not isinstance(file_cfg, dict):
            raise ParseError("config must be a JSON object", 1, args.config)
    merged = {k.replace("-", "_"): v for k, v in file_cfg.items()}
    for key, val in vars(args).items():
        if key not in _GLOBAL and val is not None:
            merged[key] = val
    seed = args.master_seed if args.master_seed is not None else merged.pop("seed", "0")
    merged.pop("seed", None)
    if args.command == "emit" and merged.get("seed_hex") is not None:
        seed = merged.pop("seed_hex")  # emit: --seed-hex is the master seed
    consts = {k: merged.pop(k) for k in list(merged) if k in _CONSTANT_KEYS}
    out = args.out or merged.pop("out", None)
    merged.pop("out", None)
    return ExperimentConfig(args.command, merged, parse_seed(seed),
                            replace(DEFAULT_CONSTANTS, **consts), out)


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "emit":
            _write("\n".join(emit_bits(cfg)) + "\n", cfg.out)
            return EXIT_OK
        rep = run_experiment(cfg)
        _write(rep.to_json(timing=not args.no_timing) + "\n", cfg.out)
        return EXIT_FAIL if rep.status == "fail" else EXIT_OK
    except ParseError as exc:
        print(f"polarwalk: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"polarwalk: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResourceError as exc:
        print(f"polarwalk: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError, TypeError) as exc:
        print(f"polarwalk: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
