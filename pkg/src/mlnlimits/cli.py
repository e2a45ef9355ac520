"""Command-line interface: ``mlnlimits <command> ...`` or ``python -m mlnlimits``.

Exit codes: 0 success (all checks pass), 1 usage or input error, 2 some check
failed, 3 nothing failed but some estimate did not mix or was inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
from pathlib import Path
import sys

from .asymptotics import predict_limit
from .exact import (BudgetExceeded, event_probability, log2_partition, profile_distribution,
                    tv_distance, world_log2_weights)
from .experiments import REGISTRY, ExperimentError, ExperimentSpec, list_experiments, run_experiment
from .logic import GRAPH, UNARY, FormulaError, Grounding, SignatureError, parse_formula
from .mln import Mln, MlnError
from .normalform import normalize_qf, unary_normal_form
from .sampler import RHAT_LIMIT, estimate_event, estimate_statistic_histogram

log = logging.getLogger("mlnlimits")

EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_UNMIXED = 0, 1, 2, 3


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--model", default=d(None), help="MLN JSON file")
    p.add_argument("--out", default=d(None), help="directory for CSV/JSON output")
    p.add_argument("--seed", type=int, default=d(0), help="master seed (u64)")
    p.add_argument("--threads", type=int, default=d(1), help="parallel workers")
    p.add_argument("--exact-int", action="store_true", default=d(False),
                   help="exact integer arithmetic (integer weights)")


def _sampler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--burn-in", type=int, default=None, help="default 50 x #atoms")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--thin", type=int, default=None, help="default #atoms")
    p.add_argument("--max-rhat", type=float, default=RHAT_LIMIT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlnlimits",
                                     description="Exact and sampled MLN distributions.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    p = cmd("parse", "parse a formula and print its structure")
    p.add_argument("formula")
    p.add_argument("--signature", choices=["unary", "graph"], default=None,
                   help="built-in signature when no --model is given")

    cmd("normalform", "quantifier-free normal form of the model")

    p = cmd("exact-dist", "exact distribution (colour profile for unary models)")
    p.add_argument("-n", type=int, required=True)

    cmd("predict-limit", "limit behaviour of a unary quantifier-free model")

    p = cmd("event-prob", "exact probability of a sentence")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--event", required=True, help="first-order sentence")

    p = cmd("tv", "total variation distance between two distribution CSVs")
    p.add_argument("p")
    p.add_argument("q")

    p = cmd("sample", "Gibbs estimate of an event or statistic histogram")
    p.add_argument("-n", type=int, required=True)
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--event", help="first-order sentence")
    target.add_argument("--statistic", help="edges, triangles, max_degree, m, violations:<i>")
    p.add_argument("--log", help="write retained samples as CSV chain,step,statistic,value")
    _sampler_flags(p)

    p = cmd("experiment", "registry of reproducibility experiments")
    esub = p.add_subparsers(dest="action", required=True)
    run = esub.add_parser("run", help="run one experiment, or 'all'")
    _global_flags(run, suppress=True)
    run.add_argument("name")
    run.add_argument("--mode", choices=["exact", "sample", "auto"], default="auto")
    run.add_argument("--param", action="append", default=[], metavar="KEY=JSON",
                     help="override a parameter, e.g. n=32 or weights=[0,2]")
    _sampler_flags(run)
    lst = esub.add_parser("list", help="list experiments")
    lst.add_argument("--json", action="store_true")
    return parser


def _load_model(args) -> Mln:
    if not args.model:
        raise MlnError("this command needs --model <path.json>")
    return Mln.load(args.model)


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / name, "w", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _parse(args) -> int:
    if args.model:
        sig = _load_model(args).signature
    else:
        sig = GRAPH if args.signature == "graph" else UNARY
    f = parse_formula(args.formula, sig)
    print(_json({"formula": str(f), "free_vars": [f"x{v}" for v in f.free_vars],
                 "quantifier_free": f.quantifier_free, "sentence": f.is_sentence}), end="")
    return EXIT_OK


def _normalform(args) -> int:
    m = _load_model(args)
    if m.signature.is_single_unary():
        nf = unary_normal_form(m)
        _emit(args, "normalform.json", _json(nf.to_json()))
    else:
        _emit(args, "normalform.json", _json(normalize_qf(m).to_json()))
    return EXIT_OK


def _exact_dist(args) -> int:
    m = _load_model(args)
    if m.signature.is_single_unary():
        _emit(args, "profile.csv", profile_distribution(m, args.n).to_csv())
        return EXIT_OK
    idx, lw = world_log2_weights(m, args.n)
    z = log2_partition(m, args.n, threads=args.threads)
    g = Grounding(m.signature, args.n)
    rows = ["world,log2_weight,prob"]
    rows += [f"{i},{w:.17g},{2.0 ** (w - z):.17g}" for i, w in zip(idx.tolist(), lw.tolist())]
    log.info("world index bit j is ground atom j of %s", g.atoms)
    _emit(args, "worlds.csv", "\n".join(rows) + "\n")
    return EXIT_OK


def _predict(args) -> int:
    lp = predict_limit(unary_normal_form(_load_model(args)))
    _emit(args, "limit.json", _json(lp.to_json()))
    return EXIT_OK


def _event_prob(args) -> int:
    m = _load_model(args)
    f = parse_formula(args.event, m.signature)
    p = event_probability(m, args.n, f, threads=args.threads, exact=args.exact_int)
    out = {"event": str(f), "n": args.n, "value": p.value, "method": p.method}
    if p.exact is not None:
        out["exact"] = str(p.exact)
    _emit(args, "event.json", _json(out))
    return EXIT_OK


def _read_distribution(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    col = header.index("prob") if "prob" in header else len(header) - 1
    return {r[0]: float(r[col]) for r in body if r}


def _tv(args) -> int:
    d = tv_distance(_read_distribution(args.p), _read_distribution(args.q))
    print(f"{d:.17g}")
    return EXIT_OK


def _sample(args) -> int:
    m = _load_model(args)
    kw = dict(chains=args.chains, burn_in=args.burn_in, samples=args.samples, thin=args.thin,
              seed=args.seed, max_rhat=args.max_rhat, workers=args.threads)
    logfile = open(args.log, "w", newline="\n") if args.log else None
    try:
        if args.event:
            f = parse_formula(args.event, m.signature)
            est = estimate_event(m, args.n, f, log=logfile, **kw)
            out = {"event": str(f), "n": args.n, **est.to_json()}
        else:
            hist = estimate_statistic_histogram(m, args.n, args.statistic, log=logfile, **kw)
            est = hist.summary
            out = {"statistic": args.statistic, "n": args.n, **est.to_json()}
            if est.mixed:
                out["histogram"] = {str(k): v for k, v in hist.frequencies().items()}
            else:
                out["per_start"] = {
                    ("complete" if s else "empty"): float(hist.draws[i].mean())
                    for i, s in enumerate(hist.starts)}
    finally:
        if logfile:
            logfile.close()
    _emit(args, "sample.json", _json(out))
    if not est.mixed:
        print(f"not mixed: split R-hat {est.rhat:.3g} > {args.max_rhat}", file=sys.stderr)
        return EXIT_UNMIXED
    return EXIT_OK


def _params(pairs) -> dict:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise ExperimentError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _experiment(args) -> int:
    if args.action == "list":
        items = list_experiments()
        if args.json:
            print(json.dumps(items, indent=2))
        else:
            for e in items:
                print(f"{e['name']:<16} {e['theorem']:<11} {e['summary']}")
        return EXIT_OK
    names = list(REGISTRY) if args.name == "all" else [args.name]
    params = _params(args.param)
    reports = []
    for name in names:
        spec = ExperimentSpec(name, params if args.name != "all" else {}, args.mode, args.seed,
                              args.threads, args.chains, args.samples, args.burn_in, args.thin,
                              args.max_rhat, args.out)
        rep = run_experiment(spec)
        reports.append(rep)
        for c in rep.checks:
            print(f"[{c.verdict}] {name} (criterion {c.criterion}): {c.name}"
                  + (f" -- {c.detail}" if c.detail else ""))
    criteria: dict[int, str] = {}
    order = {"fail": 0, "not-mixed": 1, "inconclusive": 2, "pass": 3}
    for rep in reports:
        for k, v in rep.verdicts_by_criterion().items():
            if k not in criteria or order[v] < order[criteria[k]]:
                criteria[k] = v
    for k in sorted(criteria):
        print(f"criterion {k}: {criteria[k]}")
    codes = {r.exit_code for r in reports}
    return EXIT_FAIL if EXIT_FAIL in codes else EXIT_UNMIXED if EXIT_UNMIXED in codes else EXIT_OK


COMMANDS = {"parse": _parse, "normalform": _normalform, "exact-dist": _exact_dist,
            "predict-limit": _predict, "event-prob": _event_prob, "tv": _tv,
            "sample": _sample, "experiment": _experiment}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (MlnError, FormulaError, SignatureError, ExperimentError, BudgetExceeded,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
