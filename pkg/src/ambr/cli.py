"""Command-line front end: ``ambr run|decode|synth|report``.

Exit codes: 0 success, 1 configuration or schema error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import AmbrError, BudgetExhausted, SchemaError, make_rng
from .algorithms import BudgetTooSmall, doubling_trick
from .harness import (ALGORITHMS, AlgoSpec, ConfigError, ExperimentConfig, IoError,
                      ParseError, budget_for, dump_instances, emit_report,
                      load_instances, read_report, run_algorithm, run_experiment)
from .metrics import UTILITIES, make_oracle
from .synth import planted_corpus


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ambr", description="Budgeted Minimum Bayes-Risk decoding.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment grid and write a report")
    run.add_argument("--config", help="JSON experiment config")
    run.add_argument("--algorithms", type=_csv_list(str))
    run.add_argument("--fractions", type=_csv_list(float))
    run.add_argument("--seeds", type=_csv_list(int))
    run.add_argument("--utility", choices=UTILITIES)
    run.add_argument("--coarse-utility", choices=UTILITIES)
    run.add_argument("--input")
    run.add_argument("--output")
    run.add_argument("--jobs", type=int)

    dec = sub.add_parser("decode", help="pick one candidate per instance")
    dec.add_argument("--input", required=True)
    dec.add_argument("--algorithm", required=True)
    b = dec.add_mutually_exclusive_group()
    b.add_argument("--budget", type=int, help="absolute evaluation budget T")
    b.add_argument("--fraction", type=float, help="budget as a fraction of N(N-1)")
    dec.add_argument("--seed", type=int, default=0)
    dec.add_argument("--utility", default="auto", choices=("auto",) + UTILITIES)
    dec.add_argument("--coarse-utility", choices=UTILITIES)
    dec.add_argument("--cap", type=int, help="doubling: total budget cap")
    dec.add_argument("--r0", type=int, default=1)
    dec.add_argument("--alpha", type=float, default=0.9)
    dec.add_argument("--bootstrap", type=int, default=500)

    syn = sub.add_parser("synth", help="write planted synthetic instances")
    syn.add_argument("--n", type=int, required=True)
    syn.add_argument("--count", type=int, required=True)
    syn.add_argument("--gap", type=float, default=0.1)
    syn.add_argument("--noise", type=float, default=0.1)
    syn.add_argument("--base", type=float, default=0.5)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--output", required=True)

    rep = sub.add_parser("report", help="convert a report between json and csv")
    rep.add_argument("--input", required=True)
    rep.add_argument("--output")
    return p


def _print_summary(report):
    for agg in report.aggregates:
        print(f"{agg['algorithm']:<14} f={agg['fraction']:<9g} "
              f"error={agg['error_rate']:.4f} regret={agg['mean_regret']:.4g} "
              f"evals={agg['mean_evals']:.1f} [{agg['min_evals']}, {agg['max_evals']}]",
              flush=True)


def cmd_run(args) -> int:
    d = {}
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc.msg})") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
    overrides = {"algorithms": args.algorithms, "budget_fractions": args.fractions,
                 "seeds": args.seeds, "utility": args.utility,
                 "coarse_utility": args.coarse_utility, "input_path": args.input,
                 "output_path": args.output, "jobs": args.jobs}
    d.update({k: v for k, v in overrides.items() if v is not None})
    if not d.get("input_path"):
        raise ConfigError("input_path: required (--input)")
    cfg = ExperimentConfig.from_dict(d)
    report = run_experiment(cfg)
    _print_summary(report)
    return 0


def _auto_utility(inst):
    if inst.utility_matrix is not None:
        return "matrix"
    if inst.embeddings is not None:
        return "cosine"
    return "rouge_l"


def cmd_decode(args) -> int:
    if args.algorithm not in ALGORITHMS:
        raise ConfigError(f"algorithm: unknown {args.algorithm!r} (known: {', '.join(ALGORITHMS)})")
    if args.fraction is not None and not 0 < args.fraction <= 1:
        raise ConfigError("fraction: must lie in (0, 1]")
    params = {}
    if args.algorithm == "cbp":
        params = {"r0": args.r0, "alpha": args.alpha, "B": args.bootstrap}
    if args.algorithm == "c2f" and args.coarse_utility is None:
        raise ConfigError("coarse-utility: required for c2f")
    spec = AlgoSpec(args.algorithm, args.algorithm, params)
    for inst in load_instances(args.input):
        full = inst.n * (inst.n - 1)
        if args.budget is not None:
            T = args.budget
        elif args.fraction is not None:
            T = budget_for(args.fraction, inst.n)
        else:
            T = full
        utility = _auto_utility(inst) if args.utility == "auto" else args.utility
        rng = make_rng(args.seed, inst.id)
        if args.algorithm == "doubling":
            cap = args.cap if args.cap is not None else max(T, full)
            if T < 1 or cap < T:
                raise ConfigError("budget: doubling needs 1 <= budget <= cap")
            sel = doubling_trick(inst, make_oracle(inst, utility, budget=cap), T, cap, rng)
        else:
            sel = run_algorithm(spec, inst, T, rng, utility, args.coarse_utility)
        fields = [inst.id, str(sel.chosen), inst.candidates[sel.chosen], str(sel.evals_used)]
        if sel.converged is not None:
            fields.append("converged" if sel.converged else "unconverged")
        print("\t".join(fields), flush=True)
    return 0


def cmd_synth(args) -> int:
    if args.n < 2 or args.count < 1 or args.gap < 0 or args.noise < 0:
        raise ConfigError("synth: need n >= 2, count >= 1, gap >= 0, noise >= 0")
    corpus = planted_corpus(args.count, args.n, args.gap, args.noise, args.seed, args.base)
    dump_instances([inst for inst, _ in corpus], args.output)
    out = Path(args.output)
    labels_path = out.with_name(out.stem + ".labels.json")
    labels = {inst.id: best for inst, best in corpus}
    try:
        labels_path.write_text(json.dumps(labels, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {labels_path}: {exc}") from exc
    print(f"wrote {len(corpus)} instances to {out} and labels to {labels_path}", flush=True)
    return 0


def cmd_report(args) -> int:
    report = read_report(args.input)
    if args.output:
        emit_report(report, args.output)
    _print_summary(report)
    return 0


COMMANDS = {"run": cmd_run, "decode": cmd_decode, "synth": cmd_synth, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except IoError as exc:
        print(f"ambr: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ParseError, SchemaError, BudgetExhausted, BudgetTooSmall,
            AmbrError) as exc:
        print(f"ambr: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
