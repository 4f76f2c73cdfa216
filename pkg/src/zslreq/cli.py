"""Command-line surface.

Subcommands: ``run`` (one experiment, report + prediction log),
``configs`` (list built-in label configurations), ``labelgen``
(nearest-term suggestions over a lexicon), ``irr`` (agreement
statistics over a tag file), ``compare`` (merge report CSVs).

Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from statistics import mean

from zslreq import agreement
from zslreq.corpus import TaskKind
from zslreq.embedding import EmbedderSpec, load_lexicon
from zslreq.errors import BackendError, DataError, ZslreqError
from zslreq.experiment import (
    ExperimentSpec,
    compare_runs,
    render_log_csv,
    run_experiment,
)
from zslreq.labelgen import nearest_terms
from zslreq.labelspace import (
    LabelConfig,
    builtin_config,
    builtin_config_ids,
    load_config,
)
from zslreq.metrics import parse_report_csv, render_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


class UsageError(ZslreqError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def parse_task(name: str, scope: str, k: int | None) -> TaskKind:
    """Task selectors: FR_NFR, NFR_BINARY:<class>, NFR_MULTICLASS,
    NFR_MULTILABEL, SECURITY; scope top4|all|project:<NAME>."""
    target = None
    if name.startswith("NFR_BINARY:"):
        name, target = name.split(":", 1)
    try:
        return TaskKind(name=name, target=target, scope=scope, k=k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_backend(value: str) -> EmbedderSpec:
    kind, _, source = value.partition(":")
    if kind == "static" and source:
        return EmbedderSpec.static(source)
    if kind == "remote" and source:
        return EmbedderSpec.remote(source)
    raise UsageError(f"backend must be static:<path> or remote:<url>, got {value!r}")


def resolve_config(value: str) -> LabelConfig:
    if Path(value).is_file() or value.endswith(".json"):
        return load_config(value)
    return builtin_config(value)


def _cmd_run(args) -> int:
    task = parse_task(args.task, args.scope, args.topk)
    if args.topk is not None and task.name != "NFR_MULTILABEL":
        raise UsageError("--topk applies to NFR_MULTILABEL only")
    backend = parse_backend(args.backend)
    config = resolve_config(args.config)
    spec = ExperimentSpec(
        task=task,
        dataset_path=args.dataset,
        config=config,
        backend=backend,
        cache_dir=os.environ.get("ZSLREQ_CACHE_DIR"),
        batch_size=args.batch,
    )
    result = run_experiment(spec)
    report_text = render_report(result.report, args.format)
    if args.format == "csv":
        report_text += f"# excluded,{result.excluded}\n"
    else:
        report_text += f"\nExcluded (no representable tokens): {result.excluded}\n"
    log_text = render_log_csv(result)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report_text, encoding="utf-8")
        log_path = out.with_name(out.stem + ".predictions.csv")
        log_path.write_text(log_text, encoding="utf-8")
        print(f"report: {out}")
        print(f"log: {log_path}")
    else:
        sys.stdout.write(report_text)
    if result.excluded:
        print(f"warning: {result.excluded} item(s) had no representable tokens", file=sys.stderr)
    return EXIT_OK


def _cmd_configs(args) -> int:
    if args.action != "list":
        raise UsageError("configs supports: list")
    for config_id in builtin_config_ids():
        config = builtin_config(config_id)
        classes = ",".join(config.classes)
        print(f"{config_id}\t{config.task}\t{config.strategy}\t{config.variant}\t[{classes}]")
    return EXIT_OK


def _cmd_labelgen(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    for suggestion in nearest_terms(lexicon, args.term, args.top):
        print(f"{suggestion.term}\t{suggestion.similarity:.6f}")
    return EXIT_OK


def _irr_values(tables, stat_fn) -> list[float]:
    return [stat_fn(table) for _, table in sorted(tables.items())]


def _cmd_irr(args) -> int:
    tables = agreement.load_tags(args.tags)
    if args.stat == "breakdown":
        if args.level == "micro":
            parts = [agreement.breakdown(agreement.pooled(tables))]
        else:
            parts = [agreement.breakdown(t) for _, t in sorted(tables.items())]
        perfect = mean(b.perfect for b in parts)
        partial = mean(b.partial for b in parts)
        disagreement = mean(b.disagreement for b in parts)
        print(f"perfect\t{perfect:.4f}")
        print(f"partial\t{partial:.4f}")
        print(f"disagreement\t{disagreement:.4f}")
        return EXIT_OK
    stat_fn = agreement.fleiss_kappa if args.stat == "kappa" else agreement.krippendorff_alpha
    if args.level == "micro":
        value = stat_fn(agreement.pooled(tables))
    else:
        value = mean(_irr_values(tables, stat_fn))
    print(f"{args.stat}\t{value:.4f}\t{agreement.interpret_kappa(value)}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    pairs = []
    for path in args.reports:
        text = Path(path).read_text(encoding="utf-8")
        pairs.append((Path(path).stem, parse_report_csv(text)))
    sys.stdout.write(compare_runs(pairs))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zslreq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one classification experiment")
    run.add_argument("--dataset", required=True, help="corpus CSV path")
    run.add_argument("--task", required=True,
                     help="FR_NFR | NFR_BINARY:<class> | NFR_MULTICLASS | NFR_MULTILABEL | SECURITY")
    run.add_argument("--scope", default="all", help="top4 | all | project:<NAME>")
    run.add_argument("--config", required=True, help="built-in config id or JSON path")
    run.add_argument("--backend", required=True, help="static:<lexicon path> | remote:<base url>")
    run.add_argument("--topk", type=int, default=None, help="top-k cutoff (multi-label tasks)")
    run.add_argument("--out", default=None, help="report path; log lands next to it")
    run.add_argument("--format", choices=("csv", "md"), default="csv")
    run.add_argument("--batch", type=int, default=32, help="remote embedding batch size")
    run.set_defaults(func=_cmd_run)

    configs = sub.add_parser("configs", help="built-in label configurations")
    configs.add_argument("action", choices=("list",))
    configs.set_defaults(func=_cmd_configs)

    labelgen = sub.add_parser("labelgen", help="suggest label terms from a lexicon")
    labelgen.add_argument("--lexicon", required=True)
    labelgen.add_argument("--term", required=True)
    labelgen.add_argument("--top", type=int, default=20)
    labelgen.set_defaults(func=_cmd_labelgen)

    irr = sub.add_parser("irr", help="inter-rater agreement statistics")
    irr.add_argument("--tags", required=True, help="CSV item,annotator,tag[,group]")
    irr.add_argument("--stat", choices=("kappa", "alpha", "breakdown"), default="alpha")
    irr.add_argument("--level", choices=("micro", "macro"), default="micro")
    irr.set_defaults(func=_cmd_irr)

    compare = sub.add_parser("compare", help="merge report CSVs into one table")
    compare.add_argument("reports", nargs="+")
    compare.set_defaults(func=_cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
