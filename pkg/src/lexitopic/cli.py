"""Command-line entry point: ``lexitopic <command> ...``.

Commands write machine-readable JSON next to a ``<output>.manifest.json``
run record and print human-readable summaries on stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from ._version import __version__
from .errors import LexitopicError, ParameterError
from .evaluation import evaluate_consistency, format_report, read_aligned_pairs, topic_sharpness
from .inference import DEFAULT_ALPHA, DEFAULT_BURN_IN, DEFAULT_ITERATIONS, infer_corpus, read_documents, write_thetas
from .lexicon import compose_lexicon, load_lexicon, save_lexicon
from .topic_model import load_model, save_model
from .translator import KeepOriginPolicy, TranslationConfig, translate_plain, translate_topic_model
from .voting import parse_voting_spec

CONFIG_ENV = "LEXITOPIC_CONFIG"

log = logging.getLogger("lexitopic")


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def manifest_path(output: Path) -> Path:
    return output.with_name(output.name + ".manifest.json")


def write_manifest(output: Path, command: str, config: dict, inputs: Sequence[Path], seed, started: str) -> None:
    manifest = {
        "tool": "lexitopic",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": {str(p): sha256_of(p) for p in inputs},
        "output": {str(output): sha256_of(output)},
        "started": started,
        "finished": _now(),
    }
    manifest_path(output).write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _split_tags(text: str | None) -> list[str]:
    return [t.strip() for t in (text or "").split(",") if t.strip()]


def _source_arg(text: str):
    tag, sep, path = text.partition("=")
    return (tag, path) if sep and tag and path else text


# --------------------------------------------------------------------------
# lexicon


def cmd_lexicon(args: argparse.Namespace) -> int:
    started = _now()
    sources = [_source_arg(s) for s in args.sources]
    lex = compose_lexicon(
        sources, _split_tags(args.exclude), max_terms=args.max_terms, skip_malformed=args.skip_malformed
    )
    out = Path(args.out)
    save_lexicon(lex, out)
    for tag in sorted(lex.source_counts):
        print(f"{tag}\t{lex.source_counts[tag]}")
    print(f"total\t{len(lex)}")
    inputs = [Path(s[1]) if isinstance(s, tuple) else Path(s) for s in sources]
    config = {"exclude": _split_tags(args.exclude), "max_terms": args.max_terms, "sources": sorted(lex.source_tags)}
    write_manifest(out, "lexicon", config, inputs, None, started)
    return 0


# --------------------------------------------------------------------------
# translate

TRANSLATE_DEFAULTS = {
    "voting": "combsum",
    "n_best": None,
    "threshold": None,
    "epsilon": None,
    "keep_origin": KeepOriginPolicy.NEVER.value,
    "seed": 0,
}


def load_config(path: str | os.PathLike | None) -> dict:
    """Read translation settings from a TOML file.

    Keys may sit at top level or in a ``[translate]`` table:
    ``voting``, ``n_best``, ``threshold``, ``epsilon``, ``keep_origin``, ``seed``.
    """
    if path is None:
        return {}
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib

    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"invalid config {path}: {exc}") from exc
    section = data.get("translate", data)
    unknown = set(section) - set(TRANSLATE_DEFAULTS) - {"translate"}
    if unknown:
        raise ParameterError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return {k: v for k, v in section.items() if k in TRANSLATE_DEFAULTS}


def resolve_translate_settings(args: argparse.Namespace) -> dict:
    config_path = args.config or os.environ.get(CONFIG_ENV)
    settings = dict(TRANSLATE_DEFAULTS)
    settings.update(load_config(config_path))
    for key in TRANSLATE_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def cmd_translate(args: argparse.Namespace) -> int:
    started = _now()
    settings = resolve_translate_settings(args)
    model = load_model(args.model)
    lex = load_lexicon(args.lexicon)
    keep = KeepOriginPolicy.parse(settings["keep_origin"])
    voting = str(settings["voting"]).strip().lower()
    if voting == "plain":
        result = translate_plain(
            model, lex,
            top_n=settings["n_best"],
            keep_origin=keep,
            seed=int(settings["seed"]),
            threshold=settings["threshold"],
            epsilon=settings["epsilon"],
            jobs=args.jobs,
            language_tag=args.language_tag,
        )
    else:
        cfg = TranslationConfig(
            threshold=settings["threshold"],
            n_best=settings["n_best"],
            epsilon=settings["epsilon"],
            keep_origin=keep,
            voting=parse_voting_spec(voting),
        )
        result = translate_topic_model(model, lex, cfg, jobs=args.jobs, language_tag=args.language_tag)

    out = Path(args.out)
    save_model(result.model, out)
    sidecar = out.with_name(out.name + ".provenance.json")
    sidecar.write_text(json.dumps(result.provenance_to_dict(), ensure_ascii=False) + "\n", encoding="utf-8")
    settings["keep_origin"] = keep.value
    write_manifest(out, "translate", settings, [Path(args.model), Path(args.lexicon)], settings["seed"], started)
    print(
        f"translated {result.model.num_topics} topics; "
        f"target vocabulary {len(result.model.vocabulary)} words; epsilon {result.epsilon:.6g}"
    )
    return 0


# --------------------------------------------------------------------------
# evaluate / infer


def cmd_evaluate(args: argparse.Namespace) -> int:
    started = _now()
    model_a = load_model(args.model_a)
    model_b = load_model(args.model_b)
    pairs = list(read_aligned_pairs(args.corpus))
    report = evaluate_consistency(
        model_a, model_b, pairs,
        alpha=args.alpha, iterations=args.iterations, burn_in=args.burn_in, seed=args.seed, jobs=args.jobs,
    )
    out = Path(args.out)
    out.write_text(json.dumps(report.to_dict(), indent=1) + "\n", encoding="utf-8")
    config = {"alpha": args.alpha, "iterations": args.iterations, "burn_in": args.burn_in}
    write_manifest(out, "evaluate", config, [Path(args.model_a), Path(args.model_b), Path(args.corpus)], args.seed, started)
    print(format_report(report, label=Path(args.model_b).stem))
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    started = _now()
    model = load_model(args.model)
    docs = list(read_documents(args.documents))
    thetas = infer_corpus(
        model, docs, alpha=args.alpha, iterations=args.iterations, burn_in=args.burn_in, seed=args.seed, jobs=args.jobs
    )
    out = Path(args.out)
    write_thetas(thetas, out)
    config = {"alpha": args.alpha, "iterations": args.iterations, "burn_in": args.burn_in}
    write_manifest(out, "infer", config, [Path(args.model), Path(args.documents)], args.seed, started)
    print(f"inferred {len(thetas)} documents")
    return 0


# --------------------------------------------------------------------------
# inspect


def grouped_top_words(topic, n: int) -> list[tuple[list[str], float]]:
    """Top ``n`` words, with words of identical score merged into one group."""
    groups: list[tuple[list[str], float]] = []
    for word, score in topic.top(n):
        if groups and groups[-1][1] == score:
            groups[-1][0].append(word)
        else:
            groups.append(([word], score))
    return groups


def cmd_inspect(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    for k, topic in enumerate(model.topics):
        header = f"topic {k}"
        if args.sharpness is not None:
            if len(topic) >= args.sharpness:
                header += f"  m_Top{args.sharpness} = {topic_sharpness(topic, args.sharpness):.5f}"
            else:
                header += f"  m_Top{args.sharpness} = n/a ({len(topic)} words)"
        print(header)
        rank = 1
        for words, score in grouped_top_words(topic, args.top):
            print(f"  {rank:>4}  {', '.join(words)} ({score:.5f})")
            rank += len(words)
    return 0


# --------------------------------------------------------------------------


def _add_inference_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="document-topic prior (default %(default)s)")
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS, help="Gibbs sweeps (default %(default)s)")
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN, help="discarded sweeps (default %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexitopic", description="Translate topic models with a bilingual lexicon.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lexicon", help="compose a lexicon from TSV sources")
    p.add_argument("sources", nargs="+", help="TSV files, optionally as TAG=PATH (tag defaults to file stem)")
    p.add_argument("--exclude", help="comma-separated source tags to leave out")
    p.add_argument("--max-terms", type=_positive_int, default=2)
    p.add_argument("--skip-malformed", action="store_true", help="warn about bad records instead of failing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("translate", help="translate a topic model")
    p.add_argument("model")
    p.add_argument("lexicon")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help=f"TOML settings file (default: ${CONFIG_ENV})")
    p.add_argument("--voting", help="voting spec, e.g. combsum, combsum-top:4, rr:top=2,x=2, or plain")
    p.add_argument("--n-best", dest="n_best", type=_positive_int, help="candidates kept per source word")
    p.add_argument("--threshold", type=float, help="skip source words with probability <= this")
    p.add_argument("--epsilon", type=float, help="fallback score for missing words")
    p.add_argument("--keep-origin", dest="keep_origin", choices=[k.value for k in KeepOriginPolicy])
    p.add_argument("--seed", type=int, help="random seed for the plain baseline")
    p.add_argument("--language-tag", dest="language_tag")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("evaluate", help="compare two models on aligned document pairs")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.add_argument("corpus", help="JSONL of {pair_id, doc_a, doc_b}")
    p.add_argument("--out", required=True)
    _add_inference_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("infer", help="infer document topic distributions")
    p.add_argument("model")
    p.add_argument("documents", help="JSONL of {id, tokens}")
    p.add_argument("--out", required=True)
    _add_inference_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("inspect", help="print top words per topic")
    p.add_argument("model")
    p.add_argument("--top", type=_positive_int, default=10)
    p.add_argument("--sharpness", type=int, metavar="R", help="also print the slope between rank 1 and rank R")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except LexitopicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
