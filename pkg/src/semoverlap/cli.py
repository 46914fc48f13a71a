"""``semoverlap`` command-line entry point.

Subcommands: label, reward, score, analyze, rerank. Exit codes: 0 success,
1 usage error, 2 data error (including partial failure), 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__
from .analysis import EmptyProfileError, alpha_profile, attribution, export_profile
from .config import ConfigError, RunConfig, resolve
from .decoding import BeamCandidate, rerank
from .embeddings import EmbeddingTable, load_embeddings
from .labeling import build_paraphraser_examples, label_corpus_with_pairs
from .metrics import evaluate_corpus
from .overlap import RewardParams, reward
from .textproc import TokenizerConfig, tokenize

log = logging.getLogger("semoverlap")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def _write_jsonl(path: Path, meta: dict, records: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(_dumps({"meta": meta}) + "\n")
        for rec in records:
            f.write(_dumps(rec) + "\n")
            count += 1
    return count


def _read_jsonl(path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)``; raise DataError on malformed lines.

    A leading ``{"meta": ...}`` header line is skipped.
    """
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: malformed JSON ({e})") from None
            if not isinstance(rec, dict):
                raise DataError(f"{path}:{lineno}: expected a JSON object")
            if lineno == 1 and set(rec) == {"meta"}:
                continue
            yield lineno, rec


def _string_list(rec: dict, key: str, where: str) -> list[str]:
    value = rec.get(key)
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise DataError(f"{where}: field {key!r} must be a list of strings")
    return value


def _load_table(cfg: RunConfig) -> EmbeddingTable:
    if not cfg.embeddings:
        raise UsageError("--embeddings is required for this command")
    return load_embeddings(cfg.embeddings, cfg.embeddings_format, cfg.limit, cfg.normalize)


def _meta(cfg: RunConfig, command: str, table: EmbeddingTable | None, stopwords) -> dict:
    extra = {}
    if table is not None:
        extra["embeddings"] = table.describe()
    extra["stopword_count"] = len(stopwords) if stopwords else 0
    return cfg.metadata(command, **extra)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- label -----------------------------------------------------------------

def _corpus_lines(path) -> Iterator[dict | str]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                # passed through so the error lands in the per-pair channel
                yield {"id": None, "_error": f"malformed JSON ({e})"}
                continue
            if isinstance(rec, dict) and set(rec) == {"meta"}:
                continue
            yield rec if isinstance(rec, dict) else {"id": None, "_error": "record is not a JSON object"}


def cmd_label(cfg: RunConfig, corpus_path: str) -> int:
    table = _load_table(cfg)
    stopwords = cfg.load_stopwords()
    out = _out_dir(cfg)
    meta = _meta(cfg, "label", table, stopwords)
    results = list(label_corpus_with_pairs(_corpus_lines(corpus_path), cfg.n, table, stopwords,
                                           cfg.prune, cfg.workers, cfg.tokenizer))
    labels = [lab.to_json() for _, lab, err in results if err is None]
    examples = [ex.to_json() for pair, lab, err in results if err is None
                for ex in build_paraphraser_examples(pair, lab)]
    errors = [err.to_json() for _, _, err in results if err is not None]
    _write_jsonl(out / "labels.jsonl", meta, labels)
    _write_jsonl(out / "examples.jsonl", meta, examples)
    err_path = out / "errors.jsonl"
    if errors:
        _write_jsonl(err_path, meta, errors)
    elif err_path.exists():
        err_path.unlink()
    summary = {"pairs": len(results), "labeled": len(labels), "examples": len(examples), "errors": len(errors)}
    if errors:
        print(_dumps({"status": "partial", **summary, "error_file": str(err_path)}), file=sys.stderr)
        return EXIT_DATA
    log.info("labeled %(labeled)d pairs, %(examples)d examples", summary)
    return EXIT_OK


# -- reward ----------------------------------------------------------------

def _reward_one(req, table, params: RewardParams, stopwords, tok: TokenizerConfig) -> dict:
    if not isinstance(req, dict) or not isinstance(req.get("gold"), str) or not isinstance(req.get("generated"), str):
        raise ValueError('expected an object with string fields "gold" and "generated"')
    return reward(tokenize(req["gold"], tok), tokenize(req["generated"], tok), table, params, stopwords).to_json()


def serve_rewards(lines: Iterable[str], write, table: EmbeddingTable, params: RewardParams,
                  stopwords=None, tok: TokenizerConfig = TokenizerConfig()) -> int:
    """One response line per request line, in order. Returns the error count."""
    errors = 0
    for line in lines:
        try:
            req = json.loads(line)
            if isinstance(req, dict) and "batch" in req:
                if not isinstance(req["batch"], list):
                    raise ValueError('"batch" must be a list')
                resp = {"batch": [_reward_one(r, table, params, stopwords, tok) for r in req["batch"]]}
            else:
                resp = _reward_one(req, table, params, stopwords, tok)
        except ValueError as e:  # JSONDecodeError is a ValueError
            errors += 1
            resp = {"error": str(e)}
        write(_dumps(resp) + "\n")
    return errors


def cmd_reward(cfg: RunConfig) -> int:
    table = _load_table(cfg)
    stopwords = cfg.load_stopwords()
    out = sys.stdout

    def write(s):
        out.write(s)
        out.flush()

    serve_rewards(iter(sys.stdin.readline, ""), write, table, cfg.reward_params, stopwords, cfg.tokenizer)
    return EXIT_OK


# -- score -----------------------------------------------------------------

def _summaries(path, tok) -> list[tuple[str, list]]:
    out = []
    for lineno, rec in _read_jsonl(path):
        pid = rec.get("id")
        if not isinstance(pid, str):
            raise DataError(f"{path}:{lineno}: missing string field 'id'")
        out.append((pid, [tokenize(s, tok) for s in _string_list(rec, "summary", f"{path}:{lineno}")]))
    return out


def cmd_score(cfg: RunConfig, candidates_path: str, references_path: str) -> int:
    table = _load_table(cfg)
    stopwords = cfg.load_stopwords()
    tok = cfg.tokenizer
    report = evaluate_corpus(_summaries(candidates_path, tok), _summaries(references_path, tok),
                             table, stopwords, cfg.workers)
    out = _out_dir(cfg)
    with open(out / "report.json", "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps({"meta": _meta(cfg, "score", table, stopwords), **report.to_json()},
                           indent=1, ensure_ascii=False) + "\n")
    if cfg.csv:
        report.to_csv(out / "report.csv")
    return EXIT_OK


# -- analyze ---------------------------------------------------------------

def cmd_analyze(cfg: RunConfig, summaries_path: str, documents_path: str) -> int:
    table = _load_table(cfg)
    stopwords = cfg.load_stopwords()
    tok = cfg.tokenizer
    docs = {}
    for lineno, rec in _read_jsonl(documents_path):
        pid = rec.get("id")
        if not isinstance(pid, str):
            raise DataError(f"{documents_path}:{lineno}: missing string field 'id'")
        docs[pid] = [tokenize(s, tok) for s in _string_list(rec, "document", f"{documents_path}:{lineno}")]

    summ_lists, doc_lists, attrib, missing = [], [], [], []
    for lineno, rec in _read_jsonl(summaries_path):
        pid = rec.get("id")
        where = f"{summaries_path}:{lineno}"
        if not isinstance(pid, str):
            raise DataError(f"{where}: missing string field 'id'")
        sents = [tokenize(s, tok) for s in _string_list(rec, "summary", where)]
        if pid not in docs:
            missing.append(pid)
            continue
        summ_lists.append(sents)
        doc_lists.append(docs[pid])
        sources = rec.get("sources")
        if sources is not None:
            if not isinstance(sources, list) or len(sources) != len(sents):
                raise DataError(f"{where}: 'sources' must list one source group per summary sentence")
            for j, (gen, group) in enumerate(zip(sents, sources), start=1):
                if not isinstance(group, list) or len(group) != 2 or not all(isinstance(s, str) for s in group):
                    raise DataError(f"{where}: sources[{j}] must be exactly two strings")
                attrib.append((pid, j, gen, [tokenize(s, tok) for s in group]))
    if missing:
        raise DataError(f"summary ids missing from documents: {missing}")

    profile = alpha_profile(summ_lists, doc_lists, cfg.alpha, table, stopwords, cfg.workers)
    out = _out_dir(cfg)
    meta = _meta(cfg, "analyze", table, stopwords)
    export_profile(profile, out / "profile.csv")
    with open(out / "profile.json", "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps({"meta": meta, "profile": profile.to_json()}, indent=1) + "\n")
    if attrib:
        report = attribution(attrib, table, stopwords, cfg.workers)
        _write_jsonl(out / "attribution.jsonl", meta,
                     [r.to_json() for r in report.records] + [report.summary_json()])
    return EXIT_OK


# -- rerank ----------------------------------------------------------------

def _rerank_line(rec: dict, tok: TokenizerConfig) -> dict:
    slots = rec.get("slots")
    if not isinstance(slots, list):
        raise ValueError("field 'slots' must be a list of candidate lists")
    parsed = []
    for s, cands in enumerate(slots):
        if not isinstance(cands, list):
            raise ValueError(f"slot {s} must be a list")
        row = []
        for c in cands:
            if not isinstance(c, dict) or not isinstance(c.get("text"), str) \
                    or not isinstance(c.get("score"), (int, float)) or isinstance(c.get("score"), bool):
                raise ValueError(f"slot {s}: candidates need string 'text' and numeric 'score'")
            row.append(BeamCandidate(tokenize(c["text"], tok), float(c["score"])))
        parsed.append(row)
    return {"id": rec.get("id"), **rerank(parsed).to_json()}


def cmd_rerank(cfg: RunConfig, slots_path: str) -> int:
    tok = cfg.tokenizer
    out = _out_dir(cfg)
    results, errors = [], 0
    for lineno, rec in _read_jsonl(slots_path):
        try:
            results.append(_rerank_line(rec, tok))
        except ValueError as e:
            errors += 1
            results.append({"id": rec.get("id"), "error": f"line {lineno}: {e}"})
    _write_jsonl(out / "rerank.jsonl", _meta(cfg, "rerank", None, None), results)
    if errors:
        print(_dumps({"status": "partial", "lines": len(results), "errors": errors}), file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


# -- wiring ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="TOML config file (default: $SEMOVERLAP_CONFIG)")
    g.add_argument("--embeddings", help="embedding file")
    g.add_argument("--embeddings-format", choices=["text", "binary"])
    g.add_argument("--limit", type=int, help="read at most this many embedding records")
    g.add_argument("--normalize", action="store_true", default=None, help="L2-normalize embedding rows")
    g.add_argument("--stopwords", help="stopword file, 'builtin' (default) or 'none'")
    g.add_argument("--a", type=float, help="reward shape a (default 1)")
    g.add_argument("--b", type=float, help="reward shape b (default 0.5)")
    g.add_argument("--n", type=int, help="sentences extracted per summary sentence (default 1)")
    g.add_argument("--alpha", type=int, help="closest-sentence ranks to profile (default 5)")
    g.add_argument("--workers", type=int, help="worker processes (default 1)")
    g.add_argument("--no-prune", dest="prune", action="store_false", default=None,
                   help="disable lower-bound pruning while labeling")
    g.add_argument("--out", help="output directory (default .)")
    g.add_argument("--csv", action="store_true", default=None, help="also write CSV (score)")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semoverlap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"semoverlap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("label", help="exemplary-extraction labels and paraphraser examples")
    p.add_argument("corpus", help='JSONL {"id", "document": [str], "summary": [str]}')
    _common(p)
    p = sub.add_parser("reward", help="stream rewards: stdin JSONL {gold, generated} -> stdout")
    _common(p)
    p = sub.add_parser("score", help="ROUGE-1/2/L and WMS report")
    p.add_argument("candidates")
    p.add_argument("references")
    _common(p)
    p = sub.add_parser("analyze", help="closest-sentence profile and two-source attribution")
    p.add_argument("summaries")
    p.add_argument("documents")
    _common(p)
    p = sub.add_parser("rerank", help="trigram-avoidance reranking of beam candidates")
    p.add_argument("slots")
    _common(p)
    return parser


_CONFIG_KEYS = ("embeddings", "embeddings_format", "limit", "normalize", "stopwords", "a", "b", "n",
                "alpha", "workers", "prune", "out", "csv")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve({k: getattr(args, k) for k in _CONFIG_KEYS}, args.config)
    except (UsageError, ConfigError) as e:
        print(_dumps({"error": "usage", "message": str(e)}), file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "label":
            return cmd_label(cfg, args.corpus)
        if args.command == "reward":
            return cmd_reward(cfg)
        if args.command == "score":
            return cmd_score(cfg, args.candidates, args.references)
        if args.command == "analyze":
            return cmd_analyze(cfg, args.summaries, args.documents)
        return cmd_rerank(cfg, args.slots)
    except UsageError as e:
        print(_dumps({"error": "usage", "message": str(e)}), file=sys.stderr)
        return EXIT_USAGE
    except (DataError, EmptyProfileError, ValueError, OSError) as e:
        print(_dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(_dumps({"error": "internal", "message": repr(e)}), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
