"""
Command-line surface.

    python main.py <command> [flags]

Exit status is 0 on success, 2 for bad input (malformed files, invalid
flags, a model that fails validation) and 1 for anything else. A sentence
without a parse or a translation is not an error: it gets a record with null
results like every other line.
"""

import argparse
import logging
import sys
import time
from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Any, Callable, Deque, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar

from .accepts import accepts
from .corpus_io import (
    read_dictionary,
    read_parallel_corpus,
    read_sentences,
    read_trees,
    write_lines,
    write_records,
)
from .em_train import ParallelCorpus, em_train
from .errors import INPUT_ERRORS, ImpossibleDerivationError, ModelFormatError
from .estimate_acceptor import Treebank, estimate_acceptor_model
from .model_io import dump_model, load_automata, load_model
from .models import ConstrainedTransducerModel, RelationalAcceptorModel, TransductionModel, WordAcceptor
from .parse_sentence import parse, parse_nbest
from .run_config import SAMPLE_FORMATS, RunConfig, load_run_config
from .sample_derivation import sample_derivations
from .score_derivation import derivation_probability
from .transduce import transduce
from .trees import tree_to_string
from .validate_model import validate_model

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2

# In-flight lines per worker thread
READ_AHEAD = 4

T = TypeVar("T")
U = TypeVar("U")


class _UsageError(Exception):
    pass


def _ordered_map(fn: Callable[[T], U], items: Iterable[T], workers: int) -> Iterator[U]:
    """
    Apply ``fn`` to every item; results come back in input order.

    With several workers at most ``workers * READ_AHEAD`` items are read ahead
    of the result being yielded.
    """
    if workers <= 1:
        for item in items:
            yield fn(item)
        return
    pending: Deque[Future] = deque()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= workers * READ_AHEAD:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def _require(config: RunConfig, *names: str) -> None:
    flags = {"model_path": "--model", "input_path": "--in", "output_path": "--out",
             "dictionary_path": "--dictionary"}
    for name in names:
        if getattr(config, name) is None:
            raise _UsageError(f"{config.command} needs {flags[name]}")


def _load(config: RunConfig, *kinds: type):
    model = load_model(config.model_path, renormalize=config.renormalize)
    if kinds and not isinstance(model, kinds):
        expected = " or ".join(k.__name__ for k in kinds)
        raise ModelFormatError(f"{config.command} needs a {expected}, got a {type(model).__name__}",
                               path=config.model_path, location="kind")
    return model


# Commands


def _validate(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path")
    report = validate_model(_load(config), tolerance=config.tolerance)
    write_records([report.to_json()], config.output_path)
    if report.ok:
        logger.info("✅ %s is well formed", config.model_path)
        return EXIT_OK, 1
    for violation in report.violations:
        logger.warning("⚠️ %s: %s (%s)", violation.location, violation.rule, violation.measured)
    return EXIT_INPUT, 1


def _sample(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path")
    model = _load(config, RelationalAcceptorModel)
    trees = sample_derivations(model, config.seed, config.count, config.bounds.max_depth,
                               max_width=config.bounds.max_width, max_nodes=config.bounds.max_nodes)
    if config.format == "sentences":
        written = write_lines((" ".join(tree_to_string(tree)) for tree in trees), config.output_path)
    else:
        written = write_records((tree.to_json() for tree in trees), config.output_path)
    return EXIT_OK, written


def _score(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path", "input_path")
    model = _load(config, RelationalAcceptorModel)

    def score(tree) -> Dict[str, Any]:
        try:
            return {"cost": derivation_probability(model, tree)}
        except ImpossibleDerivationError as e:
            return {"cost": None, "reason": "impossible-derivation", "parameter": e.parameter}

    records = _ordered_map(score, read_trees(config.input_path), config.workers)
    return EXIT_OK, write_records(records, config.output_path)


def _parse(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path", "input_path")
    model = _load(config, RelationalAcceptorModel)

    def analyse(tokens: Sequence[str]) -> Dict[str, Any]:
        if config.nbest > 1:
            return {"parses": [result.to_json() for result in parse_nbest(model, tokens, config.nbest)]}
        return parse(model, tokens).to_json()

    records = _ordered_map(analyse, read_sentences(config.input_path), config.workers)
    return EXIT_OK, write_records(records, config.output_path)


def _translate(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path", "input_path")
    model = _load(config, TransductionModel, ConstrainedTransducerModel)

    def translate(tokens: Sequence[str]) -> Dict[str, Any]:
        return transduce(model, tokens, config.eps_budget).to_json()

    records = _ordered_map(translate, read_sentences(config.input_path), config.workers)
    return EXIT_OK, write_records(records, config.output_path)


def _accepts(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path", "input_path")
    model = _load(config, WordAcceptor)

    def check(tokens: Sequence[str]) -> Dict[str, Any]:
        cost = accepts(model.acceptor, tokens)
        return {"tokens": list(tokens), "accepted": cost is not None, "cost": cost}

    records = _ordered_map(check, read_sentences(config.input_path, allow_empty=True), config.workers)
    return EXIT_OK, write_records(records, config.output_path)


def _train_acceptor(config: RunConfig) -> Tuple[int, int]:
    _require(config, "model_path", "input_path", "output_path")
    skeletons = load_automata(config.model_path)
    treebank = Treebank.from_trees(read_trees(config.input_path))
    omitted: List[str] = []
    model = estimate_acceptor_model(treebank, skeletons, delta=config.delta, omitted=omitted)
    dump_model(model, config.output_path)
    logger.info("✅ Estimated %d parameters from %d trees (%d rows omitted)",
                model.parameter_count(), len(treebank.trees), len(omitted))
    return EXIT_OK, len(treebank.trees)


def _train_transducer(config: RunConfig) -> Tuple[int, int]:
    _require(config, "input_path", "dictionary_path", "output_path")
    corpus = ParallelCorpus.from_pairs(read_parallel_corpus(config.input_path))
    dictionary = read_dictionary(config.dictionary_path)
    init = _load(config, ConstrainedTransducerModel) if config.model_path else None
    run = em_train(corpus, dictionary, init=init, iterations=config.iterations, budget=config.eps_budget,
                   delta=config.delta, workers=config.workers)
    dump_model(run.model, config.output_path)
    if config.log_path:
        write_records(run.log, config.log_path)
    return EXIT_OK, len(corpus)


COMMANDS: Dict[str, Callable[[RunConfig], Tuple[int, int]]] = {
    "validate": _validate,
    "sample": _sample,
    "score": _score,
    "parse": _parse,
    "translate": _translate,
    "train-acceptor": _train_acceptor,
    "train-transducer": _train_transducer,
    "accepts": _accepts,
}


def run(config: RunConfig) -> int:
    """Execute one configured command and return its exit status."""
    start_time = time.time()
    logger.info("🔄 Running %s", config.command)
    try:
        status, records = COMMANDS[config.command](config)
    except INPUT_ERRORS as e:
        logger.error("❌ %s: %s", config.command, e)
        return EXIT_INPUT
    except (_UsageError, ValueError) as e:
        logger.error("❌ %s: %s", config.command, e)
        return EXIT_INPUT
    except Exception as e:
        logger.exception("❌ %s failed: %s", config.command, e)
        return EXIT_INTERNAL
    logger.info("✅ %s finished: %d records in %.2fs", config.command, records, time.time() - start_time)
    return status


# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run settings file (default: config-structure.json)")
    common.add_argument("--model", dest="model_path", help="model JSON file")
    common.add_argument("--in", dest="input_path", help="input file, one record per line")
    common.add_argument("--out", dest="output_path", help="output file (default: stdout)")
    common.add_argument("--renormalize", action="store_true", default=None,
                        help="rescale every distribution of the model to sum to one")
    common.add_argument("--workers", type=int, help="threads for per-line work")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level")

    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument("--max-depth", type=int)
    bounds.add_argument("--max-width", type=int)
    bounds.add_argument("--max-nodes", type=int)

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--eps-budget", dest="eps_per_head", type=int,
                        help="ε-source transitions allowed per head")
    budget.add_argument("--eps-factor", type=float,
                        help="ε-sourced nodes allowed per source token")

    parser = argparse.ArgumentParser(prog="head-automata",
                                     description="Head acceptors and head transducers: sample, parse, translate, train.")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common], help="check a model file")
    validate.add_argument("--tolerance", type=float)

    sample = commands.add_parser("sample", parents=[common, bounds], help="draw trees from an acceptor model")
    sample.add_argument("--seed", type=int)
    sample.add_argument("--count", type=int)
    sample.add_argument("--format", choices=SAMPLE_FORMATS)

    commands.add_parser("score", parents=[common], help="cost of each tree")
    parse_command = commands.add_parser("parse", parents=[common], help="best parse of each sentence")
    parse_command.add_argument("--nbest", type=int)
    commands.add_parser("translate", parents=[common, budget], help="best translation of each sentence")

    train_acceptor = commands.add_parser("train-acceptor", parents=[common],
                                         help="estimate an acceptor model from a treebank")
    train_acceptor.add_argument("--delta", type=float)

    train_transducer = commands.add_parser("train-transducer", parents=[common, budget],
                                           help="EM training of a constrained transducer model")
    train_transducer.add_argument("--dictionary", dest="dictionary_path")
    train_transducer.add_argument("--iterations", type=int)
    train_transducer.add_argument("--delta", type=float)
    train_transducer.add_argument("--log", dest="log_path", help="training log, one record per iteration")

    commands.add_parser("accepts", parents=[common], help="membership of each string in a head acceptor")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level")}
    try:
        config = load_run_config(args.command, overrides, args.config)
    except ValueError as e:
        logger.error("❌ %s", e)
        return EXIT_INPUT
    return run(config)
