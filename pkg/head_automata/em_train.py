"""
Inside-outside training of the constrained single-state transducer model.

The E-step builds the paired chart of score_pair for each corpus pair and
turns hyperedge posteriors into expected event counts; the M-step
renormalizes the counts per (w, v) context and the root counts over the
whole corpus.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .models import STOP, ConstrainedTransducerModel, Event, TransitionEvent, WordPair, epsilon_pair
from .paired_derivation import PairedDerivation
from .symbols import EPSILON, Vocabulary
from .transduce import EpsilonBudget, transduction_chart
from .transducer import Valency

logger = logging.getLogger(__name__)

_VALENCY_PAIRS = [(a, b) for a in (Valency.LEFT, Valency.RIGHT) for b in (Valency.LEFT, Valency.RIGHT)]


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]

    def __post_init__(self):
        for index, (source, target) in enumerate(self.pairs):
            if not source or not target:
                raise ValueError(f"corpus pair {index} has an empty side")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Sequence[str], Sequence[str]]]) -> "ParallelCorpus":
        return cls(tuple((tuple(s), tuple(t)) for s, t in pairs))

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class ExpectedCounts:
    events: Dict[WordPair, Dict[Event, float]] = field(default_factory=dict)
    top: Dict[WordPair, float] = field(default_factory=dict)

    def add_event(self, context: WordPair, event: Event, amount: float) -> None:
        row = self.events.setdefault(context, {})
        row[event] = row.get(event, 0.0) + amount

    def add_top(self, pair: WordPair, amount: float) -> None:
        self.top[pair] = self.top.get(pair, 0.0) + amount

    def update(self, other: "ExpectedCounts") -> None:
        for context, row in other.events.items():
            for event, amount in row.items():
                self.add_event(context, event, amount)
        for pair, amount in other.top.items():
            self.add_top(pair, amount)

    def total(self, context: WordPair) -> float:
        return sum(self.events.get(context, {}).values())


@dataclass
class TrainingRun:
    model: ConstrainedTransducerModel
    log_likelihoods: List[float]
    log: List[dict]


def _admissible_events(head: WordPair, dictionary: Sequence[WordPair]) -> List[Event]:
    w, v = head
    events: List[Event] = [STOP]
    for dw, dv in dictionary:
        if epsilon_pair((dw, dv)):
            continue
        if w == EPSILON and dw != EPSILON:
            continue
        if v == EPSILON and dv != EPSILON:
            continue
        for source_valency, target_valency in _VALENCY_PAIRS:
            if dw == EPSILON and source_valency is not Valency.LEFT:
                continue
            if dv == EPSILON and target_valency is not Valency.LEFT:
                continue
            events.append(TransitionEvent(dw, dv, source_valency, target_valency))
    return events


def uniform_constrained_model(dictionary: Iterable[WordPair], source_vocab: Optional[Vocabulary] = None,
                              target_vocab: Optional[Vocabulary] = None) -> ConstrainedTransducerModel:
    """
    Constrained model with uniform distributions over each context's admissible events.

    Every dictionary pair (w, v) gets stop plus one event per dictionary
    pair (w', v') and valency pair. An ε side only takes the left valency,
    ε-source heads only admit ε-source events and ε-target heads only
    ε-target events. The root distribution is uniform over dictionary pairs
    with both sides non-ε.
    """
    dictionary = tuple(dict.fromkeys((w, v) for w, v in dictionary if not epsilon_pair((w, v))))
    if source_vocab is None:
        source_vocab = Vocabulary.from_symbols(dict.fromkeys(w for w, _ in dictionary),
                                               with_epsilon=any(w == EPSILON for w, _ in dictionary))
    if target_vocab is None:
        target_vocab = Vocabulary.from_symbols(dict.fromkeys(v for _, v in dictionary),
                                               with_epsilon=any(v == EPSILON for _, v in dictionary))
    params = {}
    for head in dictionary:
        events = _admissible_events(head, dictionary)
        params[head] = {event: 1.0 / len(events) for event in events}
    roots = [pair for pair in dictionary if EPSILON not in pair]
    if not roots:
        raise ValueError("the dictionary needs at least one pair with both sides non-empty")
    top = {pair: 1.0 / len(roots) for pair in roots}
    return ConstrainedTransducerModel(source_vocab, target_vocab, dictionary, params, top)


def expected_counts(model: ConstrainedTransducerModel, pair: Tuple[Sequence[str], Sequence[str]],
                    budget: EpsilonBudget = EpsilonBudget()) -> Tuple[ExpectedCounts, Optional[float]]:
    """
    Posterior expected usage of every event over all paired derivations of ``pair``.

    Returns:
        (counts, log inside probability); the counts are empty and the log
        probability is None when the pair is not derivable.
    """
    source, target = pair
    embedded = model.embedding
    graph = transduction_chart(embedded.model, source, target, budget)
    log_z, posteriors = graph.edge_posteriors()
    counts = ExpectedCounts()
    if log_z is None:
        return counts, None
    for edge, posterior in zip(graph.edges, posteriors):
        if posterior == 0.0:
            continue
        label = edge.label
        if label[0] == "top":
            counts.add_top((label[1], label[2]), posterior)
        elif label[0] in ("act", "stop"):
            _, transducer_id, _, index = label
            context, events = embedded.events[transducer_id]
            counts.add_event(context, events[index], posterior)
    return counts, log_z


def derivation_events(model: ConstrainedTransducerModel, derivation: PairedDerivation) -> ExpectedCounts:
    """Event multiset of one paired derivation, as unit counts."""
    embedded = model.embedding
    counts = ExpectedCounts()
    root = derivation.root
    counts.add_top((root.source_label, root.target_label), 1.0)
    for node in root.nodes():
        context, events = embedded.events[node.transducer]
        for index in node.trace:
            counts.add_event(context, events[index], 1.0)
    return counts


def _maximize(model: ConstrainedTransducerModel, counts: ExpectedCounts, delta: float) -> ConstrainedTransducerModel:
    params = {}
    for context, row in model.params.items():
        observed = counts.events.get(context, {})
        total = sum(observed.get(event, 0.0) for event in row) + delta * len(row)
        if total <= 0.0:
            params[context] = dict(row)
            continue
        new_row = {}
        for event in row:
            p = (observed.get(event, 0.0) + delta) / total
            if p > 0.0:
                new_row[event] = p
        params[context] = new_row
    total = sum(counts.top.get(pair, 0.0) for pair in model.top_params) + delta * len(model.top_params)
    if total > 0.0:
        top = {}
        for pair in model.top_params:
            p = (counts.top.get(pair, 0.0) + delta) / total
            if p > 0.0:
                top[pair] = p
    else:
        top = dict(model.top_params)
    return ConstrainedTransducerModel(model.source_vocab, model.target_vocab, model.dictionary, params, top)


def _has_head_pair(model: ConstrainedTransducerModel, source: Sequence[str], target: Sequence[str]) -> bool:
    return any(w in source and v in target for w, v in model.top_params)


def em_train(corpus: ParallelCorpus, dictionary: Iterable[WordPair],
             init: Optional[ConstrainedTransducerModel] = None, iterations: int = 1,
             budget: EpsilonBudget = EpsilonBudget(), delta: float = 0.0, workers: int = 1) -> TrainingRun:
    """
    Train a constrained transducer model with inside-outside EM.

    Args:
        corpus: sentence pairs
        dictionary: admissible (w, v) head pairs
        init: starting model, uniform over admissible events when omitted
        iterations: number of E/M rounds
        budget: ε budget shared with decoding
        delta: add-delta constant over each context's event skeleton
        workers: threads computing per-pair expected counts

    Returns:
        TrainingRun with the final model, the corpus log-likelihood measured
        at the start of each iteration, and one log record per iteration.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be at least 1, got {iterations}")
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    dictionary = tuple(dictionary)
    model = init if init is not None else uniform_constrained_model(dictionary)
    log_likelihoods: List[float] = []
    log: List[dict] = []

    for iteration in range(1, iterations + 1):
        start_time = time.time()
        skipped = []
        eligible = []
        for index, (source, target) in enumerate(corpus.pairs):
            if _has_head_pair(model, source, target):
                eligible.append(index)
            else:
                skipped.append({"index": index, "reason": "no-admissible-head-pair"})

        def e_step(index: int) -> Tuple[ExpectedCounts, Optional[float]]:
            return expected_counts(model, corpus.pairs[index], budget)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(e_step, eligible))
        else:
            results = [e_step(index) for index in eligible]

        totals = ExpectedCounts()
        loglik = 0.0
        for index, (counts, log_z) in zip(eligible, results):
            if log_z is None:
                skipped.append({"index": index, "reason": "zero-inside-mass"})
                continue
            totals.update(counts)
            loglik += log_z
        skipped.sort(key=lambda entry: entry["index"])
        for entry in skipped:
            logger.warning("⚠️ Skipped corpus pair %d: %s", entry["index"], entry["reason"])

        model = _maximize(model, totals, delta)
        log_likelihoods.append(loglik)
        log.append({"iter": iteration, "loglik": loglik, "skipped": skipped})
        logger.info("✅ Iteration %d: log-likelihood %.6f (%d skipped, %.2fs)",
                    iteration, loglik, len(skipped), time.time() - start_time)
    return TrainingRun(model, log_likelihoods, log)
