"""Materialize estimated transition probabilities back into the graph.

Two target shapes are supported and kept deliberately comparable:

* cco model: each probability becomes a Markov PMICE that is modally_about
  a freshly minted future trip part, so the numbers hang off a process that
  has not happened.
* profile model: the vessel gets a pattern-of-life individual with one
  profile part per transition option; counts, the row total, and the
  division-derived probabilities all attach to those actual-pattern parts,
  and nothing points at a future process.

Counts and totals are stored as integer ICEs so each probability's exact
fraction stays recoverable from the graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ToolkitError
from .ingest import IngestManifest, default_manifest, transition_pairs
from .markov import Distribution, StateSpace, TransitionCounts
from .rdf import (
    Graph,
    Iri,
    Literal,
    Triple,
    decimal_literal,
    integer_literal,
    string_literal,
)
from .vocab import Vocab

MODEL_CCO = "cco"
MODEL_PROFILE = "profile"
MODELS = (MODEL_CCO, MODEL_PROFILE)

_LOCATION_LABEL_RE = re.compile(r"^location([0-9]+)$")
PREDICTED_FLAG = "true"


class WritebackError(ToolkitError):
    """Writeback preconditions not met, or nothing to read back."""


def state_token(label: str) -> str:
    """Short token used inside minted IRIs: locationN collapses to N,
    anything else keeps its identifier characters."""
    m = _LOCATION_LABEL_RE.match(label)
    if m:
        return m.group(1)
    return re.sub(r"[^A-Za-z0-9_]", "_", label)


def _detokenize(token: str) -> str:
    if token.isdigit():
        return "location" + token
    return token


@dataclass(frozen=True)
class ProbabilityAssertion:
    """One written-back probability, with the fraction that produced it."""

    from_state: str
    to_state: str
    count: int
    total: int
    subject_iri: Iri
    pmice_iri: Iri

    def __post_init__(self):
        if self.count < 0:
            raise WritebackError("count must be non-negative")
        if self.total <= 0:
            raise WritebackError("total must be positive")

    @property
    def value(self) -> float:
        return self.count / self.total


def _row_or_error(counts: TransitionCounts, current: str) -> tuple[list[int], int]:
    i = counts.space.index(current)
    row = [int(x) for x in counts.matrix[i]]
    total = sum(row)
    if total == 0:
        raise WritebackError(
            f"no observed transitions leave {current!r}; nothing to normalize"
        )
    return row, total


def writeback_profile_model(
    graph: Graph,
    counts: TransitionCounts,
    current: str,
    day_index: int,
    manifest: Optional[IngestManifest] = None,
    vocab: Optional[Vocab] = None,
    link_realizations: bool = False,
) -> list[ProbabilityAssertion]:
    """Attach the pattern-of-life structure for one from-state.

    Mints the pattern-of-life individual, a profile part and disposition per
    target state, count and total ICEs (counts always, zeros included), and
    a PMICE per nonzero target.  With link_realizations, each historical day
    whose transition matches an option also gains a realizes edge; that adds
    about one triple per observed day, hence the flag.  day_index names the
    day being predicted; profile IRIs do not depend on it, the argument just
    keeps both model calls interchangeable.
    """
    if manifest is None:
        manifest = default_manifest()
    if vocab is None:
        vocab = Vocab()
    row, total = _row_or_error(counts, current)
    s_tok = state_token(current)
    ns = manifest.namespace
    add = graph.insert

    pol = Iri(f"{ns}{manifest.vessel.local_name()}_PoL")
    add(Triple(pol, vocab.type, vocab.PatternOfLife))
    add(Triple(pol, vocab.type, vocab.PatternProcessProfile))
    add(Triple(pol, vocab.occurrent_part_of, manifest.trip))

    total_ice = Iri(f"{ns}total{s_tok}toXTransitions")
    add(Triple(total_ice, vocab.type, vocab.TransitionTotalICE))
    add(Triple(total_ice, vocab.has_integer_value, integer_literal(total)))

    assertions = []
    dispositions: dict[str, Iri] = {}
    for j, to_state in enumerate(counts.space.states):
        j_tok = state_token(to_state)
        part = Iri(f"{ns}{s_tok}to{j_tok}_PoL_Part")
        add(Triple(part, vocab.type, vocab.PatternProcessProfile))
        add(Triple(part, vocab.occurrent_part_of, pol))

        disposition = Iri(f"{ns}{s_tok}to{j_tok}_Disposition")
        add(Triple(disposition, vocab.type, vocab.Disposition))
        add(Triple(disposition, vocab.inheres_in, manifest.vessel))
        dispositions[to_state] = disposition

        count_ice = Iri(f"{ns}{s_tok}to{j_tok}TransitionCount")
        add(Triple(count_ice, vocab.type, vocab.TransitionCountICE))
        add(Triple(count_ice, vocab.is_a_measurement_of, part))
        add(Triple(count_ice, vocab.has_integer_value, integer_literal(row[j])))

        if row[j] > 0:
            pmice = Iri(f"{ns}markovPMICE_{s_tok}to{j_tok}")
            add(Triple(pmice, vocab.type, vocab.MarkovPMICE))
            add(Triple(pmice, vocab.is_a_measurement_of, part))
            add(Triple(pmice, vocab.has_decimal_value, decimal_literal(row[j] / total)))
            assertions.append(
                ProbabilityAssertion(current, to_state, row[j], total, part, pmice)
            )

    if link_realizations:
        current_iri = manifest.location(current)
        for day, (start, end) in enumerate(transition_pairs(graph, vocab), start=1):
            if start == current_iri:
                end_label = end.local_name()
                if end_label in dispositions:
                    # the transition into day+1 happens during that day's part
                    add(Triple(manifest.trip_part(day + 1), vocab.realizes,
                               dispositions[end_label]))
    return assertions


def writeback_cco_model(
    graph: Graph,
    counts: TransitionCounts,
    current: str,
    day_index: int,
    manifest: Optional[IngestManifest] = None,
    vocab: Optional[Vocab] = None,
) -> list[ProbabilityAssertion]:
    """Attach probabilities as PMICEs modally_about a future trip part.

    The future part is minted as day day_index + 1, typed Process, and
    flagged predicted; it carries no datetime and no track point because it
    has not occurred.  PMICE IRIs carry the future day so writebacks for
    different days can coexist.
    """
    if manifest is None:
        manifest = default_manifest()
    if vocab is None:
        vocab = Vocab()
    if day_index < 0:
        raise WritebackError("day_index must be non-negative")
    row, total = _row_or_error(counts, current)
    s_tok = state_token(current)
    ns = manifest.namespace
    add = graph.insert

    future = manifest.future_trip_part(day_index + 1)
    add(Triple(future, vocab.type, vocab.Process))
    add(Triple(future, vocab.predicted, string_literal(PREDICTED_FLAG)))

    assertions = []
    for j, to_state in enumerate(counts.space.states):
        if row[j] == 0:
            continue
        j_tok = state_token(to_state)
        pmice = Iri(f"{ns}markovPMICE_{s_tok}to{j_tok}_d{day_index + 1}")
        add(Triple(pmice, vocab.type, vocab.MarkovPMICE))
        add(Triple(pmice, vocab.modally_about, future))
        add(Triple(pmice, vocab.has_decimal_value, decimal_literal(row[j] / total)))
        assertions.append(
            ProbabilityAssertion(current, to_state, row[j], total, future, pmice)
        )
    return assertions


def _decimal_value(graph: Graph, subject: Iri, vocab: Vocab) -> Optional[float]:
    for t in graph.match(subject, vocab.has_decimal_value, None):
        if isinstance(t.object, Literal):
            return float(t.object.lexical)
    return None


def _known_location_labels(graph: Graph, vocab: Vocab) -> set[str]:
    return {
        t.subject.local_name()
        for t in graph.match(None, vocab.type, vocab.SpatialRegion)
    }


def _read_profile(graph: Graph, current: str, manifest: IngestManifest,
                  vocab: Vocab) -> dict[str, float]:
    s_tok = state_token(current)
    prefix = f"{s_tok}to"
    suffix = "_PoL_Part"
    pol = Iri(f"{manifest.namespace}{manifest.vessel.local_name()}_PoL")
    values: dict[str, float] = {}
    for t in graph.match(None, vocab.occurrent_part_of, pol):
        local = t.subject.local_name()
        if not (local.startswith(prefix) and local.endswith(suffix)):
            continue
        to_state = _detokenize(local[len(prefix):-len(suffix)])
        values[to_state] = 0.0
        for m in graph.match(None, vocab.is_a_measurement_of, t.subject):
            if Triple(m.subject, vocab.type, vocab.MarkovPMICE) not in graph:
                continue
            value = _decimal_value(graph, m.subject, vocab)
            if value is not None:
                values[to_state] = value
    return values


def _read_cco(graph: Graph, current: str, manifest: IngestManifest,
              vocab: Vocab) -> dict[str, float]:
    s_tok = state_token(current)
    prefix = f"markovPMICE_{s_tok}to"
    values: dict[str, float] = {}
    for t in graph.match(None, vocab.predicted, string_literal(PREDICTED_FLAG)):
        for m in graph.match(None, vocab.modally_about, t.subject):
            local = m.subject.local_name()
            if not local.startswith(prefix):
                continue
            token = local[len(prefix):]
            token = re.sub(r"_d[0-9]+$", "", token)
            value = _decimal_value(graph, m.subject, vocab)
            if value is not None:
                values[_detokenize(token)] = value
    if values:
        # zero-count states have no PMICE; restore them from the graph's
        # known locations so the distribution keeps its full support
        for label in _known_location_labels(graph, vocab):
            values.setdefault(label, 0.0)
    return values


def read_probabilities(graph: Graph, current: str, model: str,
                       manifest: Optional[IngestManifest] = None,
                       vocab: Optional[Vocab] = None) -> Distribution:
    """Rebuild the next-state distribution for one from-state by querying
    the PMICE structure a previous writeback left in the graph."""
    if model not in MODELS:
        raise WritebackError(f"unknown model: {model!r}")
    if manifest is None:
        manifest = default_manifest()
    if vocab is None:
        vocab = Vocab()
    if model == MODEL_PROFILE:
        values = _read_profile(graph, current, manifest, vocab)
    else:
        values = _read_cco(graph, current, manifest, vocab)
    if not values:
        raise WritebackError(
            f"no {model} writeback for state {current!r} found in the graph"
        )
    space = StateSpace(tuple(sorted(values)))
    return Distribution(space, [values[s] for s in space.states])
