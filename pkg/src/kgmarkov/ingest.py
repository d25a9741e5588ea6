"""Turn observation rows into the activity knowledge graph and back.

Each observed day becomes a bundle of individuals: a trip part containing
an instantaneous observation, the spatiotemporal instant it occupies, that
instant's spatial and temporal projections, and the vessel's occupation of
the track point.  Consecutive trip parts are chained with ``precedes``.
Reading happens through the two bundled queries, not ad hoc traversal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime
from importlib import resources
from typing import Optional, Sequence

from .datagen import ObservationRow
from .errors import ToolkitError
from .query import evaluate, parse_query
from .rdf import Graph, Iri, Literal, Triple, datetime_literal
from .vocab import EX_NS, Vocab

log = logging.getLogger(__name__)

BUNDLED_QUERIES = ("location_by_time", "transitions")

# The transitions query joined with each pair's first timestamp so rows can
# be returned chronologically instead of in serialization order.
_ORDERED_TRANSITIONS_QUERY = """
SELECT ?startLocationOffFishingVessel ?endLocationOffFishingVessel
WHERE {
  ?fishingTripPart1 bfo:precedes ?fishingTripPart2 .
  ?fishingTripPart1 bfo:has_occurrent_part ?beingObserved1 .
  ?beingObserved1 bfo:occupies_spatiotemporal_region ?spatiotemporalInstant1 .
  ?spatiotemporalInstant1 bfo:spatially_projects_onto ?fishingVesselTrackPoint1 .
  ?fishingVesselTrackPoint1 bfo:spatial_part_of ?startLocationOffFishingVessel .
  ?fishingTripPart2 bfo:has_occurrent_part ?beingObserved2 .
  ?beingObserved2 bfo:occupies_spatiotemporal_region ?spatiotemporalInstant2 .
  ?spatiotemporalInstant2 bfo:spatially_projects_onto ?fishingVesselTrackPoint2 .
  ?fishingVesselTrackPoint2 bfo:spatial_part_of ?endLocationOffFishingVessel .
  ?spatiotemporalInstant1 bfo:temporally_projects_onto ?temporalInstant1 .
  ?temporalInstant1 cco:has_datetime_value ?datetime1 .
}
ORDER BY ?datetime1
"""


class IngestError(ToolkitError):
    """Observation rows unsuitable for graph construction."""


def load_bundled_query(name: str) -> str:
    """Read one of the packaged query files by short name or file name."""
    stem = name[:-3] if name.endswith(".rq") else name
    if stem not in BUNDLED_QUERIES:
        raise IngestError(f"no bundled query named {name!r}")
    return resources.files("kgmarkov").joinpath("data", stem + ".rq").read_text()


@dataclass(frozen=True)
class IngestManifest:
    """Naming policy for every individual the ingest step mints."""

    vessel: Iri
    trip: Iri
    namespace: str = EX_NS

    def trip_part(self, day: int) -> Iri:
        return Iri(f"{self.namespace}fishingTripPart_d{day}")

    def observation(self, day: int) -> Iri:
        return Iri(f"{self.namespace}beingObserved_d{day}")

    def st_instant(self, day: int) -> Iri:
        return Iri(f"{self.namespace}stInstant_d{day}")

    def t_instant(self, day: int) -> Iri:
        return Iri(f"{self.namespace}tInstant_d{day}")

    def track_point(self, day: int) -> Iri:
        return Iri(f"{self.namespace}trackPoint_d{day}")

    def location(self, label: str) -> Iri:
        return Iri(f"{self.namespace}{label}")

    def future_trip_part(self, day: int) -> Iri:
        """Trip part for a day that has not happened yet, named without the
        observed-day marker."""
        return Iri(f"{self.namespace}fishingTripPart_{day}")


def default_manifest() -> IngestManifest:
    return IngestManifest(
        vessel=Iri(EX_NS + "fishingVessel"),
        trip=Iri(EX_NS + "fishingTrip"),
    )


def ingest_rows(
    rows: Sequence[ObservationRow],
    manifest: Optional[IngestManifest] = None,
    vocab: Optional[Vocab] = None,
) -> Graph:
    """Build the full activity graph for a sequence of daily observations.

    For n rows over L distinct locations the result holds exactly
    13n + (n - 1) + 3 + L triples.
    """
    if not rows:
        raise IngestError("cannot ingest an empty row sequence")
    for prev, cur in zip(rows, rows[1:]):
        if cur.time <= prev.time:
            raise IngestError(
                f"observation times must strictly increase ({cur.day_label})"
            )
    if manifest is None:
        manifest = default_manifest()
    if vocab is None:
        vocab = Vocab()
    graph = Graph()
    add = graph.insert
    add(Triple(manifest.vessel, vocab.type, vocab.Watercraft))
    add(Triple(manifest.vessel, vocab.participates_in, manifest.trip))
    add(Triple(manifest.trip, vocab.type, vocab.Process))
    for day, row in enumerate(rows, start=1):
        part = manifest.trip_part(day)
        observation = manifest.observation(day)
        st_instant = manifest.st_instant(day)
        t_instant = manifest.t_instant(day)
        track_point = manifest.track_point(day)
        location = manifest.location(row.location)
        add(Triple(part, vocab.type, vocab.Process))
        add(Triple(manifest.trip, vocab.has_occurrent_part, part))
        add(Triple(part, vocab.has_occurrent_part, observation))
        add(Triple(observation, vocab.type, vocab.ProcessBoundary))
        add(Triple(observation, vocab.occupies_spatiotemporal_region, st_instant))
        add(Triple(st_instant, vocab.type, vocab.SpatiotemporalInstant))
        add(Triple(st_instant, vocab.spatially_projects_onto, track_point))
        add(Triple(st_instant, vocab.temporally_projects_onto, t_instant))
        add(Triple(t_instant, vocab.type, vocab.TemporalInstant))
        add(Triple(t_instant, vocab.has_datetime_value, datetime_literal(row.time)))
        add(Triple(track_point, vocab.type, vocab.VehicleTrackPoint))
        add(Triple(track_point, vocab.spatial_part_of, location))
        add(Triple(manifest.vessel, vocab.occupies_spatial_region, track_point))
    for day in range(1, len(rows)):
        add(Triple(manifest.trip_part(day), vocab.precedes, manifest.trip_part(day + 1)))
    for label in sorted({row.location for row in rows}):
        add(Triple(manifest.location(label), vocab.type, vocab.SpatialRegion))
    return graph


def location_sequence(
    graph: Graph, vocab: Optional[Vocab] = None
) -> list[tuple[datetime, Iri]]:
    """All observed (time, location) pairs, chronologically.

    A graph without the expected shape simply yields no rows.
    """
    if vocab is None:
        vocab = Vocab()
    query = parse_query(load_bundled_query("location_by_time"), vocab.prefixes)
    table = evaluate(query, graph)
    log.info("location query returned %d rows", len(table.rows))
    out = []
    for when, where in table.rows:
        assert isinstance(when, Literal) and isinstance(where, Iri)
        out.append((when.to_python(), where))
    return out


def transition_pairs(graph: Graph, vocab: Optional[Vocab] = None) -> list[tuple[Iri, Iri]]:
    """Consecutive (from, to) location pairs in chronological order."""
    if vocab is None:
        vocab = Vocab()
    query = parse_query(_ORDERED_TRANSITIONS_QUERY, vocab.prefixes)
    table = evaluate(query, graph)
    log.info("transition query returned %d rows", len(table.rows))
    return [(start, end) for start, end in table.rows]
