"""Prefix handling and the fixed vocabulary of classes and properties.

Prefix lookup is case-insensitive because source material for this domain
mixes spellings like ``bfo:`` and ``Bfo:``.  A small alias table folds two
historical spellings onto their canonical terms so queries written either
way resolve to the same IRIs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import ToolkitError
from .rdf import XSD_NS, Iri

BFO_NS = "http://example.org/ontology/bfo/"
CCO_NS = "http://example.org/ontology/cco/"
EX_NS = "http://example.org/data/"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

DEFAULT_NAMESPACES = {
    "bfo": BFO_NS,
    "cco": CCO_NS,
    "ex": EX_NS,
    "rdf": RDF_NS,
    "xsd": XSD_NS,
}

# (prefix, local) spellings folded onto their canonical term
ALIASES = {
    ("cco", "spatial_part_of"): ("bfo", "spatial_part_of"),
    ("bfo", "has_occurent_part"): ("bfo", "has_occurrent_part"),
}

CLASS = "class"
OBJECT_PROPERTY = "object-property"
DATA_PROPERTY = "data-property"
KINDS = (CLASS, OBJECT_PROPERTY, DATA_PROPERTY)


class PrefixError(ToolkitError):
    """A prefixed name used an unknown or malformed prefix."""


class VocabularyError(ToolkitError):
    """The vocabulary table or a manifest file is inconsistent."""


class PrefixTable:
    """Maps prefixes (case-insensitively) to namespace IRIs."""

    def __init__(self, namespaces: Optional[dict[str, str]] = None):
        self._namespaces: dict[str, str] = {}
        source = DEFAULT_NAMESPACES if namespaces is None else namespaces
        for prefix, ns in source.items():
            self.add(prefix, ns)

    def add(self, prefix: str, namespace: str) -> None:
        if not prefix or not prefix.isidentifier():
            raise PrefixError(f"bad prefix: {prefix!r}")
        self._namespaces[prefix.lower()] = namespace

    def namespace(self, prefix: str) -> str:
        try:
            return self._namespaces[prefix.lower()]
        except KeyError:
            raise PrefixError(f"unknown prefix: {prefix!r}") from None

    def namespaces(self) -> dict[str, str]:
        return dict(self._namespaces)

    def resolve(self, prefixed_name: str) -> Iri:
        """Expand ``prefix:local`` to a full IRI, applying alias folding."""
        if ":" not in prefixed_name:
            raise PrefixError(f"not a prefixed name: {prefixed_name!r}")
        prefix, local = prefixed_name.split(":", 1)
        if not local:
            raise PrefixError(f"empty local name in {prefixed_name!r}")
        key = (prefix.lower(), local)
        if key in ALIASES:
            prefix, local = ALIASES[key]
        return Iri(self.namespace(prefix) + local)


@dataclass(frozen=True)
class VocabTerm:
    prefixed_name: str
    iri: Iri
    kind: str
    label: str
    definition: str
    comment: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise VocabularyError(f"unknown term kind: {self.kind!r}")


# prefixed name, kind, label, definition, optional comment
_TERM_ROWS = [
    ("bfo:SpatiotemporalRegion", CLASS, "Spatiotemporal Region",
     "An occurrent that is part of spacetime and has both spatial and temporal extent."),
    ("bfo:SpatialRegion", CLASS, "Spatial Region",
     "A continuant that is a region of space, independent of what occupies it."),
    ("bfo:TemporalRegion", CLASS, "Temporal Region",
     "An occurrent that is a region of time."),
    ("bfo:TemporalInstant", CLASS, "Temporal Instant",
     "A temporal region with no extent; a single point in time."),
    ("bfo:Process", CLASS, "Process",
     "An occurrent that unfolds in time and has at least one material participant."),
    ("bfo:ProcessBoundary", CLASS, "Process Boundary",
     "An instantaneous temporal part of a process, such as a single observation."),
    ("bfo:History", CLASS, "History",
     "The process that is the sum of everything that happens to a material entity."),
    ("bfo:Disposition", CLASS, "Disposition",
     "A realizable entity whose bearer tends to behave a certain way in certain circumstances."),
    ("bfo:SpatiotemporalInstant", CLASS, "Spatiotemporal Instant",
     "A spatiotemporal region that projects onto a single spatial point and a single temporal instant.",
     "Narrower than SpatiotemporalRegion; introduced for point observations."),
    ("cco:ProcessProfile", CLASS, "Process Profile",
     "A part of a process that carries one structural aspect of it, such as its rate or rhythm."),
    ("cco:PatternProcessProfile", CLASS, "Pattern Process Profile",
     "A process profile that carries a repeated pattern exhibited across a process."),
    ("cco:PatternOfLife", CLASS, "Pattern of Life",
     "A pattern process profile over an agent's history summarizing recurring behavior."),
    ("cco:Watercraft", CLASS, "Watercraft",
     "A vehicle designed for travel on or in water."),
    ("cco:VehicleTrackPoint", CLASS, "Vehicle Track Point",
     "A spatial region occupied by a vehicle at the moment of one observation."),
    ("cco:ProbabilityMeasurementICE", CLASS, "Probability Measurement ICE",
     "An information content entity recording a probability value for something."),
    ("cco:MarkovPMICE", CLASS, "Markov Probability Measurement ICE",
     "A probability measurement whose value is a state transition probability estimated from counts."),
    ("cco:TransitionCountICE", CLASS, "Transition Count ICE",
     "An information content entity recording how often one state was followed by another."),
    ("cco:TransitionTotalICE", CLASS, "Transition Total ICE",
     "An information content entity recording how many transitions left a given state."),
    ("rdf:type", OBJECT_PROPERTY, "type",
     "Relates an individual to a class it instantiates."),
    ("bfo:precedes", OBJECT_PROPERTY, "precedes",
     "Relates an occurrent to a later occurrent it comes wholly before."),
    ("bfo:has_occurrent_part", OBJECT_PROPERTY, "has occurrent part",
     "Relates an occurrent to an occurrent that is part of it."),
    ("bfo:occurrent_part_of", OBJECT_PROPERTY, "occurrent part of",
     "Relates an occurrent to an occurrent it is part of; inverse of has occurrent part."),
    ("bfo:has_temporal_part", OBJECT_PROPERTY, "has temporal part",
     "Relates an occurrent to a temporal slice of it."),
    ("bfo:history_of", OBJECT_PROPERTY, "history of",
     "Relates a history to the material entity it is the history of."),
    ("bfo:spatially_projects_onto", OBJECT_PROPERTY, "spatially projects onto",
     "Relates a spatiotemporal region to the spatial region it projects onto."),
    ("bfo:temporally_projects_onto", OBJECT_PROPERTY, "temporally projects onto",
     "Relates a spatiotemporal region to the temporal region it projects onto."),
    ("bfo:participates_in", OBJECT_PROPERTY, "participates in",
     "Relates a continuant to a process it takes part in."),
    ("bfo:inheres_in", OBJECT_PROPERTY, "inheres in",
     "Relates a dependent entity, such as a disposition, to its bearer."),
    ("bfo:realizes", OBJECT_PROPERTY, "realizes",
     "Relates a process to a realizable entity it makes actual."),
    ("bfo:occupies_spatial_region", OBJECT_PROPERTY, "occupies spatial region",
     "Relates a continuant to the spatial region it exactly occupies."),
    ("bfo:occupies_spatiotemporal_region", OBJECT_PROPERTY, "occupies spatiotemporal region",
     "Relates an occurrent to the spatiotemporal region it exactly occupies."),
    ("bfo:spatial_part_of", OBJECT_PROPERTY, "spatial part of",
     "Relates a spatial region to a larger spatial region containing it."),
    ("cco:is_a_measurement_of", OBJECT_PROPERTY, "is a measurement of",
     "Relates an information content entity to the entity it measures."),
    ("cco:modally_about", OBJECT_PROPERTY, "modally about",
     "Relates an information content entity to something possible or predicted rather than actual."),
    ("cco:is_about", OBJECT_PROPERTY, "is about",
     "Relates an information content entity to its subject matter."),
    ("cco:has_datetime_value", DATA_PROPERTY, "has datetime value",
     "Carries the dateTime value of a temporal entity."),
    ("cco:has_decimal_value", DATA_PROPERTY, "has decimal value",
     "Carries the decimal value of a measurement."),
    ("cco:has_integer_value", DATA_PROPERTY, "has integer value",
     "Carries the integer value of a measurement or count."),
    ("ex:predicted", DATA_PROPERTY, "predicted",
     "Marks an individual as predicted rather than observed.",
     "Instance-level flag; kept in the data namespace on purpose."),
]


def build_terms(prefixes: PrefixTable) -> tuple[VocabTerm, ...]:
    terms = []
    for row in _TERM_ROWS:
        name, kind, label, definition = row[0], row[1], row[2], row[3]
        comment = row[4] if len(row) > 4 else ""
        terms.append(VocabTerm(name, prefixes.resolve(name), kind, label, definition, comment))
    return tuple(terms)


class Vocab:
    """The resolved vocabulary, with one attribute handle per term.

    Handles use the term's local name, so ``v.Process`` is the Process
    class IRI and ``v.precedes`` the precedes property IRI.
    """

    def __init__(self, prefixes: Optional[PrefixTable] = None,
                 terms: Optional[Iterable[VocabTerm]] = None):
        self.prefixes = prefixes if prefixes is not None else PrefixTable()
        self.terms = tuple(terms) if terms is not None else build_terms(self.prefixes)
        self._by_name: dict[str, VocabTerm] = {}
        seen_locals: dict[str, str] = {}
        for term in self.terms:
            if term.prefixed_name in self._by_name:
                raise VocabularyError(f"duplicate term: {term.prefixed_name}")
            local = term.prefixed_name.split(":", 1)[1]
            if local in seen_locals:
                raise VocabularyError(
                    f"local name clash: {term.prefixed_name} vs {seen_locals[local]}")
            self._by_name[term.prefixed_name] = term
            seen_locals[local] = term.prefixed_name
            setattr(self, local, term.iri)

    def term(self, prefixed_name: str) -> VocabTerm:
        try:
            return self._by_name[prefixed_name]
        except KeyError:
            raise VocabularyError(f"term not in vocabulary: {prefixed_name}") from None

    def __contains__(self, prefixed_name: str) -> bool:
        return prefixed_name in self._by_name

    def classes(self) -> tuple[VocabTerm, ...]:
        return tuple(t for t in self.terms if t.kind == CLASS)

    def properties(self) -> tuple[VocabTerm, ...]:
        return tuple(t for t in self.terms if t.kind != CLASS)

    def property_iris(self) -> frozenset[Iri]:
        return frozenset(t.iri for t in self.properties())

    def class_iris(self) -> frozenset[Iri]:
        return frozenset(t.iri for t in self.classes())


def required_terms() -> tuple[VocabTerm, ...]:
    """The full term set every conforming graph writer draws from."""
    return Vocab().terms


def dump_manifest(vocab: Vocab) -> str:
    """Serialize prefixes and terms to the tab-separated manifest format."""
    lines = []
    for prefix in sorted(vocab.prefixes.namespaces()):
        lines.append(f"prefix\t{prefix}\t{vocab.prefixes.namespace(prefix)}")
    for term in vocab.terms:
        lines.append(
            "term\t{0.prefixed_name}\t{0.kind}\t{0.label}\t{0.definition}\t{0.comment}".format(term)
        )
    return "\n".join(lines) + "\n"


def load_manifest(text: str) -> Vocab:
    """Parse manifest text back into a Vocab; inverse of dump_manifest."""
    namespaces: dict[str, str] = {}
    rows: list[tuple[str, str, str, str, str]] = []
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "prefix":
            if len(fields) != 3:
                raise VocabularyError(f"line {line_no}: prefix rows need 3 fields")
            if fields[1].lower() in namespaces:
                raise VocabularyError(f"line {line_no}: duplicate prefix {fields[1]!r}")
            namespaces[fields[1]] = fields[2]
        elif fields[0] == "term":
            if len(fields) not in (5, 6):
                raise VocabularyError(f"line {line_no}: term rows need 5 or 6 fields")
            comment = fields[5] if len(fields) == 6 else ""
            rows.append((fields[1], fields[2], fields[3], fields[4], comment))
        else:
            raise VocabularyError(f"line {line_no}: unknown row kind {fields[0]!r}")
    prefixes = PrefixTable(namespaces)
    terms = []
    for name, kind, label, definition, comment in rows:
        try:
            iri = prefixes.resolve(name)
        except PrefixError as exc:
            raise VocabularyError(f"term {name!r}: {exc}") from None
        terms.append(VocabTerm(name, iri, kind, label, definition, comment))
    return Vocab(prefixes, terms)
