"""Constants for quotegraph."""

import json
import re
from logging import Logger, getLogger
from pathlib import Path

LOGGER: Logger = getLogger(__package__)

# Read version from manifest.json
_MANIFEST_PATH = Path(__file__).parent / "manifest.json"
_MANIFEST = json.loads(_MANIFEST_PATH.read_text())
VERSION = _MANIFEST["version"]
CONFIG_VERSION = _MANIFEST["config_version"]

# Tokenizer conventions: opening and closing marks are distinct tokens
OPENING_QUOTE = "\u201c"
CLOSING_QUOTE = "\u201d"

# Preprocessing defaults
DEFAULT_MIN_UNIQUE_WORDS = 5  # l_q
DEFAULT_MIN_SHARED_SUBSTRING = 8  # l_s, in words
PERSON_ENTITY_TYPE = "PERSON"

# Linking defaults
DEFAULT_MIN_GLOBAL_PROBABILITY = 0.0

# PageRank defaults
PAGERANK_DAMPING = 0.85
PAGERANK_TOLERANCE = 1e-10
PAGERANK_MAX_ITER = 200
TOP_CENTRAL_NODES = 10

QID_PATTERN = re.compile(r"^Q\d+$")

# Gender items (P21 values)
GENDER_FEMALE_QID = "Q6581072"
GENDER_MALE_QID = "Q6581097"
GENDER_NON_BINARY_QID = "Q48270"

# Top-level occupations per domain; everything below them in the P279
# hierarchy belongs to the domain
DOMAIN_TOP_LEVEL: dict[str, frozenset[str]] = {
    "art": frozenset({"Q483501", "Q2500638"}),
    "politics": frozenset({"Q82955", "Q185351"}),
    "sport": frozenset({"Q50995749"}),
}

# Countries used for per-country party mixing
PARTY_MIXING_COUNTRIES: dict[str, str] = {
    "USA": "Q30",
    "UK": "Q145",
    "India": "Q668",
}

UNKNOWN_CATEGORY = "unknown"

# Stage files, relative to the output directory
ARTICLES_FILE = "articles.jsonl"
REJECTS_FILE = "rejects.tsv"
CONTEXTS_FILE = "contexts.jsonl"
QUOTES_FILE = "quotes.jsonl"
GROUPS_FILE = "groups.tsv"
ATTRIBUTIONS_FILE = "attributions.tsv"
EDGES_FILE = "edges.tsv"
EDGE_RECORDS_FILE = "edges.jsonl"
PROFILES_FILE = "profiles.jsonl"
NODES_FILE = "nodes.tsv"
METRICS_FILE = "metrics.json"
DISTRIBUTIONS_DIR = "distributions"
REFERENCES_FILE = "references.tsv"
NAMEBIAS_FILE = "namebias.json"
SUMMARY_FILE = "summary.json"

# Stage names, in execution order
STAGES: tuple[str, ...] = (
    "ingest",
    "preprocess",
    "cluster",
    "link",
    "graph",
    "enrich",
    "analyze",
    "namebias",
)
