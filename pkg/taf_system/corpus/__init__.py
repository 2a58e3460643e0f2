from taf_system.corpus.bio import BioSequence, bio_chunks, bio_to_tree, chunks_to_tags
from taf_system.corpus.dataset import (
    DatasetFormat,
    DatasetReader,
    Example,
    Provenance,
    Split,
    read_dataset,
    write_dataset,
)
from taf_system.corpus.tokenization_stats import TokenizationStats, tokenization_match_stats

__all__ = [
    "BioSequence",
    "DatasetFormat",
    "DatasetReader",
    "Example",
    "Provenance",
    "Split",
    "TokenizationStats",
    "bio_chunks",
    "bio_to_tree",
    "chunks_to_tags",
    "read_dataset",
    "tokenization_match_stats",
    "write_dataset",
]
