from taf_system.alignment.decoding import DecodeMode, viterbi_align
from taf_system.alignment.hmm import hmm_posteriors, train_hmm
from taf_system.alignment.ibm1 import train_ibm1
from taf_system.alignment.model import NULL_TOKEN, AlignmentModel
from taf_system.alignment.needleman_wunsch import NWScoring, needleman_wunsch
from taf_system.alignment.parallel_corpus import AlignmentLinks, ParallelCorpus

__all__ = [
    "NULL_TOKEN",
    "AlignmentLinks",
    "AlignmentModel",
    "DecodeMode",
    "NWScoring",
    "ParallelCorpus",
    "hmm_posteriors",
    "needleman_wunsch",
    "train_hmm",
    "train_ibm1",
    "viterbi_align",
]
