"""Exact shortest reset words for synchronizing automata."""

from .dfa import (
    AutomatonError,
    Dfa,
    InverseDfa,
    ParseError,
    apply_letter,
    apply_letter_inverse,
    apply_word,
    format_dfa,
    is_synchronizing,
    parse_dfa,
    reduce_reachable,
)
from .experiment import (
    ExperimentRecord,
    ExperimentStats,
    emit_report,
    fit_sqrt_model,
    hoeffding_bound,
    run_batch,
    sink_component_size,
)
from .generators import RngSpec, cerny, random_dfa
from .search import (
    NotSynchronizingError,
    SearchConfig,
    SearchResult,
    shortest_reset_word,
)
from .trie import InsertOutcome, Keep, SubsetTrie, reduce_list_to_antichain

__version__ = "0.1.0"
