"""Zero-shot requirements classification.

Embeds requirement sentences and class-label strings with a pluggable
backend, ranks the labels for each requirement by cosine similarity, and
evaluates argmax / top-k predictions against labelled benchmark corpora.
Also ships the supporting machinery for label engineering: label
composition and negation, nearest-term suggestion over a word-vector
lexicon, and inter-rater agreement statistics.
"""

from zslreq.errors import BackendError, DataError, ZslreqError

__all__ = ["ZslreqError", "DataError", "BackendError"]

__version__ = "0.1.0"
