"""xfb: a desk-scale model extraction / extraction-detection testbed.

A small victim classifier is served behind an HTTP prediction API with a
configurable response granularity (full probability vector, top-k, rounded,
or label only) and an optional query-distribution filter. An extraction
client builds a transfer set by querying the API with an unlabeled pool and
distills a surrogate model from the responses. Detector and experiment
modules measure how well extraction works and how well it can be detected
as the attacker's pool overlaps more or less with the victim's data.
"""

__version__ = "0.1.0"
