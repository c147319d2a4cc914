"""
On-demand transportation instance generator.

Generates benchmark instances for request-based transportation problems
(DARP, ODBRP and anything else a configuration file can describe) over
real or synthetic street networks, and measures the properties of the
generated instances (size, dynamism, urgency, geographic dispersion,
pairwise similarity).
"""

__version__ = "0.1.0"
