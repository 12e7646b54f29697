"""livecap: real-time caption condensation for livestream shopping.

Turns a streaming speech transcript into raw captions, 30-second condensed
summaries paced by RSVP, synchronized emoji tags, and an accumulating
structured sales framework, served to an operator UI over a websocket
gateway. Every timed behavior runs on a pluggable clock, so whole sessions
replay deterministically for tests and evaluation.
"""

__version__ = "0.1.0"
