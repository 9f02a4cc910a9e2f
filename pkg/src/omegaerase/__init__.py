"""omegaerase: omega-words with backspace erasers.

Library and CLI for ultimately periodic omega-words, the backspace
(eraser) evaluation, context-free and omega-regular building blocks, and
the layered coded construction with two independent membership routes
(a declarative erasure oracle and explicit pushdown automata) that are
cross-validated against each other.
"""

__version__ = "0.1.0"
