"""Conformal Yamabe constants of product manifolds.

Closed-form invariants (``invariants``), finite discretizations of compact
manifolds and their products (``discrete``), the Yamabe quotient and the
inequality checkers (``functional``), constrained minimization with bound
sandwiches (``minimize``) and the command-line surface (``cli``).
"""

__version__ = "0.1.0"

# Prefix for every human-facing diagnostic written to stderr
PREFIX = "[yamabe]"
