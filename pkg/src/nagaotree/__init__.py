"""Constructive machinery for non-uniform tree lattices of directly split
Nagao type, at finite truncation: group data, normal-form word calculus,
the associated tree with its level function, horoball combinatorics,
transporter elements, automorphism extension, commensurator probes and the
codistance correspondence.
"""

__version__ = "0.1.0"
