"""Finite relational structures, restricted classes, and the measures
and extension axioms that drive their asymptotic behaviour, checked at
desk scale."""

__version__ = "0.1.0"
