"""Workbench for algebras of binary relations on finite structures.

The package evaluates relation-algebra terms over finite structures,
compiles positive-existential three-variable formulas to terms, checks
semantic preservation properties at bounded scale, replays the separation
and sink constructions, synthesizes terms for forward and local operations,
and exposes everything through a command-line interface.
"""

__version__ = "0.1.0"
