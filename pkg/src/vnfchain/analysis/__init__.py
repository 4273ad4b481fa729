"""Decomposition of the chain into solvable subsystems and its consumers."""
