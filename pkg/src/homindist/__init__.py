"""Homomorphism indistinguishability via partition and bilabelled-graph calculus."""

__version__ = "0.1.0"
