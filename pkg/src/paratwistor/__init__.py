"""Exact pointwise verification of curvature claims for twistor and
reflector spaces of paraquaternionic Kaehler manifolds and for mixed
3-Sasakian structures on the associated SO(2,1)-bundle."""

__version__ = "0.1.0"
