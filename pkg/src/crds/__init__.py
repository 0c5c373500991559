"""Exact series tools for nonminimal real hypersurfaces in C^2: Segre ODEs,
jet prolongation, reduction of equivalences to singular ODEs, blow-ups and
resummation of divergent formal solutions."""

__version__ = "0.1.0"
