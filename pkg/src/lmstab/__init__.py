"""Exact computations with Lazarsfeld-Mukai kernel sheaves on projective space.

Submodules: polyring (forms over GF(p) or QQ), linalg, groebner, sheafmodel,
lmsheaf (instance construction) and certify (stability verdicts).
"""
from .errors import (CharDividesDegree, HomogeneityError, InternalInconsistency, LMStabError,
                     ParseError, PreconditionError, RingMismatchError, SamplingError,
                     WitnessUnavailable)
from .polyring import QQ, HPoly, PrimeField, Ring, parse_hpoly

__version__ = "0.1.0"
