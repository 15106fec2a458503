"""Jordan-Kronecker invariants of Lie-Poisson pencils over prime fields."""

from jkinv.exactla import MERSENNE61, PrimeField, SeededRng, Jet
from jkinv.liealg import LieAlgebra, build_sl, build_semidirect, index_of
from jkinv.pencil import SkewPencil, KroneckerStructure, CanonicalSpec, jk_structure
from jkinv.predict import Prediction, decompose, predicted_invariants, compare

__all__ = [
    "MERSENNE61",
    "PrimeField",
    "SeededRng",
    "Jet",
    "LieAlgebra",
    "build_sl",
    "build_semidirect",
    "index_of",
    "SkewPencil",
    "KroneckerStructure",
    "CanonicalSpec",
    "jk_structure",
    "Prediction",
    "decompose",
    "predicted_invariants",
    "compare",
]
