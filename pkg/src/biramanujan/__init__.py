"""Exact construction and certification of bipartite biregular Ramanujan multigraphs."""

from .builder import BuildState, Candidate, Construction, construct, enumerate_candidates, node_gram_poly
from .enclosure import Interval
from .exact_linalg import RatMatrix, charpoly, gram_charpoly
from .exact_poly import RatPoly, RootBracket, max_root
from .rect_conv import ConvDims, ramanujan_bound, rect_conv
from .verify import SpectralCertificate, certify_ramanujan, check_biregular, lambda2_numeric

__all__ = [
    "BuildState", "Candidate", "Construction", "ConvDims", "Interval", "RatMatrix", "RatPoly", "RootBracket",
    "SpectralCertificate", "certify_ramanujan", "charpoly", "check_biregular", "construct",
    "enumerate_candidates", "gram_charpoly", "lambda2_numeric", "max_root", "node_gram_poly",
    "ramanujan_bound", "rect_conv",
]
