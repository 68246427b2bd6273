"""Exact p-adic computations around Coleman maps, Iwasawa measures and Yager modules.

Everything is plain Python integers and Fractions: elements of Z_p and of
its finite extensions are stored modulo an explicit power of p, and every
operation reports how many digits it certifies.
"""

from .precision import PrecisionError, PrecisionProfile
from .scalar import PadicScalar
from .rings import CyclotomicRing, UnramifiedField, Zp, cyclotomic_ring, make_unramified
from .series import PiSeries
from .measures import CharacterSpec, GroupAlgebraMeasure, mellin, mellin_inverse, eval_character
from .coleman import ColemanSeries, coleman_norm, kubota_leopoldt
from .epsilon import WeilCharacter, epsilon_factor, gauss_sum
from .yager import YagerElement, yager_map, reduce_yager
from .amice import CellDistribution2D, MahlerCoeffs2D, mahler_expand

__version__ = "0.1.0"

__all__ = [
    "PrecisionError", "PrecisionProfile", "PadicScalar", "Zp", "CyclotomicRing", "UnramifiedField",
    "cyclotomic_ring", "make_unramified", "PiSeries", "CharacterSpec", "GroupAlgebraMeasure", "mellin",
    "mellin_inverse", "eval_character", "ColemanSeries", "coleman_norm", "kubota_leopoldt",
    "WeilCharacter", "epsilon_factor", "gauss_sum", "YagerElement", "yager_map", "reduce_yager",
    "CellDistribution2D", "MahlerCoeffs2D", "mahler_expand",
]
