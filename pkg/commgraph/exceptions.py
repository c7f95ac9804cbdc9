class CommGraphError(Exception):
    """Base class for every error raised by commgraph"""


class PermutationError(CommGraphError, ValueError):
    """Invalid permutation, or an operation mixing permutation degrees"""


class CycleParseError(PermutationError):
    """Malformed cycle notation"""


class DescriptorParseError(CommGraphError, ValueError):
    """Malformed group descriptor string"""


class CapExceededError(CommGraphError, RuntimeError):
    """A degree, order or enumeration cap was exceeded"""


class SubgroupLimitError(CapExceededError):
    """Subgroup enumeration produced more subgroups than allowed"""


class AmbientMismatchError(CommGraphError, ValueError):
    """Subgroups of different ambient groups were combined"""


class NotASubgroupError(CommGraphError, ValueError):
    """An element or subgroup is not contained where it was required to be"""


class NotNilpotentError(CommGraphError, ValueError):
    """Operation requires a nilpotent group"""


class NotNormalError(CommGraphError, ValueError):
    """Operation requires a normal subgroup"""


class ComponentInvariantError(CommGraphError, RuntimeError):
    """A component violates an invariant such as a constant non-p index part"""


class UnknownVertexError(CommGraphError, KeyError):
    """Vertex id not present in the graph"""


class GraphFormatError(CommGraphError, ValueError):
    """Graph document could not be parsed"""


class AltParameterError(CommGraphError, ValueError):
    """Invalid parameters for an alternating-group component"""


class CacheError(CommGraphError, RuntimeError):
    """Cache file could not be read"""

    def __init__(self, path, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
