class Error(Exception):
    pass


class GraphFormatError(Error, ValueError):
    pass


class DegreeBoundError(Error, ValueError):
    pass


class FamilyError(Error, ValueError):
    pass


class InfeasibleInstanceError(Error, ValueError):
    pass


class VertexRangeError(Error, IndexError):
    pass


class FieldOverflowError(Error, OverflowError):
    pass


class PaddingError(Error, ValueError):
    pass


class ClusterAddressError(Error, IndexError):
    pass


class EmbeddingError(Error):
    pass


class ClusterOverflowError(EmbeddingError):
    pass


class EdgeStretchError(EmbeddingError):
    pass


class BisectorBudgetError(EmbeddingError):
    pass


class CorruptLabelError(Error, ValueError):
    pass


class RankError(Error, ValueError):
    pass


class LabelFileError(Error, ValueError):
    pass
