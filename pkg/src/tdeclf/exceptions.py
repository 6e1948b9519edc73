"""Exception types raised across the package."""


class DatasetError(ValueError):
    """Base class for malformed or unusable datasets."""


class UnequalLengthError(DatasetError):
    pass


class MissingValuesError(DatasetError):
    pass


class EmptyDatasetError(DatasetError):
    pass


class StratificationImpossibleError(DatasetError):
    pass


class InsufficientWindowError(ValueError):
    """Window too short to supply the requested Fourier coefficients."""


class SeriesTooShortError(ValueError):
    pass


class SeriesLengthMismatchError(ValueError):
    pass


class NoLegalParametersError(ValueError):
    pass


class EncodingError(ValueError):
    pass


class SingularKernelError(ValueError):
    pass


class IncompleteMatrixError(ValueError):
    def __init__(self, missing):
        self.missing = list(missing)
        cells = ", ".join(f"{d}/{c}" for d, c in self.missing)
        super().__init__(f"missing result cells: {cells}")
