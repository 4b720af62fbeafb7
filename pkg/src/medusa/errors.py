"""Exception types raised across the package."""


class MedusaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMedusa(MedusaError):
    def __init__(self, report):
        self.report = report
        super().__init__("invalid medusa:\n" + "\n".join(str(v) for v in report.violations[:20]))


class DuplicatePosition(MedusaError):
    def __init__(self, a, b):
        self.ids = (a, b)
        super().__init__(f"points {a} and {b} share a position")


class UnsupportedDimension(MedusaError):
    pass


class EmptyFrame(MedusaError):
    def __init__(self, t):
        self.time = t
        super().__init__(f"frame at time {t} has no points")


class PositionCollision(MedusaError):
    pass


class InconsistentSupport(MedusaError):
    pass


class UnmappableCell(MedusaError):
    def __init__(self, cell_id, detail=""):
        self.cell_id = cell_id
        super().__init__(f"cell {cell_id} has no image in the ambient medusa {detail}".rstrip())


class IncompatibleInclusion(MedusaError):
    pass


class TooLarge(MedusaError):
    pass


class NegativeMultiplicity(MedusaError):
    pass


class ConfigInvalid(MedusaError):
    pass


class FramesFormatError(MedusaError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")
