"""Error taxonomy shared across the package.

Every error raised by the library derives from :class:`DaaError`, so callers
(CLI, service) can map domain failures to exit codes / HTTP statuses in one
place.
"""


class DaaError(Exception):
    pass


# --- audio i/o ---

class UnsupportedFormat(DaaError):
    pass


class CorruptHeader(DaaError):
    pass


class EmptyAudio(DaaError):
    pass


class IoFailure(DaaError):
    pass


class FrequencyOutOfRange(DaaError):
    pass


# --- features ---

class DimensionMismatch(DaaError):
    pass


class BadBandCount(DaaError):
    pass


class SizeTooSmall(DaaError):
    pass


class NegativeMagnitude(DaaError):
    pass


class BandAboveNyquist(DaaError):
    pass


class NyquistExceeded(DaaError):
    pass


class EmptyMatrix(DaaError):
    pass


class UnknownFeature(DaaError):
    pass


# --- metrics ---

class LengthMismatch(DaaError):
    pass


class RateMismatch(DaaError):
    pass


class ZeroReference(DaaError):
    pass


class SingularProjection(DaaError):
    pass


class CountMismatch(DaaError):
    pass


class TooShort(DaaError):
    pass


class ManifestParse(DaaError):
    pass


# --- processors ---

class CatalogParse(DaaError):
    pass


class DuplicateId(DaaError):
    pass


class UnknownTask(DaaError):
    pass


class UnknownProcessor(DaaError):
    pass


class AdapterSpawn(DaaError):
    pass


class AdapterTimeout(DaaError):
    pass


class AdapterProtocol(DaaError):
    pass


class AdapterFailed(DaaError):
    def __init__(self, message, exit_code=None, stderr=""):
        super().__init__(message)
        self.exit_code = exit_code
        self.stderr = stderr


# --- pipeline ---

class ValidationFailed(DaaError):
    def __init__(self, violations):
        super().__init__("; ".join(v["code"] + ": " + v["detail"] for v in violations))
        self.violations = violations


class NoInputs(DaaError):
    pass


class NoSuchResult(DaaError):
    pass


class RatingOutOfRange(DaaError):
    pass


class SchemaVersionUnsupported(DaaError):
    def __init__(self, version):
        super().__init__(f"unsupported pipeline schema_version {version}")
        self.version = version


class Malformed(DaaError):
    pass
