"""Exception hierarchy shared by every pipeline stage."""


class IDSError(Exception):
    """Base class for all data and contract errors raised by dnaids."""


class MissingFile(IDSError, FileNotFoundError):
    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"no such file: {self.path}")


class IoFailure(IDSError, OSError):
    pass


class MalformedLine(IDSError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        self.reason = reason
        msg = f"malformed line {line_no}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


class MalformedSchemaLine(MalformedLine):
    pass


class DuplicateIndex(IDSError):
    def __init__(self, index, line_no):
        self.index = index
        self.line_no = line_no
        super().__init__(f"feature index {index} repeated on line {line_no}")


class WrongFeatureCount(IDSError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"schema declares {n} features, expected 41")


class ArityError(IDSError):
    def __init__(self, line_no, got):
        self.line_no = line_no
        self.got = got
        super().__init__(f"line {line_no}: {got} fields")


class NumericParseError(IDSError):
    def __init__(self, line_no, field_index, token):
        self.line_no = line_no
        self.field_index = field_index
        self.token = token
        super().__init__(f"line {line_no}, field {field_index}: not a finite number: {token!r}")


class UnknownLabel(IDSError):
    def __init__(self, raw):
        self.raw = raw
        super().__init__(f"unknown label {raw!r}")


class EmptyDataset(IDSError):
    pass


class OutOfRange(IDSError):
    def __init__(self, n, length):
        self.n = n
        self.length = length
        super().__init__(f"size {n} outside 0..{length}")


class CapacityExceeded(IDSError):
    def __init__(self, feature, count, capacity):
        self.feature = feature
        self.count = count
        self.capacity = capacity
        super().__init__(f"feature {feature}: {count} categories exceed codebook capacity {capacity}")


class SchemaMismatch(IDSError):
    pass


class LengthMismatch(IDSError):
    def __init__(self, msg, index=None):
        self.index = index
        super().__init__(msg)


class VersionMismatch(IDSError):
    pass


class DuplicateSequenceInClass(IDSError):
    pass


class FingerprintMismatch(IDSError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"encoder fingerprint {got} does not match {expected}")
