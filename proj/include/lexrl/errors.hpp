#pragma once

#include <stdexcept>
#include <string>

namespace lexrl {

/// I/O failure: missing file, unreadable path, unwritable directory.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed binary or text content: bad magic, truncation, trailing bytes.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Recognized container but unsupported format version.
class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Structurally valid content whose dimensions are inconsistent.
class ShapeError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Text parse failure; the message carries file:line context.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lexrl
