#pragma once

#include <stdexcept>

namespace clonedetect {

/// File could not be opened or read.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File exists but is not a format we decode (or is corrupt).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Block size incompatible with the image or the selected method.
struct InvalidBlockSize : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside its documented domain.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values or a decomposition that cannot proceed.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Forgery recipe that does not fit the target image.
struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace clonedetect
