#pragma once

#include <stdexcept>
#include <string>

namespace tomo {

struct TomoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : TomoError { using TomoError::TomoError; };
struct NotHermitian : TomoError { using TomoError::TomoError; };
struct NotUnitTrace : TomoError { using TomoError::TomoError; };
struct NotPositiveSemidefinite : TomoError { using TomoError::TomoError; };
struct OutOfRange : TomoError { using TomoError::TomoError; };
struct DimensionTooLarge : TomoError { using TomoError::TomoError; };
struct SingularGram : TomoError { using TomoError::TomoError; };
struct InsufficientCopies : TomoError { using TomoError::TomoError; };
struct Unsupported : TomoError { using TomoError::TomoError; };
struct ParseError : TomoError { using TomoError::TomoError; };
struct ChecksumMismatch : ParseError { using ParseError::ParseError; };

}  // namespace tomo
