// errors.hpp : exception types shared across the library
#pragma once

#include <stdexcept>

namespace nightfuse {

// Base of everything this library throws on purpose; messages name the
// offending file or field.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FileNotFound : Error { using Error::Error; };
struct MalformedImage : Error { using Error::Error; };
struct ColorInGrayStream : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

struct EmptyDirectory : Error { using Error::Error; };
struct FrameCountMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

struct BadKernel : Error { using Error::Error; };
struct EmptyModel : Error { using Error::Error; };
struct EmptySource : Error { using Error::Error; };

struct RegionOutOfBounds : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace nightfuse
