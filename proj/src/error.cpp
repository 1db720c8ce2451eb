#include "scssim/error.hpp"

namespace scssim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptData: return "CorruptData";
    case ErrorKind::RegionOutOfBounds: return "RegionOutOfBounds";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::DegenerateImage: return "DegenerateImage";
    case ErrorKind::WindowOutOfBounds: return "WindowOutOfBounds";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace scssim
