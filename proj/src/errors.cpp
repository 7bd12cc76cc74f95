#include "pdpca/errors.hpp"

namespace pdpca {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Config: return "config";
    case ErrorKind::Spectrum: return "spectrum";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Stream: return "stream";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error Error::with_context(std::string_view context) const {
  std::string msg(context);
  msg += ": ";
  msg += what();
  return Error(kind_, msg);
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pdpca
