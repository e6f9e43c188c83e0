#ifndef NGBMP_ERRORS_HPP
#define NGBMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ngbmp {

// Invalid argument values (p outside (0,1), empty trial list, size mismatch, ...).
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A support whose Gram matrix has no usable pivot left.
struct RankDeficientError : std::runtime_error {
  explicit RankDeficientError(const std::string& msg) : std::runtime_error(msg) {}
};

// A measurement matrix column with (numerically) zero energy.
struct ZeroColumnError : std::runtime_error {
  explicit ZeroColumnError(const std::string& msg) : std::runtime_error(msg) {}
};

// Candidate whose Schur complement fell below the skip threshold.
struct NearSingularError : std::runtime_error {
  explicit NearSingularError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation that needs at least one element got none.
struct EmptySetError : std::invalid_argument {
  explicit EmptySetError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Exhaustive enumeration requested on a problem too large to enumerate.
struct TooLargeError : std::invalid_argument {
  explicit TooLargeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Image with an odd width or height handed to the 2x2 wavelet transform.
struct OddDimensionError : std::invalid_argument {
  explicit OddDimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed benchmark configuration (bad JSON, unknown key, missing field).
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// File I/O problems (unreadable path, bad image magic, truncated payload).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ngbmp

#endif  // NGBMP_ERRORS_HPP
