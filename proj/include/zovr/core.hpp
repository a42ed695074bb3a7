#ifndef ZOVR_CORE_HPP
#define ZOVR_CORE_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace zovr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Error taxonomy. Everything derives from a std exception so callers that
// only care about "something went wrong" can catch the standard base.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedDiagnostic : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when the black-box oracle returns a non-finite value.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Seeded random stream. Named substreams are derived from the seed only,
/// never from the current engine state, so drawing from one substream does
/// not perturb another.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream substream(std::string_view name) const;

  std::uint64_t seed() const { return seed_; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n);
  double normal();
  Vector normal_vector(Index d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Ceiling for schedule arithmetic: values within 1e-9 (relative) of an
/// integer round to that integer, so 1728 * 11 / 0.01 stays 1900800.
std::int64_t ceil_count(double value);

}  // namespace zovr

#endif  // ZOVR_CORE_HPP
