#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slicesim {

/// Error categories surfaced by the library. Codes map onto process exit
/// codes at the CLI boundary: everything except kInternal and
/// kPreconditionViolated is a user/config/data problem.
enum class Errc {
  kNotStochastic,
  kReducible,
  kPeriodic,
  kUnknownState,
  kInvalidParams,
  kUnsortedInput,
  kNoSamples,
  kMcsOutOfTable,
  kLengthMismatch,
  kWindowTooShort,
  kInvalidProbability,
  kAllStatesRemoved,
  kDisconnectedRemainder,
  kNoEntryPoint,
  kBadEntryState,
  kPreconditionViolated,
  kMissingModel,
  kConfig,
  kIo,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

  /// True for errors that indicate a broken engine invariant rather than
  /// bad input.
  bool internal() const {
    return code_ == Errc::kInternal || code_ == Errc::kPreconditionViolated;
  }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

// ---------------------------------------------------------------------------
// Deterministic randomness.
//
// All stochastic outputs are keyed by explicit 64-bit seeds. The engine is
// std::mt19937_64, whose output sequence is pinned by the standard, and all
// variate generation goes through inverse-CDF helpers below instead of the
// std distributions (their algorithms are implementation-defined).
// ---------------------------------------------------------------------------

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derive a sub-seed from a base seed and a textual tag (FNV-1a over the tag,
/// then splitmix). Stable across platforms.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return splitmix64(base ^ h);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo is fine here; n is tiny compared to 2^64 so the
    // bias is unobservable, but keep rejection for exactness anyway.
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  /// Sample an index from an (unnormalized is not allowed) probability row
  /// by inverse-CDF walk. Probabilities must sum to ~1.
  int categorical(const std::vector<double>& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    // Numerical leftovers land on the last nonzero entry.
    for (std::size_t i = probs.size(); i-- > 0;) {
      if (probs[i] > 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Small text helpers shared by the CSV readers/writers.
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form of a double; deterministic across
/// platforms for identical bit patterns.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  // Trim trailing CR from files with Windows line endings.
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace slicesim
