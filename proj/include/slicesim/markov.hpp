#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "slicesim/common.hpp"

namespace slicesim::markov {

/// Tolerance on row sums accepted by TransitionMatrix constructors.
inline constexpr double kRowSumTol = 1e-9;

/// Ordered set of opaque state labels with dense indices.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }

  /// Dense index of a label, or nullopt if unknown.
  std::optional<int> index_of(const std::string& label) const;

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

/// Row-stochastic transition matrix over a StateSpace. Immutable after
/// construction; every constructor validates entry ranges and row sums.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(StateSpace space, std::vector<std::vector<double>> rows);

  const StateSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  double at(std::size_t from, std::size_t to) const { return rows_[from][to]; }

  /// True if the positive-entry digraph is a single strongly connected
  /// component.
  bool irreducible() const;

  std::string to_json() const;
  static TransitionMatrix from_json(const std::string& text);
  void save_json(const std::string& path) const;
  static TransitionMatrix load_json(const std::string& path);

 private:
  StateSpace space_;
  std::vector<std::vector<double>> rows_;
};

struct StationaryDistribution {
  StateSpace space;
  std::vector<double> probs;
};

/// Inputs for the trial-length bounds. Exactly one of h_z / lambda is used
/// per bound; both live here because callers often carry both.
struct SampleSizeParams {
  double epsilon = 0.0;  ///< estimation accuracy, probability units
  double delta = 0.0;    ///< confidence, probability units
  double h_z = 1.0;      ///< worst expected hitting time, slots
  double lambda = 0.0;   ///< second eigenvalue magnitude, in [0,1)
};

/// Unique stationary distribution pi with pi = pi * M.
/// Direct linear solve for |S| <= 2000, power iteration beyond that.
StationaryDistribution stationary_distribution(const TransitionMatrix& m);

/// Sample a trajectory of `length` states starting at `start`; the first
/// element is `start` itself. Reproducible for a fixed seed.
std::vector<std::string> sample_trajectory(const TransitionMatrix& m, const std::string& start,
                                           std::size_t length, std::uint64_t seed);

/// Index-based variant used by the hot paths.
std::vector<int> sample_trajectory_idx(const TransitionMatrix& m, int start, std::size_t length,
                                       std::uint64_t seed);

/// Second-largest eigenvalue modulus. Diagnostic; sized for |S| <= 500.
double spectral_gap_lambda(const TransitionMatrix& m);

/// ceil(H_Z^2 ln(2/delta) / (2 eps^2)) slots.
std::int64_t trial_length_hitting(const SampleSizeParams& p);

/// ceil((1+lambda)/(1-lambda) * ln(2/delta) / (2 eps^2)) slots.
std::int64_t trial_length_spectral(const SampleSizeParams& p);

}  // namespace slicesim::markov
