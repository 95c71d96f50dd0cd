#include "slicesim/markov.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

namespace slicesim::markov {

namespace {

constexpr std::size_t kDirectSolveLimit = 2000;

void check_rows(const StateSpace& space, const std::vector<std::vector<double>>& rows) {
  if (rows.size() != space.size()) {
    fail(Errc::kNotStochastic, "transition matrix has " + std::to_string(rows.size()) +
                                   " rows for " + std::to_string(space.size()) + " states");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != space.size()) {
      fail(Errc::kNotStochastic, "row " + std::to_string(i) + " has wrong length");
    }
    double sum = 0.0;
    for (double p : rows[i]) {
      if (!(p >= 0.0) || p > 1.0 + kRowSumTol) {
        fail(Errc::kNotStochastic,
             "entry out of [0,1] in row " + std::to_string(i) + " (" + format_double(p) + ")");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      fail(Errc::kNotStochastic,
           "row " + std::to_string(i) + " sums to " + format_double(sum));
    }
  }
}

}  // namespace

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) fail(Errc::kInvalidParams, "state space must be nonempty");
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto [it, inserted] = index_.emplace(labels_[i], static_cast<int>(i));
    if (!inserted) fail(Errc::kInvalidParams, "duplicate state label '" + labels_[i] + "'");
  }
}

std::optional<int> StateSpace::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TransitionMatrix::TransitionMatrix(StateSpace space, std::vector<std::vector<double>> rows)
    : space_(std::move(space)), rows_(std::move(rows)) {
  check_rows(space_, rows_);
}

bool TransitionMatrix::irreducible() const {
  // Kosaraju on the positive-entry digraph: one forward and one backward
  // reachability sweep from state 0 suffice to detect a single SCC only if
  // the graph is strongly connected, which is exactly the test.
  const std::size_t n = size();
  auto reach = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < n; ++w) {
        double p = transpose ? rows_[w][v] : rows_[v][w];
        if (p > 0.0 && !seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(static_cast<int>(w));
        }
      }
    }
    return count == n;
  };
  return reach(false) && reach(true);
}

std::string TransitionMatrix::to_json() const {
  nlohmann::json j;
  j["states"] = space_.labels();
  j["rows"] = rows_;
  return j.dump(2);
}

TransitionMatrix TransitionMatrix::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kConfig, std::string("bad chain JSON: ") + e.what());
  }
  if (!j.contains("states") || !j.contains("rows")) {
    fail(Errc::kConfig, "chain JSON must contain 'states' and 'rows'");
  }
  std::vector<std::string> labels;
  for (const auto& s : j["states"]) {
    if (s.is_string()) {
      labels.push_back(s.get<std::string>());
    } else {
      labels.push_back(s.dump());  // numeric labels are kept in text form
    }
  }
  auto rows = j["rows"].get<std::vector<std::vector<double>>>();
  return TransitionMatrix(StateSpace(std::move(labels)), std::move(rows));
}

void TransitionMatrix::save_json(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIo, "cannot write " + path);
  out << to_json() << "\n";
}

TransitionMatrix TransitionMatrix::load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

StationaryDistribution stationary_distribution(const TransitionMatrix& m) {
  if (!m.irreducible()) {
    fail(Errc::kReducible, "chain is reducible; stationary distribution not unique");
  }
  const std::size_t n = m.size();
  std::vector<double> probs(n, 0.0);

  if (n == 1) {
    probs[0] = 1.0;
    return {m.space(), probs};
  }

  if (n <= kDirectSolveLimit) {
    // Solve (M^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(j, i);
      }
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= 1.0;
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(j)) = 1.0;
    b(static_cast<Eigen::Index>(n - 1)) = 1.0;
    Eigen::VectorXd pi = a.partialPivLu().solve(b);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = std::max(0.0, pi(static_cast<Eigen::Index>(i)));
      sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return {m.space(), probs};
  }

  // Power iteration fallback for large spaces.
  std::vector<double> cur(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double pi_i = cur[i];
      if (pi_i == 0.0) continue;
      const auto& row = m.row(i);
      for (std::size_t j = 0; j < n; ++j) next[j] += pi_i * row[j];
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - cur[j]));
    cur.swap(next);
    if (diff < 1e-14) break;
  }
  return {m.space(), cur};
}

std::vector<int> sample_trajectory_idx(const TransitionMatrix& m, int start, std::size_t length,
                                       std::uint64_t seed) {
  if (start < 0 || static_cast<std::size_t>(start) >= m.size()) {
    fail(Errc::kUnknownState, "start state index out of range");
  }
  if (length < 1) fail(Errc::kInvalidParams, "trajectory length must be >= 1");
  std::vector<int> out;
  out.reserve(length);
  Rng rng(seed);
  int cur = start;
  out.push_back(cur);
  for (std::size_t t = 1; t < length; ++t) {
    cur = rng.categorical(m.row(static_cast<std::size_t>(cur)));
    out.push_back(cur);
  }
  return out;
}

std::vector<std::string> sample_trajectory(const TransitionMatrix& m, const std::string& start,
                                           std::size_t length, std::uint64_t seed) {
  auto idx = m.space().index_of(start);
  if (!idx) fail(Errc::kUnknownState, "unknown start state '" + start + "'");
  auto path = sample_trajectory_idx(m, *idx, length, seed);
  std::vector<std::string> out;
  out.reserve(path.size());
  for (int i : path) out.push_back(m.space().label(static_cast<std::size_t>(i)));
  return out;
}

double spectral_gap_lambda(const TransitionMatrix& m) {
  if (!m.irreducible()) fail(Errc::kReducible, "spectral gap requires an irreducible chain");
  const std::size_t n = m.size();
  if (n == 1) return 0.0;
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  std::vector<double> mags;
  mags.reserve(n);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    mags.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // mags[0] is the Perron root 1; the second modulus is lambda.
  double lambda = mags[1];
  if (lambda >= 1.0 - 1e-8) {
    fail(Errc::kPeriodic, "second eigenvalue modulus is 1 within tolerance (periodic or reducible)");
  }
  return lambda;
}

namespace {

std::int64_t ceil_bound(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(Errc::kInvalidParams, "degenerate sample-size bound");
  }
  return static_cast<std::int64_t>(std::ceil(value));
}

void check_eps_delta(const SampleSizeParams& p) {
  if (!(p.epsilon > 0.0)) fail(Errc::kInvalidParams, "epsilon must be > 0");
  if (!(p.delta > 0.0) || !(p.delta < 1.0)) fail(Errc::kInvalidParams, "delta must be in (0,1)");
}

}  // namespace

std::int64_t trial_length_hitting(const SampleSizeParams& p) {
  check_eps_delta(p);
  if (!(p.h_z >= 1.0)) fail(Errc::kInvalidParams, "h_z must be >= 1");
  return ceil_bound(p.h_z * p.h_z * std::log(2.0 / p.delta) / (2.0 * p.epsilon * p.epsilon));
}

std::int64_t trial_length_spectral(const SampleSizeParams& p) {
  check_eps_delta(p);
  if (!(p.lambda >= 0.0) || !(p.lambda < 1.0)) fail(Errc::kInvalidParams, "lambda must be in [0,1)");
  return ceil_bound((1.0 + p.lambda) / (1.0 - p.lambda) * std::log(2.0 / p.delta) /
                    (2.0 * p.epsilon * p.epsilon));
}

}  // namespace slicesim::markov
