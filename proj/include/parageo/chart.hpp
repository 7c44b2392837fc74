#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "parageo/dual.hpp"
#include "parageo/errors.hpp"

namespace parageo {

enum class DerivStrategy {
  ExactClosedForm,
  DualForward,
  CentralDifference,
};

inline const char* to_string(DerivStrategy s) {
  switch (s) {
    case DerivStrategy::ExactClosedForm: return "exact";
    case DerivStrategy::DualForward: return "dual";
    case DerivStrategy::CentralDifference: return "fd";
  }
  return "exact";
}

using RealFn = std::function<double(const Eigen::VectorXd&)>;
using DualFn = std::function<Dual(std::span<const Dual>)>;

// One scalar component function. `value` is mandatory; the other layers are
// optional and unlock the exact and dual derivative strategies.
struct ScalarField {
  RealFn value;
  DualFn dual;
  std::vector<RealFn> exact_partials;  // size dim when present
};

// A coordinate chart: named coordinates on an open box, plus the sampling
// policy used by every numerical check. Immutable after construction, so
// concurrent evaluation needs no locking.
class Chart {
 public:
  Chart(std::string name, std::vector<std::string> coords, Eigen::VectorXd lo,
        Eigen::VectorXd hi, int sample_count = 200, std::uint64_t seed = 1)
      : name_(std::move(name)),
        coords_(std::move(coords)),
        lo_(std::move(lo)),
        hi_(std::move(hi)),
        sample_count_(sample_count),
        seed_(seed) {
    const int d = static_cast<int>(coords_.size());
    if (d == 0) throw ConfigError("chart needs at least one coordinate");
    if (lo_.size() != d || hi_.size() != d) {
      throw ConfigError("chart box does not match coordinate count");
    }
    for (int c = 0; c < d; ++c) {
      if (!(lo_[c] < hi_[c])) {
        throw ConfigError("chart box is empty in coordinate '" + coords_[c] + "'");
      }
    }
    if (sample_count_ < 1) throw ConfigError("sample count must be at least 1");
  }

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const { return coords_; }
  const Eigen::VectorXd& box_lo() const { return lo_; }
  const Eigen::VectorXd& box_hi() const { return hi_; }
  int sample_count() const { return sample_count_; }
  std::uint64_t seed() const { return seed_; }

  Eigen::VectorXd center() const { return 0.5 * (lo_ + hi_); }

  // Deterministic sample set: the box center first, then uniform draws from
  // a fixed-seed mt19937_64 mapped through the 53-bit mantissa ladder.
  std::vector<Eigen::VectorXd> sample_points() const {
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<std::size_t>(sample_count_));
    pts.push_back(center());
    std::mt19937_64 gen(seed_);
    const int d = dim();
    for (int k = 1; k < sample_count_; ++k) {
      Eigen::VectorXd x(d);
      for (int c = 0; c < d; ++c) {
        double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        x[c] = lo_[c] + u * (hi_[c] - lo_[c]);
      }
      pts.push_back(std::move(x));
    }
    return pts;
  }

  bool contains(const Eigen::VectorXd& x) const {
    for (int c = 0; c < dim(); ++c) {
      if (x[c] < lo_[c] || x[c] > hi_[c]) return false;
    }
    return true;
  }

  // Central-difference step: cube root of machine epsilon scaled by the
  // coordinate magnitude, shrunk so the stencil stays inside the box.
  double fd_step(const Eigen::VectorXd& x, int c) const {
    static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    double h = h0 * std::max(1.0, std::abs(x[c]));
    h = std::min(h, hi_[c] - x[c]);
    h = std::min(h, x[c] - lo_[c]);
    if (h < kMinStep) {
      throw ConfigError("finite-difference step underflow at coordinate '" +
                        coords_[static_cast<std::size_t>(c)] +
                        "': point too close to the box boundary");
    }
    return h;
  }

  double central_difference(const RealFn& f, const Eigen::VectorXd& x, int c) const {
    double h = fd_step(x, c);
    Eigen::VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    return (f(xp) - f(xm)) / (2.0 * h);
  }

  static constexpr double kMinStep = 1e-10;

 private:
  std::string name_;
  std::vector<std::string> coords_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  int sample_count_;
  std::uint64_t seed_;
};

inline std::vector<Dual> dual_seed(const Eigen::VectorXd& x, int direction) {
  std::vector<Dual> xs(static_cast<std::size_t>(x.size()));
  for (int j = 0; j < x.size(); ++j) {
    xs[static_cast<std::size_t>(j)] = Dual(x[j], j == direction ? 1.0 : 0.0);
  }
  return xs;
}

// d/dx_c of a scalar field at x, by the requested strategy.
inline double partial_derivative(const Chart& chart, const ScalarField& s,
                                 const Eigen::VectorXd& x, int c,
                                 DerivStrategy strategy) {
  switch (strategy) {
    case DerivStrategy::ExactClosedForm:
      if (s.exact_partials.empty()) {
        throw ConfigError("exact derivative strategy requested for a field "
                          "without closed-form partials");
      }
      return s.exact_partials[static_cast<std::size_t>(c)](x);
    case DerivStrategy::DualForward: {
      if (!s.dual) {
        throw ConfigError("dual derivative strategy requested for a field "
                          "without a dual-number evaluator");
      }
      auto xs = dual_seed(x, c);
      return s.dual(xs).b;
    }
    case DerivStrategy::CentralDifference:
      return chart.central_difference(s.value, x, c);
  }
  return 0.0;
}

}  // namespace parageo
