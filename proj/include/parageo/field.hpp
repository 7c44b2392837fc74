#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "parageo/chart.hpp"
#include "parageo/expr.hpp"

namespace parageo {

// Tensor field on a chart with `up` contravariant and `down` covariant
// slots. Components are stored flat with contravariant indices first, e.g.
// a (1,1) field stores f^a_b at flat index a*dim + b.
//
// Fields built from expression trees carry exact partials and dual-number
// evaluators automatically; fields built from raw callbacks support
// whatever layers the caller supplies. All state is immutable.
class TensorField {
 public:
  TensorField(std::shared_ptr<const Chart> chart, int up, int down,
              std::vector<ScalarField> comps)
      : chart_(std::move(chart)), up_(up), down_(down), comps_(std::move(comps)) {
    if (static_cast<int>(comps_.size()) != component_count(chart_->dim(), up_, down_)) {
      throw ConfigError("tensor field component count does not match valence");
    }
  }

  static int component_count(int dim, int up, int down) {
    int n = 1;
    for (int k = 0; k < up + down; ++k) n *= dim;
    return n;
  }

  static TensorField from_expressions(std::shared_ptr<const Chart> chart, int up,
                                      int down, std::vector<expr::Expr> trees) {
    const int dim = chart->dim();
    const int count = component_count(dim, up, down);
    if (static_cast<int>(trees.size()) != count) {
      throw ConfigError("tensor field component count does not match valence");
    }
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(count));
    std::vector<expr::Expr> dtrees;
    dtrees.reserve(static_cast<std::size_t>(count * dim));
    for (const expr::Expr& e : trees) {
      ScalarField s;
      s.value = [e, dim](const Eigen::VectorXd& x) {
        return e.eval<double>(std::span<const double>(x.data(), static_cast<std::size_t>(dim)));
      };
      s.dual = [e](std::span<const Dual> xs) { return e.eval<Dual>(xs); };
      s.exact_partials.reserve(static_cast<std::size_t>(dim));
      for (int c = 0; c < dim; ++c) {
        expr::Expr de = e.derivative(c);
        dtrees.push_back(de);
        s.exact_partials.push_back([de, dim](const Eigen::VectorXd& x) {
          return de.eval<double>(
              std::span<const double>(x.data(), static_cast<std::size_t>(dim)));
        });
      }
      comps.push_back(std::move(s));
    }
    TensorField f(std::move(chart), up, down, std::move(comps));
    f.trees_ = std::move(trees);
    f.dtrees_ = std::move(dtrees);
    return f;
  }

  static TensorField zero(std::shared_ptr<const Chart> chart, int up, int down) {
    const int count = component_count(chart->dim(), up, down);
    return from_expressions(std::move(chart), up, down,
                            std::vector<expr::Expr>(static_cast<std::size_t>(count)));
  }

  const std::shared_ptr<const Chart>& chart() const { return chart_; }
  int up() const { return up_; }
  int down() const { return down_; }
  int dim() const { return chart_->dim(); }
  int components() const { return static_cast<int>(comps_.size()); }
  bool has_trees() const { return !trees_.empty(); }
  const expr::Expr& tree(int comp) const {
    if (!has_trees()) throw ConfigError("tensor field has no expression trees");
    return trees_[static_cast<std::size_t>(comp)];
  }

  Eigen::VectorXd value(const Eigen::VectorXd& x) const {
    Eigen::VectorXd v(components());
    for (int k = 0; k < components(); ++k) {
      v[k] = comps_[static_cast<std::size_t>(k)].value(x);
    }
    return v;
  }

  // partials(x)(k, c) = d(component k)/dx_c
  Eigen::MatrixXd partials(const Eigen::VectorXd& x, DerivStrategy strategy) const {
    Eigen::MatrixXd m(components(), dim());
    if (strategy == DerivStrategy::DualForward) {
      // Seed one direction at a time and sweep all components.
      for (int c = 0; c < dim(); ++c) {
        auto xs = dual_seed(x, c);
        for (int k = 0; k < components(); ++k) {
          const ScalarField& s = comps_[static_cast<std::size_t>(k)];
          if (!s.dual) {
            throw ConfigError("dual derivative strategy requested for a field "
                              "without a dual-number evaluator");
          }
          m(k, c) = s.dual(xs).b;
        }
      }
      return m;
    }
    for (int k = 0; k < components(); ++k) {
      for (int c = 0; c < dim(); ++c) {
        m(k, c) = partial_derivative(*chart_, comps_[static_cast<std::size_t>(k)], x,
                                     c, strategy);
      }
    }
    return m;
  }

  // Mixed second partial d2(component k)/dx_c dx_d. Expression-backed
  // fields differentiate symbolically (exact) or with nested duals (dual);
  // otherwise the first-derivative layer is differenced centrally.
  double second_partial(const Eigen::VectorXd& x, int comp, int c, int d,
                        DerivStrategy strategy) const {
    const int dm = dim();
    if (has_trees()) {
      if (strategy == DerivStrategy::ExactClosedForm) {
        expr::Expr dd = dtrees_[static_cast<std::size_t>(comp * dm + c)].derivative(d);
        return dd.eval<double>(
            std::span<const double>(x.data(), static_cast<std::size_t>(dm)));
      }
      if (strategy == DerivStrategy::DualForward) {
        std::vector<Dual2> xs(static_cast<std::size_t>(dm));
        for (int j = 0; j < dm; ++j) {
          xs[static_cast<std::size_t>(j)] =
              Dual2(Dual(x[j], j == c ? 1.0 : 0.0), Dual(j == d ? 1.0 : 0.0, 0.0));
        }
        return trees_[static_cast<std::size_t>(comp)].eval<Dual2>(xs).b.b;
      }
    }
    const ScalarField& s = comps_[static_cast<std::size_t>(comp)];
    RealFn first = [this, &s, c, strategy](const Eigen::VectorXd& y) {
      return partial_derivative(*chart_, s, y, c, strategy);
    };
    return chart_->central_difference(first, x, d);
  }

 private:
  std::shared_ptr<const Chart> chart_;
  int up_;
  int down_;
  std::vector<ScalarField> comps_;
  std::vector<expr::Expr> trees_;   // empty unless expression-backed
  std::vector<expr::Expr> dtrees_;  // comp * dim + c
};

}  // namespace parageo
