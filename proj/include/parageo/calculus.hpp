#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "parageo/field.hpp"

namespace parageo {

// Pointwise tensor calculus. Derivative stacks use one fixed layout:
//   dT[c] holds the partial along coordinate c of every component,
// shaped like the tensor itself (matrix for two slots, vector for one).
// Christoffel symbols are Gamma[a](b, c) = Gamma^a_{bc}; covariant
// derivatives of (1,1) fields are NF[c](m, b) = (grad_c T)^m_b.

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatStack = std::vector<Mat>;   // indexed by derivative direction
using VecStack = std::vector<Vec>;

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// residual scaled by max(1, |lhs|, |rhs|); keeps small and large structures
// comparable under one tolerance.
inline double scaled_residual(double raw, double lhs_mag, double rhs_mag) {
  return raw / std::max({1.0, lhs_mag, rhs_mag});
}

namespace pointwise {

// [X, Y]^m = X^d dY(m,d) - Y^d dX(m,d), with dX(m,c) = d_c X^m.
inline Vec bracket(const Vec& X, const Mat& dX, const Vec& Y, const Mat& dY) {
  return dY * X - dX * Y;
}

// Lie derivative of a (1,1) tensor along X.
inline Mat lie_11(const Vec& X, const Mat& dX, const Mat& T, const MatStack& dT) {
  const int d = static_cast<int>(X.size());
  Mat out = Mat::Zero(d, d);
  for (int c = 0; c < d; ++c) out += X[c] * dT[static_cast<std::size_t>(c)];
  out += -dX * T + T * dX;
  return out;
}

// Lie derivative of a 1-form along X. dw[c][b] = d_c w_b.
inline Vec lie_01(const Vec& X, const Mat& dX, const Vec& w, const VecStack& dw) {
  const int d = static_cast<int>(X.size());
  Vec out = Vec::Zero(d);
  for (int c = 0; c < d; ++c) out += X[c] * dw[static_cast<std::size_t>(c)];
  out += dX.transpose() * w;
  return out;
}

// Lie derivative of a (0,2) tensor along X.
inline Mat lie_02(const Vec& X, const Mat& dX, const Mat& S, const MatStack& dS) {
  const int d = static_cast<int>(X.size());
  Mat out = Mat::Zero(d, d);
  for (int c = 0; c < d; ++c) out += X[c] * dS[static_cast<std::size_t>(c)];
  out += dX.transpose() * S + S * dX;
  return out;
}

// Exterior derivative of a 1-form w with the 1/(k+1) normalization:
// (dw)_{ab} = (d_a w_b - d_b w_a) / 2.  dw[c](b) = d_c w_b.
inline Mat ext_d1(const VecStack& dw) {
  const int d = static_cast<int>(dw.size());
  Mat out(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      out(a, b) = 0.5 * (dw[static_cast<std::size_t>(a)][b] -
                         dw[static_cast<std::size_t>(b)][a]);
    }
  }
  return out;
}

// Exterior derivative of a 2-form S:
// (dS)_{abc} = (d_a S_{bc} + d_b S_{ca} + d_c S_{ab}) / 3.
// Returned as out[a](b, c).
inline MatStack ext_d2(const MatStack& dS) {
  const int d = static_cast<int>(dS.size());
  MatStack out(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        out[static_cast<std::size_t>(a)](b, c) =
            (dS[static_cast<std::size_t>(a)](b, c) +
             dS[static_cast<std::size_t>(b)](c, a) +
             dS[static_cast<std::size_t>(c)](a, b)) /
            3.0;
      }
    }
  }
  return out;
}

// Gamma^a_{bc} = g^{ad} (d_b g_{dc} + d_c g_{db} - d_d g_{bc}) / 2
inline MatStack christoffel(const Mat& Ginv, const MatStack& dG) {
  const int d = static_cast<int>(dG.size());
  MatStack Gamma(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        double sum = 0.0;
        for (int e = 0; e < d; ++e) {
          sum += Ginv(a, e) * (dG[static_cast<std::size_t>(b)](e, c) +
                               dG[static_cast<std::size_t>(c)](e, b) -
                               dG[static_cast<std::size_t>(e)](b, c));
        }
        Gamma[static_cast<std::size_t>(a)](b, c) = 0.5 * sum;
      }
    }
  }
  return Gamma;
}

// d_e Gamma^a_{bc}, from first and second metric partials.
// ddG(e, b) must return the matrix of d_e d_b g components.
inline std::vector<MatStack> christoffel_derivative(
    const Mat& Ginv, const MatStack& dG,
    const std::function<Mat(int, int)>& ddG) {
  const int d = static_cast<int>(dG.size());
  std::vector<MatStack> out(static_cast<std::size_t>(d),
                            MatStack(static_cast<std::size_t>(d), Mat::Zero(d, d)));
  std::vector<Mat> ddGe(static_cast<std::size_t>(d));
  for (int e = 0; e < d; ++e) {
    // d_e g^{-1} = -g^{-1} (d_e g) g^{-1}
    Mat dGinv = -Ginv * dG[static_cast<std::size_t>(e)] * Ginv;
    for (int b = 0; b < d; ++b) ddGe[static_cast<std::size_t>(b)] = ddG(e, b);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int c = 0; c < d; ++c) {
          double s1 = 0.0, s2 = 0.0;
          for (int m = 0; m < d; ++m) {
            s1 += dGinv(a, m) * (dG[static_cast<std::size_t>(b)](m, c) +
                                 dG[static_cast<std::size_t>(c)](m, b) -
                                 dG[static_cast<std::size_t>(m)](b, c));
            s2 += Ginv(a, m) * (ddGe[static_cast<std::size_t>(b)](m, c) +
                                ddGe[static_cast<std::size_t>(c)](m, b) -
                                ddGe[static_cast<std::size_t>(m)](b, c));
          }
          out[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)](b, c) =
              0.5 * (s1 + s2);
        }
      }
    }
  }
  return out;
}

// (grad_c f)^m_b for a (1,1) tensor.
inline MatStack nabla_11(const Mat& F, const MatStack& dF, const MatStack& Gamma) {
  const int d = static_cast<int>(dF.size());
  MatStack NF(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int c = 0; c < d; ++c) {
    Mat term = dF[static_cast<std::size_t>(c)];
    for (int m = 0; m < d; ++m) {
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int e = 0; e < d; ++e) {
          s += Gamma[static_cast<std::size_t>(m)](c, e) * F(e, b) -
               Gamma[static_cast<std::size_t>(e)](c, b) * F(m, e);
        }
        term(m, b) += s;
      }
    }
    NF[static_cast<std::size_t>(c)] = term;
  }
  return NF;
}

// (grad_c X)^m for a vector field; returns NV(m, c).
inline Mat nabla_10(const Vec& X, const Mat& dX, const MatStack& Gamma) {
  const int d = static_cast<int>(X.size());
  Mat NV = dX;
  for (int c = 0; c < d; ++c) {
    for (int m = 0; m < d; ++m) {
      double s = 0.0;
      for (int e = 0; e < d; ++e) s += Gamma[static_cast<std::size_t>(m)](c, e) * X[e];
      NV(m, c) += s;
    }
  }
  return NV;
}

// (grad_c w)_b for a 1-form; returns NW(b, c).
inline Mat nabla_01(const Vec& w, const VecStack& dw, const MatStack& Gamma) {
  const int d = static_cast<int>(w.size());
  Mat NW(d, d);
  for (int c = 0; c < d; ++c) {
    for (int b = 0; b < d; ++b) {
      double s = dw[static_cast<std::size_t>(c)][b];
      for (int e = 0; e < d; ++e) s -= Gamma[static_cast<std::size_t>(e)](c, b) * w[e];
      NW(b, c) = s;
    }
  }
  return NW;
}

// (grad_c S)_{ab} for a (0,2) tensor; returns NS[c](a, b).
inline MatStack nabla_02(const Mat& S, const MatStack& dS, const MatStack& Gamma) {
  const int d = static_cast<int>(dS.size());
  MatStack NS(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int c = 0; c < d; ++c) {
    Mat term = dS[static_cast<std::size_t>(c)];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int e = 0; e < d; ++e) {
          s += Gamma[static_cast<std::size_t>(e)](c, a) * S(e, b) +
               Gamma[static_cast<std::size_t>(e)](c, b) * S(a, e);
        }
        term(a, b) -= s;
      }
    }
    NS[static_cast<std::size_t>(c)] = term;
  }
  return NS;
}

// Nijenhuis torsion of a (1,1) tensor on coordinate fields:
// [f,f]^m_{ab} = f^d_a d_d f^m_b - f^d_b d_d f^m_a - f^m_d (d_a f^d_b - d_b f^d_a)
// Returned as NN[m](a, b).
inline MatStack nijenhuis_coordinate(const Mat& F, const MatStack& dF) {
  const int d = F.rows();
  MatStack NN(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int m = 0; m < d; ++m) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int e = 0; e < d; ++e) {
          s += F(e, a) * dF[static_cast<std::size_t>(e)](m, b) -
               F(e, b) * dF[static_cast<std::size_t>(e)](m, a) -
               F(m, e) * (dF[static_cast<std::size_t>(a)](e, b) -
                          dF[static_cast<std::size_t>(b)](e, a));
        }
        NN[static_cast<std::size_t>(m)](a, b) = s;
      }
    }
  }
  return NN;
}

// Same torsion through the Levi-Civita connection:
// [f,f](X,Y) = (grad_{fX} f)Y - (grad_{fY} f)X - f((grad_X f)Y) + f((grad_Y f)X)
inline MatStack nijenhuis_connection(const Mat& F, const MatStack& NF) {
  const int d = F.rows();
  MatStack NN(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Vec v = Vec::Zero(d);
      for (int c = 0; c < d; ++c) {
        v += F(c, a) * NF[static_cast<std::size_t>(c)].col(b) -
             F(c, b) * NF[static_cast<std::size_t>(c)].col(a);
      }
      v -= F * NF[static_cast<std::size_t>(a)].col(b);
      v += F * NF[static_cast<std::size_t>(b)].col(a);
      for (int m = 0; m < d; ++m) NN[static_cast<std::size_t>(m)](a, b) = v[m];
    }
  }
  return NN;
}

// R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
//           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
// Returned as R[a][b](c, d).
inline std::vector<MatStack> riemann(const MatStack& Gamma,
                                     const std::vector<MatStack>& dGamma) {
  const int d = static_cast<int>(Gamma.size());
  std::vector<MatStack> R(static_cast<std::size_t>(d),
                          MatStack(static_cast<std::size_t>(d), Mat::Zero(d, d)));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          double s = dGamma[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)](e, b) -
                     dGamma[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)](c, b);
          for (int m = 0; m < d; ++m) {
            s += Gamma[static_cast<std::size_t>(a)](c, m) *
                     Gamma[static_cast<std::size_t>(m)](e, b) -
                 Gamma[static_cast<std::size_t>(a)](e, m) *
                     Gamma[static_cast<std::size_t>(m)](c, b);
          }
          R[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)](c, e) = s;
        }
      }
    }
  }
  return R;
}

inline Vec riemann_apply(const std::vector<MatStack>& R, const Vec& X, const Vec& Y,
                         const Vec& Z) {
  const int d = static_cast<int>(R.size());
  Vec out = Vec::Zero(d);
  for (int a = 0; a < d; ++a) {
    double s = 0.0;
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          s += R[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)](c, e) *
               Z[b] * X[c] * Y[e];
        }
      }
    }
    out[a] = s;
  }
  return out;
}

struct PlaneDegenerate : ConfigError {
  using ConfigError::ConfigError;
};

// K(X,Y) = g(R(X,Y)Y, X) / (g(X,X) g(Y,Y) - g(X,Y)^2)
inline double sectional_curvature(const Mat& G, const std::vector<MatStack>& R,
                                  const Vec& X, const Vec& Y,
                                  double plane_tol = 1e-8) {
  double gxx = X.dot(G * X), gyy = Y.dot(G * Y), gxy = X.dot(G * Y);
  double den = gxx * gyy - gxy * gxy;
  if (std::abs(den) < plane_tol) {
    throw PlaneDegenerate("sectional curvature undefined: plane is degenerate");
  }
  return X.dot(G * riemann_apply(R, X, Y, Y)) / den;
}

}  // namespace pointwise

// Inverse through a dense LU solve; optionally reports the infinity-norm
// condition estimate so callers can flag ill-conditioned inputs.
inline Mat invert_metric(const Mat& G, double* condition = nullptr) {
  Eigen::PartialPivLU<Mat> lu(G);
  double det = lu.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw ConfigError("matrix is numerically singular");
  }
  Mat inv = lu.inverse();
  if (condition != nullptr) {
    *condition = G.cwiseAbs().rowwise().sum().maxCoeff() *
                 inv.cwiseAbs().rowwise().sum().maxCoeff();
  }
  return inv;
}

// Derivative stack of a (0,2)/(1,1) field: dT[c](i, j) = d_c T(i, j),
// reshaped from the flat component layout.
inline MatStack partial_stack_matrix(const TensorField& T, const Vec& x,
                                     DerivStrategy strategy) {
  const int d = T.dim();
  Mat P = T.partials(x, strategy);
  MatStack out(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int c = 0; c < d; ++c) {
        out[static_cast<std::size_t>(c)](i, j) = P(i * d + j, c);
      }
    }
  }
  return out;
}

// Derivative stack of a vector/covector field: out(k, c) = d_c T_k.
inline Mat partial_matrix_vector(const TensorField& T, const Vec& x,
                                 DerivStrategy strategy) {
  return T.partials(x, strategy);
}

// Same, split per direction: out[c][k] = d_c T_k.
inline VecStack partial_stack_vector(const TensorField& T, const Vec& x,
                                     DerivStrategy strategy) {
  Mat P = T.partials(x, strategy);
  VecStack out(static_cast<std::size_t>(T.dim()));
  for (int c = 0; c < T.dim(); ++c) out[static_cast<std::size_t>(c)] = P.col(c);
  return out;
}

inline Mat matrix_value(const TensorField& T, const Vec& x) {
  const int d = T.dim();
  Vec v = T.value(x);
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = v[i * d + j];
  }
  return m;
}

}  // namespace parageo
