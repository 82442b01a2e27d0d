#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <vector>

#include "error.hpp"

namespace flode {

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

inline double conj_like(double x) { return x; }
inline std::complex<double> conj_like(const std::complex<double>& x) {
  return std::conj(x);
}

inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }

}  // namespace detail

// Reverse-mode tape over dense matrices, restricted to the operation set the
// model needs. Adjoints of complex nodes follow the convention
// adj = dL/dRe + i dL/dIm for a real-valued loss L, which makes the matmul
// rule adj_A += adj_C B^H exact for both scalar types.
template <typename Scalar>
class Tape {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  static constexpr bool kComplex = detail::is_complex<Scalar>::value;

  struct Var {
    int id = -1;
  };

  Var leaf(Matrix value) {
    nodes_.push_back(Node{std::move(value), {}, nullptr});
    return {static_cast<int>(nodes_.size()) - 1};
  }

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  const Matrix& adjoint(Var v) const { return nodes_[v.id].adjoint; }

  Var matmul(Var a, Var b) {
    Matrix out = value(a) * value(b);
    return push(std::move(out), [a, b](Tape& t, const Matrix& adj) {
      t.accumulate(a, adj * t.value(b).adjoint());
      t.accumulate(b, t.value(a).adjoint() * adj);
    });
  }

  Var add(Var a, Var b) {
    Matrix out = value(a) + value(b);
    return push(std::move(out), [a, b](Tape& t, const Matrix& adj) {
      t.accumulate(a, adj);
      t.accumulate(b, adj);
    });
  }

  // a + row broadcast over rows; row is 1 x K.
  Var add_row(Var a, Var row) {
    Matrix out = value(a).rowwise() + value(row).row(0);
    return push(std::move(out), [a, row](Tape& t, const Matrix& adj) {
      t.accumulate(a, adj);
      t.accumulate(row, adj.colwise().sum());
    });
  }

  // Elementwise LeakyReLU; for complex scalars it acts componentwise on the
  // real and imaginary parts (only ever applied to real-valued data here).
  Var leaky_relu(Var a, double slope) {
    const Matrix& x = value(a);
    Matrix out = x;
    if constexpr (kComplex) {
      for (long c = 0; c < out.cols(); ++c)
        for (long r = 0; r < out.rows(); ++r) {
          auto& z = out(r, c);
          z = Scalar(z.real() >= 0 ? z.real() : slope * z.real(),
                     z.imag() >= 0 ? z.imag() : slope * z.imag());
        }
    } else {
      for (long c = 0; c < out.cols(); ++c)
        for (long r = 0; r < out.rows(); ++r)
          if (out(r, c) < 0) out(r, c) *= slope;
    }
    return push(std::move(out), [a, slope](Tape& t, const Matrix& adj) {
      const Matrix& x = t.value(a);
      Matrix g(adj.rows(), adj.cols());
      if constexpr (kComplex) {
        for (long c = 0; c < g.cols(); ++c)
          for (long r = 0; r < g.rows(); ++r) {
            const auto& z = x(r, c);
            const auto& d = adj(r, c);
            g(r, c) = Scalar(d.real() * (z.real() >= 0 ? 1.0 : slope),
                             d.imag() * (z.imag() >= 0 ? 1.0 : slope));
          }
      } else {
        for (long c = 0; c < g.cols(); ++c)
          for (long r = 0; r < g.rows(); ++r)
            g(r, c) = adj(r, c) * (x(r, c) >= 0 ? 1.0 : slope);
      }
      t.accumulate(a, g);
    });
  }

  // Elementwise multiply by a constant real mask (inverted dropout).
  Var mask_scale(Var a, const Eigen::ArrayXXd& mask) {
    Matrix out = value(a).cwiseProduct(mask.matrix().cast<Scalar>());
    return push(std::move(out), [a, mask](Tape& t, const Matrix& adj) {
      t.accumulate(a, adj.cwiseProduct(mask.matrix().cast<Scalar>()));
    });
  }

  // x diag(w) with w a 1 x K variable.
  Var scale_columns(Var a, Var w) {
    const Matrix& x = value(a);
    const Matrix& wv = value(w);
    Matrix out = x;
    for (long c = 0; c < out.cols(); ++c) out.col(c) *= wv(0, c);
    return push(std::move(out), [a, w](Tape& t, const Matrix& adj) {
      const Matrix& x = t.value(a);
      const Matrix& wv = t.value(w);
      Matrix ga(adj.rows(), adj.cols());
      Matrix gw(1, wv.cols());
      for (long c = 0; c < adj.cols(); ++c) {
        ga.col(c) = adj.col(c) * detail::conj_like(wv(0, c));
        gw(0, c) = x.col(c).conjugate().cwiseProduct(adj.col(c)).sum();
      }
      t.accumulate(a, ga);
      t.accumulate(w, gw);
    });
  }

  // x + s * g with s a 1 x 1 variable.
  Var add_scaled(Var x, Var g, Var s) {
    Matrix out = value(x) + value(s)(0, 0) * value(g);
    return push(std::move(out), [x, g, s](Tape& t, const Matrix& adj) {
      t.accumulate(x, adj);
      t.accumulate(g, detail::conj_like(t.value(s)(0, 0)) * adj);
      Matrix gs(1, 1);
      gs(0, 0) = t.value(g).conjugate().cwiseProduct(adj).sum();
      t.accumulate(s, gs);
    });
  }

  // k * s for a constant k (1 x 1 variable s).
  Var scalar_times(Var s, Scalar k) {
    Matrix out = k * value(s);
    return push(std::move(out), [s, k](Tape& t, const Matrix& adj) {
      t.accumulate(s, detail::conj_like(k) * adj);
    });
  }

  // y = U diag(sigma^alpha) V^T x with a variable exponent (1 x 1, real
  // valued). Singular values at or below drop_tol behave as exact zeros:
  // sigma^alpha := 0 and d(sigma^alpha)/d(alpha) := 0.
  Var frac_apply(const Eigen::MatrixXd& u, const Eigen::VectorXd& sigma,
                 const Eigen::MatrixXd& v, double drop_tol, Var alpha, Var x) {
    const double a = detail::real_part(value(alpha)(0, 0));
    Eigen::VectorXd s_alpha(sigma.size());
    for (long i = 0; i < sigma.size(); ++i)
      s_alpha(i) = sigma(i) <= drop_tol ? 0.0 : std::pow(sigma(i), a);
    Matrix t_mat = v.transpose().cast<Scalar>() * value(x);
    Matrix out = u.cast<Scalar>() * (s_alpha.cast<Scalar>().asDiagonal() * t_mat);
    return push(std::move(out), [&u, &sigma, &v, drop_tol, alpha, x, s_alpha,
                                 t_mat](Tape& t, const Matrix& adj) {
      // d/dx: V diag(s) U^T adj.
      Matrix ut_adj = u.transpose().cast<Scalar>() * adj;
      t.accumulate(
          x, v.cast<Scalar>() * (s_alpha.cast<Scalar>().asDiagonal() * ut_adj));
      // d/dalpha through s_i = sigma_i^alpha: ds/dalpha = s_i ln(sigma_i).
      double galpha = 0.0;
      for (long i = 0; i < sigma.size(); ++i) {
        if (sigma(i) <= drop_tol) continue;
        const double ds =
            detail::real_part(t_mat.row(i).cwiseProduct(ut_adj.row(i).conjugate())
                                  .sum());
        galpha += ds * s_alpha(i) * std::log(sigma(i));
      }
      Matrix ga(1, 1);
      ga(0, 0) = Scalar(galpha);
      t.accumulate(alpha, ga);
    });
  }

  // [Re a, Im a]; the result carries real-valued data.
  Var concat_reim(Var a) {
    static_assert(kComplex, "concat_reim is a complex-tape operation");
    const Matrix& x = value(a);
    Matrix out(x.rows(), 2 * x.cols());
    out.leftCols(x.cols()) = x.real().template cast<Scalar>();
    out.rightCols(x.cols()) = x.imag().template cast<Scalar>();
    return push(std::move(out), [a](Tape& t, const Matrix& adj) {
      const long k = t.value(a).cols();
      Matrix g(adj.rows(), k);
      for (long c = 0; c < k; ++c)
        for (long r = 0; r < adj.rows(); ++r)
          g(r, c) = Scalar(adj(r, c).real(), adj(r, c + k).real());
      t.accumulate(a, g);
    });
  }

  // Takes the real part; identity pass-through for a real tape.
  Var real_part(Var a) {
    if constexpr (!kComplex) return a;
    Matrix out = value(a).real().template cast<Scalar>();
    return push(std::move(out), [a](Tape& t, const Matrix& adj) {
      Matrix g = adj;
      for (long c = 0; c < g.cols(); ++c)
        for (long r = 0; r < g.rows(); ++r)
          g(r, c) = Scalar(g(r, c).real(), 0.0);
      t.accumulate(a, g);
    });
  }

  // Mean softmax cross-entropy of Re(logits) over the masked rows; returns
  // the scalar loss value and the 1 x 1 loss node.
  Var softmax_cross_entropy(Var logits, const std::vector<int>& labels,
                            const std::vector<int>& mask, double* loss_out) {
    if (mask.empty())
      fail(ErrorCode::invalid_argument, "cross-entropy over an empty mask");
    const Matrix& z = value(logits);
    Eigen::MatrixXd probs(mask.size(), z.cols());
    double loss = 0.0;
    for (std::size_t m = 0; m < mask.size(); ++m) {
      const int i = mask[m];
      Eigen::VectorXd row(z.cols());
      for (long c = 0; c < z.cols(); ++c) row(c) = detail::real_part(z(i, c));
      const double mx = row.maxCoeff();
      const Eigen::VectorXd ex = (row.array() - mx).exp();
      const double denom = ex.sum();
      probs.row(m) = ex.transpose() / denom;
      loss -= std::log(std::max(probs(m, labels[i]), 1e-300));
    }
    loss /= static_cast<double>(mask.size());
    if (loss_out) *loss_out = loss;

    Matrix out(1, 1);
    out(0, 0) = Scalar(loss);
    return push(std::move(out), [logits, labels, mask, probs](
                                    Tape& t, const Matrix& adj) {
      const double seed = detail::real_part(adj(0, 0));
      const Matrix& z = t.value(logits);
      Matrix g = Matrix::Zero(z.rows(), z.cols());
      const double inv = 1.0 / static_cast<double>(mask.size());
      for (std::size_t m = 0; m < mask.size(); ++m) {
        const int i = mask[m];
        for (long c = 0; c < z.cols(); ++c) {
          double p = probs(m, c);
          if (c == labels[i]) p -= 1.0;
          g(i, c) = Scalar(seed * p * inv);
        }
      }
      t.accumulate(logits, g);
    });
  }

  void backward(Var loss) {
    for (auto& node : nodes_)
      node.adjoint = Matrix::Zero(node.value.rows(), node.value.cols());
    nodes_[loss.id].adjoint(0, 0) = Scalar(1.0);
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
      if (nodes_[i].backward) nodes_[i].backward(*this, nodes_[i].adjoint);
  }

 private:
  struct Node {
    Matrix value;
    Matrix adjoint;
    std::function<void(Tape&, const Matrix&)> backward;
  };

  Var push(Matrix value, std::function<void(Tape&, const Matrix&)> backward) {
    nodes_.push_back(Node{std::move(value), {}, std::move(backward)});
    return {static_cast<int>(nodes_.size()) - 1};
  }

  void accumulate(Var v, const Matrix& grad) {
    nodes_[v.id].adjoint += grad;
  }

  std::vector<Node> nodes_;
};

}  // namespace flode
