#include <cmath>
#include <complex>

#include "autodiff.hpp"
#include "doctest.h"
#include "rng.hpp"

using namespace flode;
using Complex = std::complex<double>;

TEST_CASE("matmul and bias gradients match finite differences") {
  Rng rng(1);
  Eigen::MatrixXd a(3, 2), b(2, 4), bias(1, 4);
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 3; ++r) a(r, c) = rng.normal();
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 2; ++r) b(r, c) = rng.normal();
  for (int c = 0; c < 4; ++c) bias(0, c) = rng.normal();
  const std::vector<int> labels = {1, 3, 0};
  const std::vector<int> mask = {0, 1, 2};

  auto loss_value = [&](const Eigen::MatrixXd& bm) {
    Tape<double> tape;
    auto va = tape.leaf(a);
    auto vb = tape.leaf(bm);
    auto vbias = tape.leaf(bias);
    auto logits = tape.add_row(tape.matmul(va, vb), vbias);
    double loss = 0.0;
    tape.softmax_cross_entropy(logits, labels, mask, &loss);
    return loss;
  };

  Tape<double> tape;
  auto va = tape.leaf(a);
  auto vb = tape.leaf(b);
  auto vbias = tape.leaf(bias);
  auto logits = tape.add_row(tape.matmul(va, vb), vbias);
  double loss = 0.0;
  auto loss_var = tape.softmax_cross_entropy(logits, labels, mask, &loss);
  tape.backward(loss_var);

  CHECK(loss > 0.0);
  const double eps = 1e-6;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) {
      Eigen::MatrixXd up = b, down = b;
      up(r, c) += eps;
      down(r, c) -= eps;
      const double numeric = (loss_value(up) - loss_value(down)) / (2 * eps);
      CHECK(tape.adjoint(vb)(r, c) == doctest::Approx(numeric).epsilon(1e-5));
    }
}

TEST_CASE("uniform logits give log(C) loss and centered gradients") {
  Tape<double> tape;
  auto logits = tape.leaf(Eigen::MatrixXd::Zero(2, 5));
  double loss = 0.0;
  auto loss_var =
      tape.softmax_cross_entropy(logits, {2, 4}, {0, 1}, &loss);
  CHECK(loss == doctest::Approx(std::log(5.0)));
  tape.backward(loss_var);
  // Gradient rows sum to zero and put -(1 - 1/C)/|mask| on the label.
  const auto& g = tape.adjoint(logits);
  CHECK(g.row(0).sum() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g(0, 2) == doctest::Approx((0.2 - 1.0) / 2.0));
  CHECK(g(0, 0) == doctest::Approx(0.2 / 2.0));
}

TEST_CASE("leaky relu gradient") {
  Eigen::MatrixXd x(2, 2);
  x << 1.5, -2.0, 0.5, -0.1;
  Tape<double> tape;
  auto vx = tape.leaf(x);
  auto act = tape.leaky_relu(vx, 0.01);
  // Reduce to a scalar through a fixed linear functional.
  Eigen::MatrixXd ones(2, 1);
  ones << 1.0, 1.0;
  auto reduced = tape.matmul(tape.matmul(tape.leaf(ones.transpose()),
                                         act),
                             tape.leaf(ones));
  tape.backward(reduced);
  CHECK(tape.value(act)(0, 1) == doctest::Approx(-0.02));
  CHECK(tape.adjoint(vx)(0, 0) == doctest::Approx(1.0));
  CHECK(tape.adjoint(vx)(0, 1) == doctest::Approx(0.01));
}

TEST_CASE("fractional power exponent gradient, scalar toy") {
  // Single singular value sigma = 0.5: y = 0.5^alpha,
  // dy/dalpha = 0.5^alpha ln 0.5.
  Eigen::MatrixXd u(1, 1), v(1, 1);
  u << 1.0;
  v << 1.0;
  Eigen::VectorXd sigma(1);
  sigma << 0.5;

  Tape<double> tape;
  Eigen::MatrixXd alpha_value(1, 1), x_value(1, 1);
  alpha_value << 0.7;
  x_value << 1.0;
  auto alpha = tape.leaf(alpha_value);
  auto x = tape.leaf(x_value);
  auto y = tape.frac_apply(u, sigma, v, 0.0, alpha, x);
  tape.backward(y);
  CHECK(tape.value(y)(0, 0) == doctest::Approx(std::pow(0.5, 0.7)));
  CHECK(tape.adjoint(alpha)(0, 0) ==
        doctest::Approx(std::pow(0.5, 0.7) * std::log(0.5)));

  SUBCASE("dropped singular values contribute nothing") {
    Eigen::VectorXd tiny(1);
    tiny << 1e-15;
    Tape<double> t2;
    auto a2 = t2.leaf(alpha_value);
    auto x2 = t2.leaf(x_value);
    auto y2 = t2.frac_apply(u, tiny, v, 1e-12, a2, x2);
    t2.backward(y2);
    CHECK(t2.value(y2)(0, 0) == 0.0);
    CHECK(t2.adjoint(a2)(0, 0) == 0.0);
  }
}

TEST_CASE("complex ops carry (dRe, dIm) adjoints") {
  // L = Re(sum(x * w)) with x fixed complex, w a complex scalar times a
  // column: check dL/dRe(w) and dL/dIm(w) by finite differences.
  Rng rng(3);
  Eigen::MatrixXcd x(3, 2);
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 3; ++r) x(r, c) = Complex(rng.normal(), rng.normal());
  Eigen::MatrixXcd w(1, 2);
  w << Complex(0.4, -0.3), Complex(-1.1, 0.8);

  auto loss_value = [&](const Eigen::MatrixXcd& wm) {
    Tape<Complex> tape;
    auto vx = tape.leaf(x);
    auto vw = tape.leaf(wm);
    auto scaled = tape.scale_columns(vx, vw);
    auto real_scaled = tape.real_part(scaled);
    // Sum all entries through fixed one-vectors.
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Ones(1, 3);
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Ones(2, 1);
    auto reduced =
        tape.matmul(tape.matmul(tape.leaf(left), real_scaled), tape.leaf(right));
    return tape.value(reduced)(0, 0).real();
  };

  Tape<Complex> tape;
  auto vx = tape.leaf(x);
  auto vw = tape.leaf(w);
  auto scaled = tape.scale_columns(vx, vw);
  auto real_scaled = tape.real_part(scaled);
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Ones(1, 3);
  Eigen::MatrixXcd right = Eigen::MatrixXcd::Ones(2, 1);
  auto reduced =
      tape.matmul(tape.matmul(tape.leaf(left), real_scaled), tape.leaf(right));
  tape.backward(reduced);

  const double eps = 1e-6;
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXcd up = w, down = w;
    up(0, c) += eps;
    down(0, c) -= eps;
    const double d_re = (loss_value(up) - loss_value(down)) / (2 * eps);
    up = w;
    down = w;
    up(0, c) += Complex(0.0, eps);
    down(0, c) -= Complex(0.0, eps);
    const double d_im = (loss_value(up) - loss_value(down)) / (2 * eps);
    CHECK(tape.adjoint(vw)(0, c).real() == doctest::Approx(d_re).epsilon(1e-6));
    CHECK(tape.adjoint(vw)(0, c).imag() == doctest::Approx(d_im).epsilon(1e-6));
  }
}

TEST_CASE("add_scaled routes gradients to the step scalar") {
  // z = x + s g reduced by summation; ds = sum(g) for real data.
  Eigen::MatrixXd x(2, 1), g(2, 1), s(1, 1);
  x << 1.0, 2.0;
  g << 0.5, -1.5;
  s << 0.3;
  Tape<double> tape;
  auto vx = tape.leaf(x);
  auto vg = tape.leaf(g);
  auto vs = tape.leaf(s);
  auto z = tape.add_scaled(vx, vg, vs);
  Eigen::MatrixXd left(1, 2);
  left << 1.0, 1.0;
  auto reduced = tape.matmul(tape.leaf(left), z);
  tape.backward(reduced);
  CHECK(tape.adjoint(vs)(0, 0) == doctest::Approx(-1.0));
  CHECK(tape.adjoint(vg)(0, 0) == doctest::Approx(0.3));
  CHECK(tape.adjoint(vx)(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("concat splits real and imaginary parts") {
  Eigen::MatrixXcd x(2, 1);
  x << Complex(1.0, -2.0), Complex(0.5, 3.0);
  Tape<Complex> tape;
  auto vx = tape.leaf(x);
  auto cat = tape.concat_reim(vx);
  CHECK(tape.value(cat)(0, 0) == Complex(1.0, 0.0));
  CHECK(tape.value(cat)(0, 1) == Complex(-2.0, 0.0));
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Ones(1, 2);
  Eigen::MatrixXcd right(2, 1);
  right << Complex(1.0, 0.0), Complex(2.0, 0.0);
  auto reduced = tape.matmul(tape.matmul(tape.leaf(left), cat), tape.leaf(right));
  tape.backward(reduced);
  // d/dRe(x_r) = 1, d/dIm(x_r) = 2 for every row.
  CHECK(tape.adjoint(vx)(0, 0) == Complex(1.0, 2.0));
  CHECK(tape.adjoint(vx)(1, 0) == Complex(1.0, 2.0));
}
