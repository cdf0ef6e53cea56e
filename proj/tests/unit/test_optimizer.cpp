#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "t3f/error.hpp"
#include "t3f/optimizer.hpp"

using namespace t3f;
using namespace t3f::nn;

TEST_CASE("first step moves each entry by about lr against the gradient") {
  Rng rng(1);
  AdamHyper h;
  h.weight_decay = 0;
  h.lr = 0.01;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p(5), g(5), m(5, 0), v(5, 0);
    for (auto& x : p) x = rng.uniform(-1, 1);
    for (auto& x : g) x = rng.uniform(-1, 1);
    const auto before = p;
    adam_update(p, g, m, v, 1, h);
    for (std::size_t i = 0; i < 5; ++i) {
      const double delta = p[i] - before[i];
      CHECK(delta * g[i] < 0);
      CHECK(std::abs(delta) <= h.lr);
      CHECK(std::abs(delta) >= h.lr * (1 - 10 * h.eps / std::abs(g[i])));
    }
  }
}

TEST_CASE("zero gradient without decay leaves parameters alone") {
  AdamHyper h;
  h.weight_decay = 0;
  std::vector<double> p{1.5, -2}, g{0, 0}, m{0, 0}, v{0, 0};
  adam_update(p, g, m, v, 1, h);
  CHECK(p == std::vector<double>{1.5, -2});
}

TEST_CASE("two steps against a hand-rolled trace") {
  // Reference arithmetic for p = (0.5, -1.0), lr 0.1, wd 0.01,
  // g1 = (0.2, -0.4), g2 = (-0.1, 0.3).
  const double lr = 0.1, wd = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double ref[2] = {0.5, -1.0};
  double rm[2] = {0, 0}, rv[2] = {0, 0};
  const double grads[2][2] = {{0.2, -0.4}, {-0.1, 0.3}};
  for (int step = 1; step <= 2; ++step) {
    for (int i = 0; i < 2; ++i) {
      const double g = grads[step - 1][i];
      ref[i] = ref[i] * (1 - lr * wd);
      rm[i] = b1 * rm[i] + (1 - b1) * g;
      rv[i] = b2 * rv[i] + (1 - b2) * g * g;
      const double mh = rm[i] / (1 - std::pow(b1, step));
      const double vh = rv[i] / (1 - std::pow(b2, step));
      ref[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
  auto p = Tensor::parameter(1, 2, {0.5, -1.0});
  AdamState st;
  st.hyper = {lr, b1, b2, eps, wd};
  std::vector<Tensor> params{p};
  for (int step = 0; step < 2; ++step) {
    p.zero_grad();
    sum(mul(p, Tensor::constant(1, 2, {grads[step][0], grads[step][1]}))).backward();
    adam_step(params, st);
  }
  CHECK(st.step == 2);
  CHECK(p.data()[0] == doctest::Approx(ref[0]).epsilon(1e-14));
  CHECK(p.data()[1] == doctest::Approx(ref[1]).epsilon(1e-14));
  // First step by hand: 0.5 * 0.999 - 0.1 * 0.2 / (0.2 + eps)
  CHECK(ref[0] < 0.5);
}

TEST_CASE("adam rejects mismatched buffers") {
  std::vector<double> p{1, 2}, g{1}, m{0, 0}, v{0, 0};
  CHECK_THROWS_AS(adam_update(p, g, m, v, 1, AdamHyper{}), Error);
}
