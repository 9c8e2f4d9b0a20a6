#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrc/autodiff.hpp"
#include "mrc/errors.hpp"
#include "mrc/rng.hpp"
#include "oracles.hpp"

using namespace mrc;
using T = Tensor<double>;
using V = ad::Var<double>;

namespace {

T random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1, double hi = 1) {
  T t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// L = sum(A * f(x) * B) with fixed random A, B so every output entry gets a
// distinct weight.
struct UnaryProbe {
  std::function<V(const V&)> op;
  T ra, rb;

  V loss(ad::Tape<double>& tape, const V& x) const {
    const V y = op(x);
    return ad::sum(ad::matmul(ad::matmul(tape.constant(ra), y), tape.constant(rb)));
  }
};

double check_unary(const std::function<V(const V&)>& op, const T& x0, std::size_t out_rows, std::size_t out_cols,
                   Rng& rng) {
  UnaryProbe probe{op, random_tensor(3, out_rows, rng), random_tensor(out_cols, 2, rng)};
  ad::Tape<double> tape;
  const V x = tape.parameter("x", x0);
  const auto grads = tape.backward(probe.loss(tape, x));
  const auto f = [&](const T& xt) {
    ad::Tape<double> t;
    return probe.loss(t, t.parameter("x", xt)).value().item();
  };
  return oracle::max_rel_diff(grads.at("x"), oracle::numeric_grad(f, x0));
}

}  // namespace

TEST_CASE("tensor construction and shape errors") {
  CHECK_THROWS_AS(T(0, 3), ShapeError);
  CHECK_THROWS_AS(T(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  const T a = T::from_rows({{1, 2}, {3, 4}});
  CHECK(a(1, 0) == 3);
  CHECK(a.shape_string() == "2x2");
  CHECK_THROWS_AS(T(2, 1).item(), ShapeError);
}

TEST_CASE("matmul kernels agree with the triple loop") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(5), k = 1 + rng.index(5), m = 1 + rng.index(5);
    const T a = random_tensor(n, k, rng), b = random_tensor(k, m, rng), bt = random_tensor(m, k, rng),
            c = random_tensor(n, m, rng);
    const auto ref = oracle::matmul(oracle::to_mat(a), oracle::to_mat(b));
    CHECK(oracle::max_abs_diff(ref, matmul_values(a, b)) < 1e-12);
    const auto ref_nt = oracle::matmul(oracle::to_mat(a), oracle::transpose(oracle::to_mat(bt)));
    CHECK(oracle::max_abs_diff(ref_nt, matmul_nt_values(a, bt)) < 1e-12);
    const auto ref_tn = oracle::matmul(oracle::transpose(oracle::to_mat(a)), oracle::to_mat(c));
    CHECK(oracle::max_abs_diff(ref_tn, matmul_tn_values(a, c)) < 1e-12);
  }
  CHECK_THROWS_AS(matmul_values(T(2, 3), T(2, 3)), ShapeError);
}

TEST_CASE("softmax matches shifted-logit oracle and respects masks") {
  Rng rng(5);
  const T x = random_tensor(4, 6, rng, -30, 30);
  ad::Tape<double> tape;
  const V s = ad::softmax_rows(tape.constant(x));
  CHECK(oracle::max_abs_diff(oracle::softmax_rows(oracle::to_mat(x)), s.value()) < 1e-14);

  const std::vector<unsigned char> cols = {1, 0, 1, 1, 0, 1};
  const Mask mask = Mask::broadcast_columns(4, cols);
  const V sm = ad::softmax_rows(tape.constant(x), &mask);
  CHECK(oracle::max_abs_diff(oracle::softmax_rows(oracle::to_mat(x), cols), sm.value()) < 1e-14);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(sm.value()(r, 1) == 0.0);
    CHECK(sm.value()(r, 4) == 0.0);
  }

  // huge logits stay finite thanks to the max shift
  const V big = ad::softmax_rows(tape.constant(T::from_rows({{1000, 1001, 999}})));
  CHECK(big.value().all_finite());

  const Mask none = Mask::broadcast_columns(1, {0, 0, 0});
  CHECK_THROWS_AS(ad::softmax_rows(tape.constant(T(1, 3)), &none), DomainError);
}

TEST_CASE("every op passes central finite differences") {
  Rng rng(11);
  const T x = random_tensor(3, 4, rng);
  const T w = random_tensor(4, 5, rng);
  const T w2 = random_tensor(5, 4, rng);
  const T row = random_tensor(1, 4, rng);
  const double tol = 1e-6;

  SUBCASE("matmul / matmul_nt / transpose") {
    CHECK(check_unary([&](const V& v) { return ad::matmul(v, v.tape()->constant(w)); }, x, 3, 5, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::matmul(v.tape()->constant(w2), v); }, random_tensor(4, 3, rng), 5, 3, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::matmul_nt(v, v.tape()->constant(w2)); }, x, 3, 5, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::matmul_nt(v.tape()->constant(w2), v); }, x, 5, 3, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::matmul_nt(v, v); }, x, 3, 3, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::transpose(v); }, x, 4, 3, rng) < tol);
  }
  SUBCASE("add / add_bias / scale / scale_shift") {
    CHECK(check_unary([](const V& v) { return ad::add(v, v); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::add_bias(v.tape()->constant(x), ad::slice_rows(v, 0, 1)); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::add_bias(v, v.tape()->constant(row)); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([&](const V& v) { return ad::add_bias(v.tape()->constant(x), ad::pick(v, 1, 2)); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::scale(v, -2.5); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::scale_shift(v, -1.0, 1.0); }, x, 3, 4, rng) < tol);
  }
  SUBCASE("relu away from the kink") {
    T shifted = x;
    for (std::size_t i = 0; i < shifted.size(); ++i)
      if (std::abs(shifted[i]) < 0.05) shifted[i] = 0.3;
    CHECK(check_unary([](const V& v) { return ad::relu(v); }, shifted, 3, 4, rng) < tol);
  }
  SUBCASE("softmax, masked softmax, log") {
    CHECK(check_unary([](const V& v) { return ad::softmax_rows(v); }, x, 3, 4, rng) < tol);
    static const Mask mask = Mask::broadcast_columns(3, {1, 1, 0, 1});
    CHECK(check_unary([](const V& v) { return ad::softmax_rows(v, &mask); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::log(ad::softmax_rows(v)); }, x, 3, 4, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::log(ad::softmax_rows(v), std::optional<double>(1e-12)); }, x, 3, 4, rng) < tol);
  }
  SUBCASE("structural ops") {
    CHECK(check_unary([](const V& v) { return ad::concat_cols<double>({v, ad::scale(v, 2.0), v}); }, x, 3, 12, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::slice_cols(v, 1, 2); }, x, 3, 2, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::slice_rows(v, 1, 2); }, x, 2, 4, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::gather_rows(v, {2, 0, 2, 2}); }, x, 4, 4, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::mask_rows(v, {1, 0, 1}); }, x, 3, 4, rng) < tol);
  }
  SUBCASE("layer norm in every argument") {
    const T bias = random_tensor(1, 4, rng);
    CHECK(check_unary([&](const V& v) { return ad::layer_norm(v, v.tape()->constant(row), v.tape()->constant(bias)); },
                      x, 3, 4, rng) < 1e-5);
    CHECK(check_unary([&](const V& v) { return ad::layer_norm(v.tape()->constant(x), ad::slice_rows(v, 0, 1), ad::slice_rows(v, 1, 1)); },
                      x, 3, 4, rng) < tol);
  }
  SUBCASE("reductions") {
    CHECK(check_unary([](const V& v) { return ad::sum(v); }, x, 1, 1, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::mean(v); }, x, 1, 1, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::pick(v, 2, 3); }, x, 1, 1, rng) < tol);
    CHECK(check_unary([](const V& v) { return ad::add_scalars<double>({ad::pick(v, 0, 0), ad::sum(v), ad::pick(v, 0, 0)}); }, x, 1, 1, rng) < tol);
  }
}

TEST_CASE("relu subgradient at zero is zero") {
  ad::Tape<double> tape;
  const V x = tape.parameter("x", T::from_rows({{0.0, 1.0, -1.0}}));
  const auto g = tape.backward(ad::sum(ad::relu(x)));
  CHECK(g.at("x")(0, 0) == 0.0);
  CHECK(g.at("x")(0, 1) == 1.0);
  CHECK(g.at("x")(0, 2) == 0.0);
}

TEST_CASE("log domain and floor") {
  ad::Tape<double> tape;
  CHECK_THROWS_AS(ad::log(tape.constant(T::scalar(0.0))), DomainError);
  CHECK_THROWS_AS(ad::log(tape.constant(T::scalar(-1.0))), DomainError);
  const V x = tape.parameter("x", T::from_rows({{0.0, 0.5}}));
  const V y = ad::log(x, std::optional<double>(1e-12));
  CHECK(y.value()(0, 0) == doctest::Approx(std::log(1e-12)));
  const auto g = tape.backward(ad::sum(y));
  CHECK(g.at("x")(0, 0) == 0.0);
  CHECK(g.at("x")(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("tape contract") {
  ad::Tape<double> tape;
  const V a = tape.parameter("a", T::scalar(2.0));
  const V b = tape.parameter("b", T::scalar(3.0));
  CHECK(tape.parameter("a", T::scalar(9.0)).id() == a.id());
  const V loss = ad::add_scalars<double>({a, a});
  const auto g = tape.backward(loss);
  CHECK(g.at("a").item() == 2.0);
  CHECK(g.at("b").item() == 0.0);  // unreached leaf reports zeros
  CHECK_THROWS_AS(tape.backward(loss), UsageError);

  ad::Tape<double> other;
  CHECK_THROWS_AS(other.backward(loss), UsageError);
  CHECK_THROWS_AS(ad::add(a, other.constant(T::scalar(1.0))), UsageError);
  CHECK_THROWS_AS(other.backward(other.constant(T::scalar(1.0))), UsageError);
  const V mat = other.parameter("m", T(2, 2, 1.0));
  CHECK_THROWS_AS(other.backward(mat), ShapeError);
  (void)b;
}

TEST_CASE("non-finite values are caught at the op") {
  ad::Tape<double> tape;
  const V x = tape.constant(T::scalar(1e308));
  CHECK_THROWS_AS(ad::scale(x, 10.0), NumericError);
}

TEST_CASE("float and double tapes agree on a composite") {
  Rng rng(21);
  const T x = random_tensor(3, 4, rng);
  const T w = random_tensor(4, 4, rng);
  ad::Tape<double> td;
  ad::Tape<float> tf;
  const auto yd = ad::sum(ad::softmax_rows(ad::matmul(td.constant(x), td.constant(w))));
  const auto yf = ad::sum(ad::softmax_rows(ad::matmul(tf.constant(x.cast<float>()), tf.constant(w.cast<float>()))));
  CHECK(double(yf.value().item()) == doctest::Approx(yd.value().item()).epsilon(1e-5));
}
