#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "holosweep/metrics.hpp"

using namespace holosweep;
using namespace holosweep::metrics;

namespace {

ImageU8 random_u8(int w, int h, std::mt19937& rng) {
  ImageU8 img(w, h);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(byte(rng));
  return img;
}

// brute-force double-loop oracles
double mse_oracle(const ImageU8& a, const ImageU8& b) {
  double sum = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      const double d = a.at(x, y) / 255.0 - b.at(x, y) / 255.0;
      sum += d * d;
    }
  return sum / (a.width() * a.height());
}

double acc_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace

TEST_CASE("mse of identical maps is zero", "[metrics]") {
  std::mt19937 rng(1);
  const auto img = random_u8(13, 7, rng);
  const auto m = mse(img, img);
  CHECK(m.normalized == 0.0);
  CHECK(m.byte_scale == 0.0);
}

TEST_CASE("mse of opposite extremes is one", "[metrics]") {
  const ImageU8 zeros(9, 4, 0);
  const ImageU8 full(9, 4, 255);
  const auto m = mse(zeros, full);
  CHECK(m.normalized == 1.0);
  CHECK(m.byte_scale == 255.0 * 255.0);
}

TEST_CASE("mse matches the double-loop oracle", "[metrics]") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_u8(8, 8, rng);
    const auto b = random_u8(8, 8, rng);
    CHECK(mse(a, b).normalized == Approx(mse_oracle(a, b)).margin(1e-12));
  }
}

TEST_CASE("mse is zero exactly when the maps are bitwise equal", "[metrics]") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_u8(6, 5, rng);
    auto b = a;
    CHECK(mse(a, b).normalized == 0.0);
    const int flip = std::uniform_int_distribution<int>(0, 29)(rng);
    b.pixels()[flip] = static_cast<std::uint8_t>(b.pixels()[flip] ^ 0x10);
    CHECK(mse(a, b).normalized > 0.0);
  }
}

TEST_CASE("mse rejects mismatched resolutions", "[metrics]") {
  CHECK_THROWS_AS(mse(ImageU8(4, 4), ImageU8(4, 5)), DataError);
}

TEST_CASE("acc is one for positively scaled copies", "[metrics]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<double> base(64);
  for (auto& v : base) v = value(rng);
  for (double k : {0.5, 1.0, 3.0}) {
    std::vector<double> scaled(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) scaled[i] = k * base[i];
    CHECK(acc(base, scaled) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("acc handles zero-image corner cases", "[metrics]") {
  const std::vector<double> zeros(16, 0.0);
  std::vector<double> ones(16, 1.0);
  CHECK(acc(zeros, zeros) == 1.0);
  CHECK(acc(zeros, ones) == 0.0);
  CHECK(acc(ones, zeros) == 0.0);
}

TEST_CASE("acc of disjoint supports is zero", "[metrics]") {
  std::vector<double> a(10, 0.0);
  std::vector<double> b(10, 0.0);
  for (int i = 0; i < 5; ++i) a[i] = 1.0 + i;
  for (int i = 5; i < 10; ++i) b[i] = 2.0 + i;
  CHECK(acc(a, b) == 0.0);
}

TEST_CASE("acc matches the double-loop oracle", "[metrics]") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(64), b(64);
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng);
    CHECK(acc(a, b) == Approx(acc_oracle(a, b)).margin(1e-12));
  }
}

TEST_CASE("acc is symmetric and scale invariant", "[metrics]") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> value(0.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(48), b(48);
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng);
    CHECK(acc(a, b) == acc(b, a));
    std::vector<double> a3(a);
    for (auto& v : a3) v *= 3.0;
    CHECK(acc(a3, b) == Approx(acc(a, b)).margin(1e-12));
  }
}

TEST_CASE("acc stays in the unit interval for non-negative inputs", "[metrics]") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(32), b(32);
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng);
    const double v = acc(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("acc on byte images matches the scaled-copy identity", "[metrics]") {
  ImageU8 a(8, 8);
  for (std::size_t i = 0; i < a.pixels().size(); ++i)
    a.pixels()[i] = static_cast<std::uint8_t>(i % 80);
  ImageU8 b = a;
  for (auto& v : b.pixels()) v = static_cast<std::uint8_t>(v * 3);  // exact: values < 86
  CHECK(acc(a, b) == Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(acc(ImageU8(3, 3), ImageU8(3, 4)), DataError);
}

TEST_CASE("color acc sums over all three channels", "[metrics]") {
  ImageRgb8 a(4, 4);
  ImageRgb8 b(4, 4);
  for (std::size_t i = 0; i < a.pixels().size(); ++i) {
    a.pixels()[i] = {static_cast<std::uint8_t>(3 * i), static_cast<std::uint8_t>(2 * i),
                     static_cast<std::uint8_t>(i)};
    b.pixels()[i] = {static_cast<std::uint8_t>(6 * i), static_cast<std::uint8_t>(4 * i),
                     static_cast<std::uint8_t>(2 * i)};
  }
  CHECK(acc(a, b) == Approx(1.0).margin(1e-12));
}

TEST_CASE("training time is the triple product", "[metrics]") {
  CHECK(training_time_s({1.0, 10, 5}) == 50.0);
  CHECK(training_time_s({0.5, 64, 20}) == 640.0);
  CHECK(training_time_s({0.0, 100, 100}) == 0.0);
  CHECK(training_time_s({2.5, 0, 9}) == 0.0);
  CHECK(training_time_s({2.5, 9, 0}) == 0.0);
}

TEST_CASE("training time matches the product oracle on random models", "[metrics]") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> t(0.0, 10.0);
  std::uniform_int_distribution<std::int64_t> count(0, 2000);
  for (int trial = 0; trial < 1000; ++trial) {
    const TimeModel m{t(rng), count(rng), count(rng)};
    CHECK(training_time_s(m) == m.t_per_batch_s * static_cast<double>(m.batches * m.epochs));
  }
}

TEST_CASE("time model validation rejects negatives", "[metrics]") {
  CHECK_THROWS_AS(validate_time_model({-1.0, 1, 1}), ConfigError);
  CHECK_THROWS_AS(validate_time_model({1.0, -1, 1}), ConfigError);
  CHECK_THROWS_AS(validate_time_model({1.0, 1, -1}), ConfigError);
  CHECK_NOTHROW(validate_time_model({0.0, 0, 0}));
}
