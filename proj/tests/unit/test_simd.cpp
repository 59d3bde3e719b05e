#include <cmath>
#include <random>

#include "doctest.h"
#include "lesvote/error.hpp"
#include "lesvote/simd/kernels.hpp"

using namespace lesvote;

namespace {

std::vector<simd::Isa> available() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::avx2, simd::Isa::neon})
    if (simd::supported(isa)) out.push_back(isa);
  return out;
}

std::vector<double> noise(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool close(double a, double b, std::size_t n) {
  return std::abs(a - b) <= 1e-13 * static_cast<double>(n + 1) * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  CHECK(simd::supported(simd::Isa::scalar));
  CHECK(simd::kernels_for(simd::Isa::scalar).isa == simd::Isa::scalar);
  CHECK(simd::select(simd::active_isa()));
}

TEST_CASE("simd kernels match the scalar reference for every length and offset") {
  const auto& ref = simd::kernels_for(simd::Isa::scalar);
  std::mt19937_64 rng(5);
  for (auto isa : available()) {
    const auto& k = simd::kernels_for(isa);
    CAPTURE(simd::to_string(isa));
    for (std::size_t n = 0; n <= 67; ++n) {
      for (std::size_t off = 0; off < 3; ++off) {
        const auto a = noise(n + off, rng);
        const auto b = noise(n + off, rng);
        CHECK(close(k.dot(a.data() + off, b.data() + off, n), ref.dot(a.data() + off, b.data() + off, n), n));
        CHECK(close(k.squared_distance(a.data() + off, b.data() + off, n),
                    ref.squared_distance(a.data() + off, b.data() + off, n), n));

        auto y1 = b, y2 = b;
        k.axpy(0.75, a.data() + off, y1.data() + off, n);
        ref.axpy(0.75, a.data() + off, y2.data() + off, n);
        for (std::size_t i = 0; i < y1.size(); ++i) CHECK(close(y1[i], y2[i], 1));

        std::vector<double> m1(n + off, 0.0), m2(n + off, 0.0);
        k.multiply(a.data() + off, b.data() + off, m1.data() + off, n);
        ref.multiply(a.data() + off, b.data() + off, m2.data() + off, n);
        CHECK(m1 == m2);

        const auto inter = noise(2 * n + off, rng);
        std::vector<double> p1(n + 1, 1.0), p2(n + 1, 1.0);
        k.accumulate_power(inter.data() + off, p1.data(), n);
        ref.accumulate_power(inter.data() + off, p2.data(), n);
        for (std::size_t i = 0; i <= n; ++i) CHECK(close(p1[i], p2[i], 2));
      }
    }
  }
}

TEST_CASE("select pins the dispatch target") {
  const auto before = simd::active_isa();
  REQUIRE(simd::select(simd::Isa::scalar));
  CHECK(simd::active_isa() == simd::Isa::scalar);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(simd::dot(a, b) == 32.0);
  simd::select(before);
  CHECK(simd::active_isa() == before);
  for (auto isa : {simd::Isa::avx2, simd::Isa::neon})
    if (!simd::supported(isa)) CHECK_THROWS_AS(simd::kernels_for(isa), Error);
}
