#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lightts/errors.hpp"
#include "lightts/rng.hpp"
#include "lightts/sampling.hpp"

using namespace lightts;

namespace {

std::vector<double> column(const Matrix& m, std::size_t j) {
    std::vector<double> out;
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
    return out;
}

using V = std::vector<double>;

}  // namespace

TEST_CASE("continuous sampling takes consecutive runs") {
    const V w4{1, 2, 3, 4};
    const SampleMatrix a = continuous_sample(w4, 2);
    CHECK(a.kind == SampleKind::continuous);
    CHECK(column(a.data, 0) == V{1, 2});
    CHECK(column(a.data, 1) == V{3, 4});

    const V w6{1, 2, 3, 4, 5, 6};
    const SampleMatrix b = continuous_sample(w6, 3);
    CHECK(column(b.data, 0) == V{1, 2, 3});
    CHECK(column(b.data, 1) == V{4, 5, 6});

    const V w5{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(continuous_sample(w5, 2), ConfigError);
}

TEST_CASE("interval sampling takes strided tokens") {
    const V w4{1, 2, 3, 4};
    const SampleMatrix a = interval_sample(w4, 2);
    CHECK(a.kind == SampleKind::interval);
    CHECK(column(a.data, 0) == V{1, 3});
    CHECK(column(a.data, 1) == V{2, 4});

    const V w6{1, 2, 3, 4, 5, 6};
    const SampleMatrix b = interval_sample(w6, 3);
    CHECK(column(b.data, 0) == V{1, 3, 5});
    CHECK(column(b.data, 1) == V{2, 4, 6});

    const SampleMatrix c = interval_sample(w6, 1);
    CHECK(c.data.rows() == 1);
    CHECK(c.data.cols() == 6);
    CHECK(std::equal(w6.begin(), w6.end(), c.data.data().begin()));
}

TEST_CASE("sampling errors") {
    const V w5{1, 2, 3, 4, 5};
    try {
        interval_sample(w5, 2);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("T=5") != std::string::npos);
        CHECK(msg.find("C=2") != std::string::npos);
        CHECK(msg.find("1 5") != std::string::npos);
    }
    CHECK_THROWS_AS(continuous_sample(w5, 6), ShapeError);
    CHECK_THROWS_AS(continuous_sample(w5, 0), ShapeError);
    const V w1{1};
    CHECK_THROWS_AS(continuous_sample(w1, 1), ShapeError);
}

TEST_CASE("reconstruct degenerate 1xT continuous matrix") {
    SampleMatrix m{Matrix{{4, 5, 6, 7}}, 1, SampleKind::continuous};
    CHECK(reconstruct(m) == V{4, 5, 6, 7});
}

TEST_CASE("sampling laws hold on random windows") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t T = 2 + rng.below(255);
        const auto ds = divisors(T);
        const std::size_t C = ds[rng.below(ds.size())];
        V w(T);
        for (double& v : w) v = std::round(rng.uniform(-50, 50));  // ties are likely

        for (SampleKind kind : {SampleKind::continuous, SampleKind::interval}) {
            const SampleMatrix s = sample(w, C, kind);
            REQUIRE(s.data.rows() == C);
            REQUIRE(s.data.cols() == T / C);

            V sorted_w = w, sorted_s(s.data.data().begin(), s.data.data().end());
            std::sort(sorted_w.begin(), sorted_w.end());
            std::sort(sorted_s.begin(), sorted_s.end());
            CHECK(sorted_w == sorted_s);
            CHECK(reconstruct(s) == w);

            for (std::size_t i = 1; i <= C; ++i)
                for (std::size_t j = 1; j <= T / C; ++j) {
                    const std::size_t idx =
                        kind == SampleKind::continuous ? (j - 1) * C + i : j + (i - 1) * (T / C);
                    CHECK(s.data(i - 1, j - 1) == w[idx - 1]);
                }
        }
    }
}

TEST_CASE("continuous and interval agree only for C = 1 or C = T") {
    for (std::size_t T : {4u, 6u, 12u, 30u}) {
        V w(T);
        std::iota(w.begin(), w.end(), 1.0);
        for (std::size_t C : divisors(T)) {
            const bool same = continuous_sample(w, C).data == interval_sample(w, C).data;
            CHECK(same == (C == 1 || C == T));
        }
    }
}

TEST_CASE("default chunk is the divisor nearest sqrt(T)") {
    CHECK(default_chunk(96) == 8);   // sqrt 9.80: 8 (1.80) beats 12 (2.20)
    CHECK(default_chunk(48) == 6);   // sqrt 6.93: 6 (0.93) beats 8 (1.07)
    CHECK(default_chunk(16) == 4);
    CHECK(default_chunk(12) == 3);   // sqrt 3.46: 3 (0.46) beats 4 (0.54)
    CHECK(default_chunk(7) == 1);    // prime
    CHECK(default_chunk(6) == 2);    // sqrt 2.449: 2 (0.449) beats 3 (0.551)
}
