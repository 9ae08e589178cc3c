#include <doctest.h>

#include <numeric>

#include "lightts/errors.hpp"
#include "lightts/ieblock.hpp"
#include "oracles.hpp"

using namespace lightts;

namespace {

IEBlockParams hand_block() {
    IEBlockParams p = IEBlockParams::zeros({2, 2, 1, 2});
    p.wt.value = Matrix{{1}, {1}};
    p.wc.value = Matrix::identity(2);
    p.wo.value = Matrix{{1, 2}};
    return p;
}

// Sum of the output weighted by a fixed matrix; gradient of it is `r`.
double weighted_sum(const Matrix& out, const Matrix& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * r.data()[i];
    return s;
}

double block_grad_error(IEBlockParams& p, const Matrix& z_in, const Matrix& r, double slope) {
    ParamTensor z(z_in);
    p.zero_grads();
    const IEBlockResult fr = ieblock_forward(z.value, p, slope);
    z.grad = ieblock_backward(fr.cache, p, r);
    auto loss = [&] { return weighted_sum(ieblock_forward(z.value, p, slope).out, r); };
    std::vector<ParamTensor*> ps = p.trainable();
    ps.push_back(&z);
    return grad_check(loss, ps, 1e-5);
}

// Per-entry check: relative error below `rel`, or an absolute difference
// below `abs_floor` for gradients so small that the central difference is
// dominated by rounding (its error is about ulp(loss) / eps).
bool entries_match(IEBlockParams& p, const Matrix& z_in, const Matrix& r, double rel,
                   double abs_floor) {
    ParamTensor z(z_in);
    p.zero_grads();
    const IEBlockResult fr = ieblock_forward(z.value, p, 0.01);
    z.grad = ieblock_backward(fr.cache, p, r);
    auto loss = [&] { return weighted_sum(ieblock_forward(z.value, p, 0.01).out, r); };
    std::vector<ParamTensor*> ps = p.trainable();
    ps.push_back(&z);
    const double eps = 1e-5;
    for (ParamTensor* t : ps) {
        auto v = t->value.data();
        auto g = t->grad.data();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double saved = v[i];
            v[i] = saved + eps;
            const double up = loss();
            v[i] = saved - eps;
            const double down = loss();
            v[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double diff = std::abs(numeric - g[i]);
            if (diff > abs_floor && diff > rel * std::max(std::abs(numeric), std::abs(g[i])))
                return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("ieblock forward hand example") {
    const IEBlockParams p = hand_block();
    const IEBlockResult r = ieblock_forward(Matrix{{1, 2}, {3, 4}}, p, 0.01);
    CHECK(r.out == Matrix{{4, 6}, {8, 12}});
}

TEST_CASE("ieblock zero propagation and bias-only path") {
    Rng rng(4);
    IEBlockParams p = IEBlockParams::random({3, 4, 2, 5}, rng);
    CHECK(ieblock_forward(Matrix(3, 4), p, 0.01).out == Matrix(5, 4));

    IEBlockParams q = IEBlockParams::zeros({3, 4, 2, 5});
    q.bo.value.fill(5.0);
    const Matrix out = ieblock_forward(oracle::random_matrix(3, 4, rng), q, 0.01).out;
    CHECK(out == Matrix(5, 4, 5.0));
}

TEST_CASE("ieblock output shape is F x W for any H") {
    Rng rng(8);
    for (std::size_t H : {1u, 3u, 17u}) {
        const IEBlockParams p = IEBlockParams::random({H, 3, 2, 6}, rng);
        const Matrix out = ieblock_forward(oracle::random_matrix(H, 3, rng), p, 0.01).out;
        CHECK(out.rows() == 6);
        CHECK(out.cols() == 3);
    }
}

TEST_CASE("ieblock shape errors") {
    const IEBlockParams p = hand_block();
    CHECK_THROWS_AS(ieblock_forward(Matrix(3, 2), p, 0.01), ShapeError);
    IEBlockParams q = hand_block();
    const IEBlockResult r = ieblock_forward(Matrix(2, 2), q, 0.01);
    CHECK_THROWS_AS(ieblock_backward(r.cache, q, Matrix(1, 2)), ShapeError);
    CHECK_THROWS_AS(IEBlockParams::zeros({0, 1, 1, 1}), ShapeError);
}

TEST_CASE("ieblock backward: zero upstream and accumulation") {
    Rng rng(12);
    IEBlockParams p = IEBlockParams::random({4, 3, 2, 5}, rng);
    const Matrix z = oracle::random_matrix(4, 3, rng);
    const IEBlockResult fr = ieblock_forward(z, p, 0.01);

    p.zero_grads();
    CHECK(ieblock_backward(fr.cache, p, Matrix(5, 3)) == Matrix(4, 3));
    for (ParamTensor* t : p.all()) CHECK(t->grad == Matrix(t->value.rows(), t->value.cols()));

    const Matrix d = oracle::random_matrix(5, 3, rng);
    ieblock_backward(fr.cache, p, d);
    std::vector<Matrix> once;
    for (ParamTensor* t : p.all()) once.push_back(t->grad);
    ieblock_backward(fr.cache, p, d);
    auto all = p.all();
    for (std::size_t k = 0; k < all.size(); ++k)
        for (std::size_t i = 0; i < once[k].size(); ++i)
            CHECK(all[k]->grad.data()[i] == doctest::Approx(2.0 * once[k].data()[i]).epsilon(1e-14));
}

TEST_CASE("ieblock gradients on the hand block") {
    IEBlockParams p = hand_block();
    Rng rng(1);
    CHECK(block_grad_error(p, Matrix{{1, 2}, {3, 4}}, oracle::random_matrix(2, 2, rng), 0.01) <
          1e-4);
}

TEST_CASE("ieblock tiny random block gradient check, seed 1") {
    Rng rng(1);
    IEBlockParams p = IEBlockParams::random({2, 2, 1, 2}, rng);
    for (ParamTensor* t : p.all())
        for (double& v : t->value.data()) v = rng.uniform(-1, 1);
    const Matrix z = oracle::random_matrix(2, 2, rng);
    CHECK(block_grad_error(p, z, oracle::random_matrix(2, 2, rng), 0.01) < 1e-4);
}

TEST_CASE("ieblock gradient check on 50 random shapes") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const IEBlockShape s{1 + rng.below(5), 1 + rng.below(5), 1 + rng.below(5),
                             1 + rng.below(5)};
        IEBlockParams p = IEBlockParams::random(s, rng);
        for (ParamTensor* t : p.all())
            for (double& v : t->value.data()) v = rng.uniform(-1, 1);
        const Matrix z = oracle::random_matrix(s.H, s.W, rng);
        CAPTURE(trial);
        CHECK(entries_match(p, z, oracle::random_matrix(s.F, s.W, rng), 1e-4, 1e-9));
    }
}

TEST_CASE("frozen channel block: gradient check and no channel gradient") {
    Rng rng(21);
    IEBlockParams p = IEBlockParams::random({4, 3, 2, 3}, rng);
    p.freeze_channel();
    CHECK(p.trainable().size() == 4);
    const Matrix z = oracle::random_matrix(4, 3, rng);
    CHECK(block_grad_error(p, z, oracle::random_matrix(3, 3, rng), 0.01) < 1e-4);
    CHECK(p.wc.grad == Matrix(3, 3));
    CHECK(p.bc.grad == Matrix(1, 3));
    CHECK(p.wc.value == Matrix::identity(3));
}

TEST_CASE("temporal projection is shared across columns") {
    // With an identity channel stage, permuting input columns permutes the
    // output columns the same way, and each output column depends only on
    // its own input column.
    Rng rng(31);
    IEBlockParams p = IEBlockParams::random({5, 4, 3, 2}, rng);
    p.wc.value = Matrix::identity(4);
    p.bc.value.fill(0.0);
    for (double& v : p.wt.value.data()) v = std::abs(v);
    for (double& v : p.wo.value.data()) v = std::abs(v);
    const Matrix z = oracle::random_matrix(5, 4, rng, 0.0, 1.0);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    Matrix zp(5, 4);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) zp(i, j) = z(i, perm[j]);

    const Matrix out = ieblock_forward(z, p, 0.01).out;
    const Matrix outp = ieblock_forward(zp, p, 0.01).out;
    for (std::size_t f = 0; f < out.rows(); ++f)
        for (std::size_t j = 0; j < 4; ++j) CHECK(outp(f, j) == out(f, perm[j]));

    Matrix z2 = z;
    for (std::size_t i = 0; i < 5; ++i) z2(i, 1) += 0.5;
    const Matrix out2 = ieblock_forward(z2, p, 0.01).out;
    for (std::size_t f = 0; f < out.rows(); ++f)
        for (std::size_t j = 0; j < 4; ++j)
            if (j != 1) CHECK(out2(f, j) == out(f, j));
}

TEST_CASE("param_count") {
    CHECK(param_count({2, 2, 1, 2}) == 13);
    CHECK(param_count({1, 1, 1, 1}) == 6);
    // doubling W adds (2W)^2 + 2W - W^2 - W = 3W^2 + W, i.e. 14 at W = 2
    CHECK(param_count({2, 4, 1, 2}) - param_count({2, 2, 1, 2}) == 14);
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
        const IEBlockShape s{1 + rng.below(9), 1 + rng.below(9), 1 + rng.below(9),
                             1 + rng.below(9)};
        IEBlockParams p = IEBlockParams::zeros(s);
        std::uint64_t n = 0;
        for (ParamTensor* t : p.all()) n += t->value.size();
        CHECK(n == param_count(s));
    }
}

TEST_CASE("mac_count") {
    CHECK(mac_count({2, 2, 1, 2}).macs == 12);
    CHECK(mac_count({1, 1, 1, 1}).macs == 3);
    CHECK(mac_count({2, 2, 1, 2}, false).macs == 8);
}

TEST_CASE("mac_count equals an instrumented forward on random shapes") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const IEBlockShape s{1 + rng.below(7), 1 + rng.below(7), 1 + rng.below(7),
                             1 + rng.below(7)};
        IEBlockParams p = IEBlockParams::random(s, rng);
        const bool frozen = trial % 4 == 3;
        if (frozen) p.freeze_channel();
        const Matrix zm = oracle::random_matrix(s.H, s.W, rng);
        std::vector<std::vector<double>> z(s.H, std::vector<double>(s.W));
        for (std::size_t i = 0; i < s.H; ++i)
            for (std::size_t j = 0; j < s.W; ++j) z[i][j] = zm(i, j);
        std::uint64_t mults = 0;
        const auto ref = oracle::ieblock(z, p, 0.01, mults);
        CHECK(mults == mac_count(s, !frozen).macs);

        const Matrix out = ieblock_forward(zm, p, 0.01).out;
        for (std::size_t f = 0; f < s.F; ++f)
            for (std::size_t j = 0; j < s.W; ++j)
                CHECK(out(f, j) == doctest::Approx(ref[f][j]).epsilon(1e-12));
    }
}

TEST_CASE("bottleneck warnings") {
    CHECK(IEBlockShape{8, 4, 2, 16}.bottleneck_warnings().empty());
    CHECK(IEBlockShape{2, 4, 8, 4}.bottleneck_warnings().size() == 2);
}
