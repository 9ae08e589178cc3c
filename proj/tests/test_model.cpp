#include <doctest.h>

#include "lightts/errors.hpp"
#include "lightts/model.hpp"
#include "oracles.hpp"

using namespace lightts;

namespace {

LightTSConfig tiny(Variant v = Variant::full) {
    LightTSConfig c;
    c.N = 3;
    c.T = 8;
    c.C = 2;
    c.F = 4;
    c.Fp_ab = 2;
    c.Fp_c = 2;
    c.L = 2;
    return build_ablation(c, v);
}

double weighted_sum(const Matrix& out, const Matrix& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * r.data()[i];
    return s;
}

double model_grad_error(const LightTSConfig& cfg, std::uint64_t seed) {
    ModelParams p = init_params(cfg, seed);
    Rng rng(seed + 100);
    // redraw until no pre-activation sits within 1e-4 of the rectifier corner
    ParamTensor x(oracle::random_matrix(cfg.N, cfg.T, rng));
    for (int k = 0; k < 100 && oracle::min_abs_preactivation(forward(p, cfg, x.value).cache, p) < 1e-4;
         ++k)
        x.value = oracle::random_matrix(cfg.N, cfg.T, rng);
    REQUIRE(oracle::min_abs_preactivation(forward(p, cfg, x.value).cache, p) >= 1e-4);
    const Matrix r = oracle::random_matrix(cfg.output_len(), cfg.N, rng);
    p.zero_grads();
    const ForwardResult fr = forward(p, cfg, x.value);
    x.grad = backward(fr.cache, p, cfg, r);
    auto loss = [&] { return weighted_sum(forward(p, cfg, x.value).forecast, r); };
    std::vector<ParamTensor*> ps = p.trainable();
    ps.push_back(&x);
    return grad_check(loss, ps, 1e-5);
}

}  // namespace

TEST_CASE("forecast shape laws") {
    LightTSConfig c;
    c.N = 7;
    c.T = 96;
    c.C = 8;
    c.L = 24;
    Rng rng(3);
    const Matrix w = oracle::random_matrix(7, 96, rng);
    const Matrix f = forward(init_params(c, 0), c, w).forecast;
    CHECK(f.rows() == 24);
    CHECK(f.cols() == 7);

    c.mode = ForecastMode::single_step;
    const Matrix s = forward(init_params(c, 0), c, w).forecast;
    CHECK(s.rows() == 1);
    CHECK(s.cols() == 7);

    CHECK_THROWS_AS(forward(init_params(c, 0), c, Matrix(6, 96)), ShapeError);
}

TEST_CASE("zero params give a zero forecast and zero upstream gives zero grads") {
    const LightTSConfig c = tiny();
    ModelParams z = zero_params(c);
    Rng rng(5);
    const Matrix w = oracle::random_matrix(c.N, c.T, rng, -10, 10);
    CHECK(forward(z, c, w).forecast == Matrix(c.output_len(), c.N));

    ModelParams p = init_params(c, 1);
    p.zero_grads();
    const ForwardResult fr = forward(p, c, w);
    const Matrix dx = backward(fr.cache, p, c, Matrix(c.output_len(), c.N));
    CHECK(dx == Matrix(c.N, c.T));
    for (const NamedParam& np : p.named_all())
        CHECK(np.tensor->grad == Matrix(np.tensor->value.rows(), np.tensor->value.cols()));
}

TEST_CASE("end-to-end gradient check on the tiny config, all variants") {
    for (Variant v : {Variant::full, Variant::no_cp, Variant::no_is, Variant::no_cs}) {
        CAPTURE(to_string(v));
        CHECK(model_grad_error(tiny(v), 7) < 1e-4);
    }
    LightTSConfig s = tiny();
    s.mode = ForecastMode::single_step;
    CHECK(model_grad_error(s, 8) < 1e-4);
}

TEST_CASE("no_cp: block C channel weights stay identity and get no gradient") {
    const LightTSConfig c = tiny(Variant::no_cp);
    ModelParams p = init_params(c, 2);
    CHECK(p.block_c.wc.value == Matrix::identity(c.N));
    CHECK(p.block_c.bc.value == Matrix(1, c.N));
    Rng rng(9);
    const Matrix w = oracle::random_matrix(c.N, c.T, rng);
    p.zero_grads();
    const ForwardResult fr = forward(p, c, w);
    backward(fr.cache, p, c, oracle::random_matrix(c.output_len(), c.N, rng));
    CHECK(p.block_c.wc.grad == Matrix(c.N, c.N));
    CHECK(p.block_c.bc.grad == Matrix(1, c.N));
    for (const NamedParam& np : p.named_trainable()) {
        CHECK(np.name != "block_c.wc");
        CHECK(np.name != "block_c.bc");
    }
}

TEST_CASE("series independence under no_cp") {
    const LightTSConfig c = tiny(Variant::no_cp);
    const ModelParams p = init_params(c, 4);
    Rng rng(10);
    const Matrix w = oracle::random_matrix(c.N, c.T, rng);
    const Matrix f = forward(p, c, w).forecast;
    for (std::size_t n = 0; n < c.N; ++n) {
        Matrix w2 = w;
        for (std::size_t t = 0; t < c.T; ++t) w2(n, t) = 0.0;
        const Matrix f2 = forward(p, c, w2).forecast;
        for (std::size_t l = 0; l < f.rows(); ++l)
            for (std::size_t j = 0; j < c.N; ++j)
                if (j != n) CHECK(f2(l, j) == f(l, j));
    }
}

TEST_CASE("permuting series with consistently permuted channel weights permutes the forecast") {
    for (std::size_t N : {2u, 3u, 4u}) {
        LightTSConfig c = tiny();
        c.N = N;
        ModelParams p = init_params(c, 11);
        Rng rng(12 + N);
        for (double& v : p.block_c.bc.value.data()) v = rng.uniform(-0.5, 0.5);
        const Matrix w = oracle::random_matrix(N, c.T, rng);

        std::vector<std::size_t> perm(N);
        for (std::size_t i = 0; i < N; ++i) perm[i] = (i + 1) % N;
        // new series i is old series perm[i]
        Matrix wp(N, c.T);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t t = 0; t < c.T; ++t) wp(i, t) = w(perm[i], t);
        ModelParams q = p;
        for (std::size_t i = 0; i < N; ++i) {
            q.block_c.bc.value(0, i) = p.block_c.bc.value(0, perm[i]);
            for (std::size_t j = 0; j < N; ++j)
                q.block_c.wc.value(i, j) = p.block_c.wc.value(perm[i], perm[j]);
        }
        const Matrix f = forward(p, c, w).forecast;
        const Matrix fp = forward(q, c, wp).forecast;
        for (std::size_t l = 0; l < f.rows(); ++l)
            for (std::size_t i = 0; i < N; ++i)
                CHECK(fp(l, i) == doctest::Approx(f(l, perm[i])).epsilon(1e-12));
    }
}

TEST_CASE("init determinism") {
    const LightTSConfig c = tiny();
    ModelParams a = init_params(c, 3), b = init_params(c, 3), d = init_params(c, 4);
    auto na = a.named_all(), nb = b.named_all(), nd = d.named_all();
    REQUIRE(na.size() == nb.size());
    bool any_diff = false;
    for (std::size_t k = 0; k < na.size(); ++k) {
        CHECK(na[k].tensor->value == nb[k].tensor->value);
        if (!(na[k].tensor->value == nd[k].tensor->value)) any_diff = true;
    }
    CHECK(any_diff);

    // weights within +-sqrt(1/fan_in), biases zero
    for (const NamedParam& np : na) {
        const Matrix& m = np.tensor->value;
        const bool is_bias = np.name.ends_with(".bt") || np.name.ends_with(".bc") ||
                             np.name.ends_with(".bo") || np.name.ends_with(".b");
        const double bound = std::sqrt(1.0 / static_cast<double>(m.rows()));
        for (double v : m.data()) {
            if (is_bias)
                CHECK(v == 0.0);
            else
                CHECK(std::abs(v) <= bound);
        }
    }
}

TEST_CASE("model params layout follows the ablation") {
    ModelParams full = init_params(tiny(), 0);
    CHECK(full.block_a.has_value());
    CHECK(full.block_b.has_value());
    CHECK(full.block_c.shape.H == 8);
    ModelParams nis = init_params(tiny(Variant::no_is), 0);
    CHECK(!nis.block_b.has_value());
    CHECK(!nis.down_b.has_value());
    CHECK(nis.block_c.shape.H == 4);
    ModelParams ncs = init_params(tiny(Variant::no_cs), 0);
    CHECK(!ncs.block_a.has_value());
    CHECK(!ncs.down_a.has_value());
}

TEST_CASE("build_ablation") {
    const LightTSConfig base = tiny();
    CHECK(build_ablation(base, Variant::full).ablation.empty());
    CHECK(build_ablation(base, Variant::no_cp).ablation.no_cp);
    const LightTSConfig nis = build_ablation(base, Variant::no_is);
    CHECK_THROWS_AS(build_ablation(nis, Variant::no_cs), ConfigError);
}

TEST_CASE("trainable parameter counts") {
    const LightTSConfig c = tiny();
    for (Variant v : {Variant::full, Variant::no_cp, Variant::no_is, Variant::no_cs}) {
        ModelParams p = init_params(tiny(v), 0);
        CHECK(p.trainable_count() == trainable_param_count(tiny(v)));
    }
    const std::uint64_t full = trainable_param_count(c);
    CHECK(full - trainable_param_count(tiny(Variant::no_cp)) == c.N * c.N + c.N);
    CHECK(trainable_param_count(tiny(Variant::no_is)) < full);
    CHECK(trainable_param_count(tiny(Variant::no_cs)) < full);
}

TEST_CASE("model_mac_count equals an instrumented forward") {
    for (Variant v : {Variant::full, Variant::no_cp, Variant::no_is, Variant::no_cs}) {
        const LightTSConfig c = tiny(v);
        const ModelParams p = init_params(c, 1);
        Rng rng(2);
        const Matrix w = oracle::random_matrix(c.N, c.T, rng);
        std::uint64_t mults = 0;
        const Matrix ref = oracle::model(p, c, w, mults);
        CAPTURE(to_string(v));
        CHECK(mults == model_mac_count(c).macs);
        const Matrix f = forward(p, c, w).forecast;
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(f.data()[i] == doctest::Approx(ref.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("model_mac_count under ablation and special shapes") {
    const LightTSConfig c = tiny();
    const std::uint64_t ab = mac_count(c.block_ab_shape()).macs;
    const std::uint64_t down = c.F * (c.T / c.C);
    const std::uint64_t full = model_mac_count(c).macs;
    CHECK(full == c.N * 2 * (ab + down) + mac_count(c.block_c_shape()).macs);

    const LightTSConfig nis = tiny(Variant::no_is);
    CHECK(nis.block_c_shape().H == c.F);
    CHECK(model_mac_count(nis).macs == c.N * (ab + down) + mac_count(nis.block_c_shape()).macs);

    // one sub-sequence: the A/B channel projection is Fp_ab * 1 * 1
    LightTSConfig one = c;
    one.C = one.T;
    const IEBlockShape s = one.block_ab_shape();
    CHECK(s.W == 1);
    CHECK(mac_count(s).macs - mac_count(s, false).macs == one.Fp_ab);

    // doubling N multiplies the block C channel term by four
    LightTSConfig big = c;
    big.N = 2 * c.N;
    auto channel = [](const LightTSConfig& k) {
        return mac_count(k.block_c_shape()).macs - mac_count(k.block_c_shape(), false).macs;
    };
    CHECK(channel(big) == 4 * channel(c));
}
