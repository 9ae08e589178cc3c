#include "lightts/model.hpp"

#include <cmath>

#include "lightts/errors.hpp"
#include "lightts/sampling.hpp"

namespace lightts {

std::string_view to_string(ForecastMode m) {
    return m == ForecastMode::multi_step ? "multi_step" : "single_step";
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::no_cp: return "no_cp";
        case Variant::no_is: return "no_is";
        case Variant::no_cs: return "no_cs";
    }
    return "full";
}

ForecastMode parse_mode(std::string_view s) {
    if (s == "multi_step") return ForecastMode::multi_step;
    if (s == "single_step") return ForecastMode::single_step;
    throw ConfigError("unknown forecast mode '" + std::string(s) +
                      "' (expected multi_step or single_step)");
}

Variant parse_variant(std::string_view s) {
    if (s == "full") return Variant::full;
    if (s == "no_cp") return Variant::no_cp;
    if (s == "no_is") return Variant::no_is;
    if (s == "no_cs") return Variant::no_cs;
    throw ConfigError("unknown ablation '" + std::string(s) +
                      "' (expected full, no_cp, no_is or no_cs)");
}

std::string Ablation::str() const {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ',';
        out += name;
    };
    add(no_cp, "no_cp");
    add(no_is, "no_is");
    add(no_cs, "no_cs");
    return out.empty() ? "full" : out;
}

void LightTSConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be >= 1");
    };
    positive(N, "N");
    positive(L, "L");
    positive(F, "F");
    positive(Fp_ab, "Fp_ab");
    positive(Fp_c, "Fp_c");
    if (T < 2) throw ConfigError("T must be >= 2");
    check_chunk(T, C);
    if (!(slope > 0.0 && slope < 1.0)) throw ConfigError("slope must lie in (0, 1)");
    if (ablation.no_is && ablation.no_cs)
        throw ConfigError("ablations no_is and no_cs cannot be combined (no sampling branch left)");
}

IEBlockShape LightTSConfig::block_ab_shape() const { return {C, T / C, Fp_ab, F}; }

IEBlockShape LightTSConfig::block_c_shape() const {
    const std::size_t branches = (has_continuous() ? 1 : 0) + (has_interval() ? 1 : 0);
    return {branches * F, N, Fp_c, output_len()};
}

LightTSConfig build_ablation(const LightTSConfig& base, Variant variant) {
    LightTSConfig cfg = base;
    switch (variant) {
        case Variant::full: break;
        case Variant::no_cp: cfg.ablation.no_cp = true; break;
        case Variant::no_is: cfg.ablation.no_is = true; break;
        case Variant::no_cs: cfg.ablation.no_cs = true; break;
    }
    cfg.validate();
    return cfg;
}

std::vector<NamedParam> ModelParams::named_all() {
    std::vector<NamedParam> out;
    auto add_block = [&](const std::string& prefix, IEBlockParams& p) {
        auto tensors = p.all();
        for (std::size_t i = 0; i < tensors.size(); ++i)
            out.push_back({prefix + "." + IEBlockParams::names()[i], tensors[i]});
    };
    if (block_a) add_block("block_a", *block_a);
    if (block_b) add_block("block_b", *block_b);
    if (down_a) {
        out.push_back({"down_a.w", &down_a->w});
        out.push_back({"down_a.b", &down_a->b});
    }
    if (down_b) {
        out.push_back({"down_b.w", &down_b->w});
        out.push_back({"down_b.b", &down_b->b});
    }
    add_block("block_c", block_c);
    return out;
}

std::vector<NamedParam> ModelParams::named_trainable() {
    std::vector<NamedParam> out;
    for (auto& np : named_all()) {
        if (block_c.channel_frozen && (np.tensor == &block_c.wc || np.tensor == &block_c.bc))
            continue;
        out.push_back(np);
    }
    return out;
}

std::vector<ParamTensor*> ModelParams::trainable() {
    std::vector<ParamTensor*> out;
    for (auto& np : named_trainable()) out.push_back(np.tensor);
    return out;
}

std::uint64_t ModelParams::trainable_count() {
    std::uint64_t n = 0;
    for (ParamTensor* t : trainable()) n += t->value.size();
    return n;
}

void ModelParams::zero_grads() {
    for (auto& np : named_all()) np.tensor->zero_grad();
}

ModelParams zero_params(const LightTSConfig& cfg) {
    cfg.validate();
    ModelParams p;
    const IEBlockShape ab = cfg.block_ab_shape();
    const std::size_t w = cfg.subseq_count();
    if (cfg.has_continuous()) {
        p.block_a = IEBlockParams::zeros(ab);
        p.down_a = DownProjection{ParamTensor(w, 1), ParamTensor(1, 1)};
    }
    if (cfg.has_interval()) {
        p.block_b = IEBlockParams::zeros(ab);
        p.down_b = DownProjection{ParamTensor(w, 1), ParamTensor(1, 1)};
    }
    p.block_c = IEBlockParams::zeros(cfg.block_c_shape());
    if (cfg.ablation.no_cp) p.block_c.freeze_channel();
    return p;
}

ModelParams init_params(const LightTSConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng = seeded_rng(seed, Stream::init);
    ModelParams p;
    const IEBlockShape ab = cfg.block_ab_shape();
    const std::size_t w = cfg.subseq_count();
    auto random_down = [&] {
        DownProjection d{ParamTensor(w, 1), ParamTensor(1, 1)};
        const double bound = std::sqrt(1.0 / static_cast<double>(w));
        for (double& v : d.w.value.data()) v = rng.uniform(-bound, bound);
        return d;
    };
    if (cfg.has_continuous()) p.block_a = IEBlockParams::random(ab, rng);
    if (cfg.has_interval()) p.block_b = IEBlockParams::random(ab, rng);
    if (cfg.has_continuous()) p.down_a = random_down();
    if (cfg.has_interval()) p.down_b = random_down();
    p.block_c = IEBlockParams::random(cfg.block_c_shape(), rng);
    if (cfg.ablation.no_cp) p.block_c.freeze_channel();
    return p;
}

std::uint64_t trainable_param_count(const LightTSConfig& cfg) {
    cfg.validate();
    const IEBlockShape ab = cfg.block_ab_shape();
    const std::uint64_t branch = param_count(ab) + cfg.subseq_count() + 1;
    std::uint64_t n = 0;
    if (cfg.has_continuous()) n += branch;
    if (cfg.has_interval()) n += branch;
    const IEBlockShape c = cfg.block_c_shape();
    n += param_count(c);
    if (cfg.ablation.no_cp) n -= c.W * c.W + c.W;
    return n;
}

namespace {

struct BranchOut {
    Matrix block_out;
    IEBlockCache cache;
    Matrix features;  // F x 1
};

BranchOut run_branch(std::span<const double> series, const LightTSConfig& cfg, SampleKind kind,
                     const IEBlockParams& block, const DownProjection& down) {
    const SampleMatrix s = sample(series, cfg.C, kind);
    IEBlockResult r = ieblock_forward(s.data, block, cfg.slope);
    Matrix f = affine_forward(r.out, down.w.value, down.b.value);
    return {std::move(r.out), std::move(r.cache), std::move(f)};
}

// Scatters dZ (C x T/C) of one sampled series back onto the window row.
void scatter_sample_grad(const Matrix& dz, SampleKind kind, std::size_t chunk,
                         std::span<double> d_row) {
    const std::size_t length = d_row.size();
    for (std::size_t i = 0; i < dz.rows(); ++i)
        for (std::size_t j = 0; j < dz.cols(); ++j)
            d_row[source_index(kind, length, chunk, i, j)] += dz(i, j);
}

}  // namespace

ForwardResult forward(const ModelParams& params, const LightTSConfig& cfg, const Matrix& window) {
    if (window.rows() != cfg.N || window.cols() != cfg.T) {
        throw ShapeError("forward: window " + window.shape_str() + " does not match N x T = " +
                         std::to_string(cfg.N) + "x" + std::to_string(cfg.T));
    }
    ForwardResult res;
    ModelCache& cache = res.cache;
    const std::size_t F = cfg.F;
    Matrix part2(cfg.block_c_shape().H, cfg.N);

    for (std::size_t n = 0; n < cfg.N; ++n) {
        const auto series = window.row_span(n);
        std::size_t row0 = 0;
        if (cfg.has_continuous()) {
            BranchOut a =
                run_branch(series, cfg, SampleKind::continuous, *params.block_a, *params.down_a);
            for (std::size_t f = 0; f < F; ++f) part2(row0 + f, n) = a.features(f, 0);
            row0 += F;
            cache.a.push_back(std::move(a.cache));
            cache.a_out.push_back(std::move(a.block_out));
        }
        if (cfg.has_interval()) {
            BranchOut b =
                run_branch(series, cfg, SampleKind::interval, *params.block_b, *params.down_b);
            for (std::size_t f = 0; f < F; ++f) part2(row0 + f, n) = b.features(f, 0);
            cache.b.push_back(std::move(b.cache));
            cache.b_out.push_back(std::move(b.block_out));
        }
    }

    IEBlockResult c = ieblock_forward(part2, params.block_c, cfg.slope);
    res.forecast = std::move(c.out);
    cache.c = std::move(c.cache);
    return res;
}

Matrix backward(const ModelCache& cache, ModelParams& params, const LightTSConfig& cfg,
                const Matrix& d_forecast) {
    if (d_forecast.rows() != cfg.output_len() || d_forecast.cols() != cfg.N) {
        throw ShapeError("backward: upstream gradient " + d_forecast.shape_str() +
                         " does not match forecast " + std::to_string(cfg.output_len()) + "x" +
                         std::to_string(cfg.N));
    }
    const Matrix d_part2 = ieblock_backward(cache.c, params.block_c, d_forecast);
    const std::size_t F = cfg.F;
    Matrix d_window(cfg.N, cfg.T);

    auto branch_back = [&](std::size_t n, std::size_t row0, const Matrix& block_out,
                           const IEBlockCache& block_cache, IEBlockParams& block,
                           DownProjection& down, SampleKind kind) {
        Matrix d_feat(F, 1);
        for (std::size_t f = 0; f < F; ++f) d_feat(f, 0) = d_part2(row0 + f, n);
        const Matrix d_block_out = affine_backward_accumulate(block_out, down.w.value, d_feat,
                                                              &down.w.grad, &down.b.grad);
        const Matrix dz = ieblock_backward(block_cache, block, d_block_out);
        scatter_sample_grad(dz, kind, cfg.C, d_window.row_span(n));
    };

    for (std::size_t n = 0; n < cfg.N; ++n) {
        std::size_t row0 = 0;
        if (cfg.has_continuous()) {
            branch_back(n, row0, cache.a_out[n], cache.a[n], *params.block_a, *params.down_a,
                        SampleKind::continuous);
            row0 += F;
        }
        if (cfg.has_interval()) {
            branch_back(n, row0, cache.b_out[n], cache.b[n], *params.block_b, *params.down_b,
                        SampleKind::interval);
        }
    }
    return d_window;
}

OpCount model_mac_count(const LightTSConfig& cfg) {
    cfg.validate();
    const IEBlockShape ab = cfg.block_ab_shape();
    OpCount branch = mac_count(ab);
    // down-projection: F rows, each a dot product of length T/C plus one bias
    branch.macs += cfg.F * cfg.subseq_count();
    branch.adds += cfg.F;

    OpCount total;
    for (std::size_t n = 0; n < cfg.N; ++n) {
        if (cfg.has_continuous()) total += branch;
        if (cfg.has_interval()) total += branch;
    }
    total += mac_count(cfg.block_c_shape(), !cfg.ablation.no_cp);
    return total;
}

}  // namespace lightts
