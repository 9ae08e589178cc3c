#include "lightts/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lightts/errors.hpp"
#include "lightts/sampling.hpp"

namespace lightts {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

class KeyValues {
public:
    void set(const std::string& key, std::string value, std::size_t line) {
        if (entries_.count(key)) {
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        }
        entries_[key] = {std::move(value), line, false};
    }

    const Entry* find(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    void reject_unknown() const {
        for (const auto& [key, e] : entries_)
            if (!e.used)
                throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + key + "'");
    }

private:
    std::map<std::string, Entry> entries_;
};

[[noreturn]] void bad_value(const std::string& key, const Entry& e, const char* what) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " = '" + e.value +
                      "' is not " + what);
}

void read(KeyValues& kv, const std::string& key, std::string& out) {
    if (const Entry* e = kv.find(key)) out = e->value;
}

void read(KeyValues& kv, const std::string& key, double& out) {
    const Entry* e = kv.find(key);
    if (!e) return;
    const std::string& s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, *e, "a number");
}

template <class Int>
void read_int(KeyValues& kv, const std::string& key, Int& out) {
    const Entry* e = kv.find(key);
    if (!e) return;
    const std::string& s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
        bad_value(key, *e, "a non-negative integer");
}

void read(KeyValues& kv, const std::string& key, bool& out) {
    const Entry* e = kv.find(key);
    if (!e) return;
    if (e->value == "true") out = true;
    else if (e->value == "false") out = false;
    else bad_value(key, *e, "true or false");
}

const Entry& require(KeyValues& kv, const std::string& key) {
    const Entry* e = kv.find(key);
    if (!e) throw ConfigError("missing required key '" + key + "'");
    return *e;
}

Ablation parse_ablation(std::string_view s) {
    Ablation a;
    if (trim(s) == "full") return a;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = std::min(s.find(',', start), s.size());
        const std::string_view item = trim(s.substr(start, comma - start));
        switch (parse_variant(item)) {
            case Variant::full: break;
            case Variant::no_cp: a.no_cp = true; break;
            case Variant::no_is: a.no_is = true; break;
            case Variant::no_cs: a.no_cs = true; break;
        }
        start = comma + 1;
    }
    return a;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    KeyValues kv;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "data" && section != "model" && section != "train" && section != "eval")
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        kv.set(section.empty() ? key : section + "." + key, std::string(value), line_no);
    }

    ExperimentConfig cfg;
    read(kv, "name", cfg.name);

    cfg.data.path = require(kv, "data.path").value;
    if (!base_dir.empty() && std::filesystem::path(cfg.data.path).is_relative())
        cfg.data.path = (base_dir / cfg.data.path).lexically_normal().string();
    if (const Entry* e = kv.find("data.split")) cfg.data.split = SplitSpec::parse(e->value);
    read(kv, "data.granularity", cfg.data.granularity);

    LightTSConfig& m = cfg.model;
    require(kv, "model.T");
    read_int(kv, "model.T", m.T);
    require(kv, "model.L");
    read_int(kv, "model.L", m.L);
    m.mode = parse_mode(require(kv, "model.mode").value);
    if (kv.find("model.C")) {
        read_int(kv, "model.C", m.C);
        cfg.chunk_given = true;
    } else {
        m.C = default_chunk(m.T);
    }
    read_int(kv, "model.F", m.F);
    read_int(kv, "model.fp_ab", m.Fp_ab);
    read_int(kv, "model.fp_c", m.Fp_c);
    read(kv, "model.slope", m.slope);
    if (const Entry* e = kv.find("model.ablation")) m.ablation = parse_ablation(e->value);

    TrainConfig& t = cfg.train;
    read(kv, "train.lr", t.lr);
    read(kv, "train.beta1", t.beta1);
    read(kv, "train.beta2", t.beta2);
    read(kv, "train.eps_adam", t.eps_adam);
    read_int(kv, "train.batch_size", t.batch_size);
    read_int(kv, "train.max_epochs", t.max_epochs);
    read_int(kv, "train.patience", t.patience);
    read_int(kv, "train.seed", t.seed);
    read(kv, "train.shuffle", t.shuffle);
    read(kv, "train.clip_norm", t.clip_norm);
    read_int(kv, "train.max_steps", t.max_steps);

    if (const Entry* e = kv.find("eval.long_scale")) cfg.eval.long_scale = parse_scale(e->value);
    if (const Entry* e = kv.find("eval.short_scale")) cfg.eval.short_scale = parse_scale(e->value);

    kv.reject_unknown();

    if (m.T < 2) throw ConfigError("T must be >= 2");
    check_chunk(m.T, m.C);
    if (m.ablation.no_is && m.ablation.no_cs)
        throw ConfigError("ablations no_is and no_cs cannot be combined");
    t.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string to_config_text(const ExperimentConfig& cfg) {
    const LightTSConfig& m = cfg.model;
    const TrainConfig& t = cfg.train;
    std::ostringstream out;
    out << "name = " << quote(cfg.name) << "\n\n";
    out << "[data]\n";
    out << "path = " << quote(cfg.data.path) << "\n";
    out << "split = " << quote(cfg.data.split.name()) << "\n";
    out << "granularity = " << quote(cfg.data.granularity) << "\n\n";
    out << "[model]\n";
    out << "T = " << m.T << "\n";
    out << "L = " << m.L << "\n";
    out << "mode = " << quote(std::string(to_string(m.mode))) << "\n";
    out << "C = " << m.C << "\n";
    out << "F = " << m.F << "\n";
    out << "fp_ab = " << m.Fp_ab << "\n";
    out << "fp_c = " << m.Fp_c << "\n";
    out << "slope = " << num(m.slope) << "\n";
    out << "ablation = " << quote(m.ablation.str()) << "\n\n";
    out << "[train]\n";
    out << "lr = " << num(t.lr) << "\n";
    out << "beta1 = " << num(t.beta1) << "\n";
    out << "beta2 = " << num(t.beta2) << "\n";
    out << "eps_adam = " << num(t.eps_adam) << "\n";
    out << "batch_size = " << t.batch_size << "\n";
    out << "max_epochs = " << t.max_epochs << "\n";
    out << "patience = " << t.patience << "\n";
    out << "seed = " << t.seed << "\n";
    out << "shuffle = " << (t.shuffle ? "true" : "false") << "\n";
    out << "clip_norm = " << num(t.clip_norm) << "\n";
    out << "max_steps = " << t.max_steps << "\n\n";
    out << "[eval]\n";
    out << "long_scale = " << quote(std::string(to_string(cfg.eval.long_scale))) << "\n";
    out << "short_scale = " << quote(std::string(to_string(cfg.eval.short_scale))) << "\n";
    return out.str();
}

}  // namespace lightts
