#include "lightts/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "lightts/errors.hpp"

namespace lightts {

namespace fs = std::filesystem;

void save_checkpoint(const fs::path& dir, ModelParams& params) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    std::ofstream manifest(dir / kManifestFile, std::ios::binary);
    std::ofstream blob(dir / kBlobFile, std::ios::binary);
    if (!manifest || !blob) throw IoError("cannot write checkpoint in " + dir.string());

    std::uint64_t offset = 0;
    for (const NamedParam& p : params.named_all()) {
        const Matrix& v = p.tensor->value;
        manifest << p.name << ' ' << v.rows() << ' ' << v.cols() << ' ' << offset << '\n';
        for (double x : v.data()) {
            const auto bits = std::bit_cast<std::uint64_t>(x);
            char bytes[8];
            for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
            blob.write(bytes, 8);
        }
        offset += 8 * v.size();
    }
    if (!manifest || !blob) throw IoError("failed writing checkpoint in " + dir.string());
}

void load_checkpoint(const fs::path& dir, ModelParams& params) {
    std::ifstream manifest(dir / kManifestFile);
    std::ifstream blob(dir / kBlobFile, std::ios::binary);
    if (!manifest || !blob) throw IoError("cannot open checkpoint in " + dir.string());

    std::ostringstream buf;
    buf << blob.rdbuf();
    const std::string bytes = buf.str();

    auto expected = params.named_all();
    std::string line;
    std::size_t idx = 0;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string name;
        std::size_t rows = 0, cols = 0;
        std::uint64_t offset = 0;
        if (!(fields >> name >> rows >> cols >> offset))
            throw IoError("malformed manifest line: " + line);
        if (idx >= expected.size())
            throw ConfigError("checkpoint has extra array '" + name + "' not in this config");
        const NamedParam& p = expected[idx];
        Matrix& v = p.tensor->value;
        if (name != p.name || rows != v.rows() || cols != v.cols()) {
            throw ConfigError("checkpoint array '" + name + "' " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " does not match config array '" + p.name +
                              "' " + v.shape_str());
        }
        if (offset + 8 * v.size() > bytes.size())
            throw IoError("checkpoint blob truncated at array '" + name + "'");
        auto out = v.data();
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(
                            static_cast<unsigned char>(bytes[offset + 8 * i + b]))
                        << (8 * b);
            out[i] = std::bit_cast<double>(bits);
        }
        ++idx;
    }
    if (idx != expected.size())
        throw ConfigError("checkpoint is missing array '" + expected[idx].name + "'");
}

}  // namespace lightts
