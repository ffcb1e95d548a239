#include "cli_support.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <unistd.h>

namespace lbm::cli {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Exit(kInputError, "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw Exit(kOutputError, "cannot write '" + path.string() + "'");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Exit(kOutputError, "cannot move output into place at '" + path.string() + "'");
    }
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

Manifest::Manifest(std::string command, std::vector<std::string> argv, fs::path output_dir)
    : command_(std::move(command)),
      argv_(std::move(argv)),
      output_dir_(std::move(output_dir)),
      start_(std::chrono::steady_clock::now()) {}

std::string Manifest::read_input(const fs::path& path) {
    std::string text = read_file(path);
    inputs_[path.string()] = sha256_hex(text);
    return text;
}

fs::path Manifest::write_output(const std::string& name, const std::string& content) {
    const fs::path path = output_dir_ / name;
    write_atomic(path, content);
    outputs_.push_back(path.string());
    return path;
}

void Manifest::write_json(const std::string& name, const nlohmann::json& doc) { write_output(name, doc.dump(2) + "\n"); }

void Manifest::finish() {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [path, hash] : inputs_) inputs.push_back({{"path", path}, {"sha256", hash}});
    const nlohmann::json doc{
        {"tool", "lbm"},
        {"version", LBM_VERSION},
        {"command", command_},
        {"argv", argv_},
        {"inputs", inputs},
        {"config", config_},
        {"seed", seed_},
        {"wall_clock_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()},
        {"outputs", outputs_},
    };
    write_atomic(output_dir_ / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace lbm::cli
