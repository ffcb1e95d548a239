#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbm::cli {

enum ExitCode : int {
    kOk = 0,
    kOutputError = 1,
    kInputError = 2,
    kCompileError = 3,
    kGuardError = 4,
};

/// Aborts the current command with the given exit code.
class Exit : public std::runtime_error {
public:
    Exit(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& bytes);

/// Collects what a run read and wrote; `finish` emits manifest.json.
class Manifest {
public:
    Manifest(std::string command, std::vector<std::string> argv, std::filesystem::path output_dir);

    /// Reads an input file and records its hash.
    std::string read_input(const std::filesystem::path& path);
    /// Writes an output file (atomically) under the output directory.
    std::filesystem::path write_output(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& doc);

    nlohmann::json& config() { return config_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    void finish();

private:
    std::string command_;
    std::vector<std::string> argv_;
    std::filesystem::path output_dir_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
    nlohmann::json config_ = nlohmann::json::object();
    std::uint64_t seed_ = 0;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace lbm::cli
