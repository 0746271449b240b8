#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("clustab_test_" + std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
};

// Runs the built CLI with the given argument string, capturing stdout.
inline CliResult run_cli(const std::string& args, const TempDir& dir) {
    const std::string out_path = dir.file("cli_stdout.txt");
    const std::string cmd =
        std::string(CLUSTAB_BIN) + " " + args + " > " + out_path + " 2> " + dir.file("cli_stderr.txt");
    const int ret = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = (ret >= 0) ? ((ret >> 8) & 0xff) : -1;
    std::ifstream in(out_path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    return r;
}

inline std::string cli_stderr(const TempDir& dir) { return read_file(dir.file("cli_stderr.txt")); }

}  // namespace testutil
