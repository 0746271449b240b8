#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace clustab {

// Runtime failure tagged with the subsystem that raised it. The CLI prints
// what() verbatim and maps any Error to exit code 1.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string message)
        : std::runtime_error(module + ": " + message),
          module_(std::move(module)),
          message_(std::move(message)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string module_;
    std::string message_;
};

// Bad experiment/CLI configuration; mapped to exit code 2 by the CLI.
class ConfigError : public Error {
public:
    explicit ConfigError(std::string message) : Error("config", std::move(message)) {}
};

}  // namespace clustab
