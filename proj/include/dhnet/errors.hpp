#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dhnet {

// Raised when a scenario or input file fails validation. Carries all
// collected messages, each prefixed with the config field path.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<std::string> messages)
        : std::runtime_error(join(messages)), messages_(std::move(messages)) {}

    explicit ValidationError(const std::string& message)
        : ValidationError(std::vector<std::string>{message}) {}

    const std::vector<std::string>& messages() const { return messages_; }

  private:
    static std::string join(const std::vector<std::string>& msgs) {
        std::string out;
        for (const auto& m : msgs) {
            if (!out.empty()) out += "\n";
            out += m;
        }
        return out;
    }

    std::vector<std::string> messages_;
};

// Raised for failures during integration (non-finite state, step underflow).
class EngineError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace dhnet
