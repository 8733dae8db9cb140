#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace twistop {

// runtime error carrying a stable machine-readable code
// ("validation-failed", "unvalidated-system", "point-outside-disc", ...)
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw error(code, message);
}

inline void require(bool cond, const std::string& code, const std::string& message) {
    if (!cond) fail(code, message);
}

}  // namespace twistop
