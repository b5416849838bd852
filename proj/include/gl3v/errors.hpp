#pragma once

#include <stdexcept>
#include <string>

namespace gl3v {

// Base of every error raised by the library. Each subclass names one failure
// mode so callers (and the CLI exit-code mapping) can discriminate.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PoleError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ParityError : public Error { using Error::Error; };
class DivergenceError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class NonInvertibleError : public Error { using Error::Error; };
class CapExceededError : public Error { using Error::Error; };
class TableTooShortError : public Error { using Error::Error; };
class CacheError : public Error { using Error::Error; };
class ContourError : public Error { using Error::Error; };
class BudgetError : public Error { using Error::Error; };
class KernelSingularityError : public Error { using Error::Error; };

class ConfigError : public Error {
public:
    ConfigError(int line, const std::string& msg)
        : Error("config line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace gl3v
