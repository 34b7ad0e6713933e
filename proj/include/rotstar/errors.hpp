#pragma once

#include <stdexcept>
#include <string>

namespace rotstar {

// Exit-code classes used by the CLI: config 2, solver 3, ambiguity 4.
class Error : public std::runtime_error {
public:
    Error(std::string type, const std::string& msg, int exit_code)
        : std::runtime_error(msg), type_(std::move(type)), exit_code_(exit_code) {}
    const std::string& type() const { return type_; }
    int exit_code() const { return exit_code_; }

private:
    std::string type_;
    int exit_code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("domain_error", m, 2) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& m) : Error("precondition_error", m, 2) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config_error", m, 2) {}
};
struct SolverError : Error {
    explicit SolverError(const std::string& m) : Error("solver_error", m, 3) {}
};
struct StepSizeError : Error {
    explicit StepSizeError(const std::string& m) : Error("step_size_error", m, 3) {}
};
struct ResolutionError : Error {
    explicit ResolutionError(const std::string& m) : Error("insufficient_resolution", m, 3) {}
};
struct AmbiguityError : Error {
    explicit AmbiguityError(const std::string& m) : Error("classification_ambiguity", m, 4) {}
};

}  // namespace rotstar
