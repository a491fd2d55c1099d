#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace imlambda {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside the domain where a model or formula is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

// A solve, search or fit that did not produce a trustworthy result.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, double condition_estimate = 0.0)
        : Error(what), condition_estimate_(condition_estimate) {}
    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

// Drive parameters for which no balanced-rate operating point exists.
class NotMatchableError : public DomainError {
public:
    using DomainError::DomainError;
};

class FitError : public NumericalError {
public:
    FitError(const std::string& what, std::vector<double> last_params, std::vector<double> cost_history)
        : NumericalError(what), last_params_(std::move(last_params)), cost_history_(std::move(cost_history)) {}
    const std::vector<double>& last_params() const noexcept { return last_params_; }
    const std::vector<double>& cost_history() const noexcept { return cost_history_; }

private:
    std::vector<double> last_params_;
    std::vector<double> cost_history_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0)
        : Error(format(what, key, line)), key_(std::move(key)), line_(line) {}
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& what, const std::string& key, int line) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + what;
    }
    std::string key_;
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace imlambda
