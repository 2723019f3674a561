#pragma once

#include <stdexcept>
#include <string>

namespace rss_sentry {

// Error taxonomy mirrors the CLI / C API status contract:
//   DomainError  -> invalid parameter values          (status 1)
//   IoError      -> file parse / write failures       (status 2)
//   NumericError -> singular FIM, non-finite sums,
//                   degenerate likelihoods            (status 3)
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// FIM could not be inverted at the requested operating point.
class SingularFimError : public NumericError {
public:
    explicit SingularFimError(const std::string& msg, double condition = 0.0)
        : NumericError(msg), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

// Likelihood carries no information about the parameters
// (sigma = 0, or an all-constant one-bit trace).
class UnidentifiableError : public NumericError {
public:
    explicit UnidentifiableError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace rss_sentry
