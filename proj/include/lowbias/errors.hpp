#pragma once

#include <stdexcept>
#include <string>

namespace lowbias {

// Thrown when a requested quantity needs inputs that were not supplied
// (e.g. a correction term whose derivative-moment entry is missing).
// Missing entries are never treated as zero.
class unavailable_error : public std::runtime_error {
public:
    explicit unavailable_error(const std::string& term)
        : std::runtime_error("unavailable: " + term), term_(term) {}
    const std::string& term() const { return term_; }

private:
    std::string term_;
};

// Thrown when an input is numerically degenerate for the requested
// operation (zero denominator mean, zero variance, empty event).
class degenerate_error : public std::runtime_error {
public:
    explicit degenerate_error(const std::string& what)
        : std::runtime_error("degenerate input: " + what) {}
};

}  // namespace lowbias
