#pragma once

#include <optional>
#include <string>

#include "hypequil/error.hpp"
#include "hypequil/hyperbolic.hpp"

namespace hypequil {

/// An iterative method ran out of iterations. Carries the best iterate seen.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::optional<HPoint> best = std::nullopt)
        : Error(what), best_(std::move(best)) {}
    const std::optional<HPoint>& best() const noexcept { return best_; }

private:
    std::optional<HPoint> best_;
};

/// The general resolvent solver could not certify its candidate on the grid.
class NoCertificateError : public Error {
public:
    NoCertificateError(const std::string& what, HPoint candidate, double merit)
        : Error(what), candidate_(std::move(candidate)), merit_(merit) {}
    const HPoint& candidate() const noexcept { return candidate_; }
    double merit() const noexcept { return merit_; }

private:
    HPoint candidate_;
    double merit_;
};

}  // namespace hypequil
