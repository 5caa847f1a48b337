#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcd {

/// Invalid level index, config, or weight vector.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Enumeration would exceed the configured pair cap.
class SizeError : public std::length_error {
public:
    SizeError(std::uint64_t requested, std::uint64_t cap)
        : std::length_error("orbit enumeration of N_d=" + std::to_string(requested) +
                            " pairs exceeds cap " + std::to_string(cap)),
          requested_(requested), cap_(cap) {}

    std::uint64_t requested() const noexcept { return requested_; }
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t requested_;
    std::uint64_t cap_;
};

/// Information block of interaction order q has zero coefficient.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(int order)
        : std::runtime_error("singular information matrix: h_" + std::to_string(order) +
                             " = 0 (order-" + std::to_string(order) + " block not estimable)"),
          order_(order) {}

    int order() const noexcept { return order_; }

private:
    int order_;
};

/// Internal consistency failure between two evaluation routes.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pcd
