#pragma once

#include <stdexcept>
#include <string>

namespace wallenergy {

// Requesting the gradient of the product energy P^{3/4} C^{1/4} at a point
// where P = 0 or C = 0. The value is still well defined (it is 0); only the
// derivative blows up, so callers can recover by descending a different
// functional first.
class phi_singularity_error : public std::domain_error {
public:
    explicit phi_singularity_error(const std::string& what)
        : std::domain_error(what) {}
};

// An iterative solve produced a non-finite energy or gradient, or every
// start of a multistart run failed. Callers that keep partial state attach
// it at the throw site.
class numerical_failure : public std::runtime_error {
public:
    explicit numerical_failure(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace wallenergy
