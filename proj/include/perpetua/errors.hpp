#pragma once

#include <stdexcept>
#include <string>

namespace perpetua {

/// Requested a closed-form quantity the model does not provide.
struct unsupported_query : std::runtime_error {
    explicit unsupported_query(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical property that should hold by construction failed its check.
struct property_failure : std::runtime_error {
    explicit property_failure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace perpetua
