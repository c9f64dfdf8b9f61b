#pragma once

#include <stdexcept>
#include <string>

namespace lus {

/// Bad or unreadable input: files, manifests, arguments, preconditions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while training or evaluating (fold class dropout, singular data).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lus
