#pragma once

#include <stdexcept>
#include <string>

namespace schur_agler {

/// Raised when an argument violates an operation's precondition.
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Input that names a specific offending field (used by the JSON front end).
class FieldError : public InputError
{
public:
    FieldError(std::string field, const std::string& what)
        : InputError(field + ": " + what), m_field(std::move(field))
    {
    }

    const std::string& field() const noexcept { return m_field; }

private:
    std::string m_field;
};

/// Raised when a computation cannot be completed to the requested accuracy.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace schur_agler
