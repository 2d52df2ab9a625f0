#pragma once

#include <stdexcept>
#include <string>

namespace hmg {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad alphabets, non-surjective maps, mismatched index sets.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed the configured word cap.
class EnumerationTooLarge : public Error {
public:
    EnumerationTooLarge(const std::string& what, double requested, double cap)
        : Error(what), requested_(requested), cap_(cap) {}

    double requested() const noexcept { return requested_; }
    double cap() const noexcept { return cap_; }

private:
    double requested_;
    double cap_;
};

/// A square matrix has no strictly positive power within the Wielandt bound.
class NotPrimitive : public Error {
public:
    using Error::Error;
};

/// A matrix with an all-zero row was applied where row-allowability is required.
class RowAllowabilityError : public Error {
public:
    using Error::Error;
};

/// A rigorous bound could not be produced (non-summable tail, iteration cap, ...).
class CertificationError : public Error {
public:
    using Error::Error;
};

/// The requested tolerance cannot be reached under the configured caps.
class BudgetError : public CertificationError {
public:
    BudgetError(const std::string& what, double achievable)
        : CertificationError(what), achievable_(achievable) {}

    /// Smallest total error bar reachable under the caps (may be +inf).
    double achievable_tolerance() const noexcept { return achievable_; }

private:
    double achievable_;
};

}  // namespace hmg
