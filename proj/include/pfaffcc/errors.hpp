#ifndef PFAFFCC_ERRORS_HPP
#define PFAFFCC_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pfaffcc
{

// Malformed input: unparseable text, unordered positions, bad sizes.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// The math is undefined for this input (vanishing pfaffian, odd order, ...).
class DegenerateError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// A long computation hit its resource budget. progress() is the number of
// perfect matchings whose contribution was fully accumulated before the abort.
class BudgetExceeded : public std::runtime_error
{
public:
    BudgetExceeded(const std::string &what, std::uint64_t progress)
        : std::runtime_error(what), m_progress(progress)
    {
    }
    std::uint64_t progress() const noexcept { return m_progress; }

private:
    std::uint64_t m_progress;
};

} // namespace pfaffcc

#endif
