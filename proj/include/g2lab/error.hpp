#pragma once

#include <stdexcept>
#include <string>

namespace g2lab {

/// Broad failure classes. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
    Parse,             ///< malformed input text / JSON / parameter
    InvalidAlgebra,    ///< structure equations violate Jacobi, bad parameters, unknown id
    InvalidStructure,  ///< form is not positive / not closed / not stable
    Numerical,         ///< residual landed in an ambiguous band or a solve was inconsistent
    Usage              ///< shape or degree mismatch in a library call
};

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what)
        , m_kind(kind)
    {}

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what)
{
    if (!cond) fail(ErrorKind::Usage, what);
}

} // namespace g2lab
