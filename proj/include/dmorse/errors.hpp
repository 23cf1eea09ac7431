#ifndef DMORSE_ERRORS_HPP
#define DMORSE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dmorse {

/// Bad or inconsistent input data (parse errors, malformed facets, ...).
class MalformedInputError : public std::runtime_error {
public:
    explicit MalformedInputError(const std::string& what)
        : std::runtime_error(what) {}
};

/// A complex fails a structural requirement of the requested operation,
/// e.g. a codimension-1 cell with more than two top cofaces.
class NotPseudoManifoldError : public std::runtime_error {
public:
    explicit NotPseudoManifoldError(const std::string& what)
        : std::runtime_error(what) {}
};

/// A cell function violates the local pairing conditions.
class NotMorseError : public std::runtime_error {
public:
    NotMorseError(const std::string& what, int cell)
        : std::runtime_error(what), offending_cell(cell) {}
    int offending_cell;
};

/// A caller broke an operation precondition (wrong cell kind, missing
/// lower regions, incompatible boundary field, ...).
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Cancellation of a critical pair is impossible: zero or multiple
/// connecting paths.  `paths_found` carries the observed count.
class CancelError : public std::runtime_error {
public:
    CancelError(const std::string& what, std::size_t paths)
        : std::runtime_error(what), paths_found(paths) {}
    std::size_t paths_found;
};

/// The merge push-out cannot be applied to this star.
class CannotPushError : public std::runtime_error {
public:
    explicit CannotPushError(const std::string& what)
        : std::runtime_error(what) {}
};

/// No route exists between the requested extrema.
class NoRouteError : public std::runtime_error {
public:
    explicit NoRouteError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace dmorse

#endif // DMORSE_ERRORS_HPP
