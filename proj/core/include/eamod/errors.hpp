#ifndef EAMOD_ERRORS_HPP
#define EAMOD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eamod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad CSV, bad config, broken invariant).
class InvalidInput : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A road trip needs more charge units than the usable battery provides.
class InfeasibleArc : public Error {
public:
    InfeasibleArc(int origin, int dest, int units, int usable_units)
        : Error("road arc " + std::to_string(origin) + "->" + std::to_string(dest) + " needs "
                + std::to_string(units) + " charge units but only " + std::to_string(usable_units)
                + " are usable"),
          origin(origin), dest(dest), units(units), usable_units(usable_units) {}

    int origin;
    int dest;
    int units;
    int usable_units;
};

class EmptyGraph : public Error {
public:
    EmptyGraph() : Error("expanded graph has no feasible arcs") {}
};

class NonChargeArc : public Error {
public:
    NonChargeArc() : Error("arc is not a charging arc") {}
};

class NonIntegralStepsPerHour : public Error {
public:
    explicit NonIntegralStepsPerHour(double dt_min)
        : Error("time step of " + std::to_string(dt_min) + " min does not divide one hour") {}
};

class UnknownLocation : public Error {
public:
    explicit UnknownLocation(long id) : Error("unknown location id " + std::to_string(id)), id(id) {}
    long id;
};

/// Demand between two locations that have no road arc.
class MissingRoute : public Error {
public:
    MissingRoute(int origin, int dest)
        : Error("no road arc for demanded pair " + std::to_string(origin) + "->"
                + std::to_string(dest)),
          origin(origin), dest(dest) {}
    int origin;
    int dest;
};

/// No travel arc in the expanded graph can serve a request.
class NoFeasibleArc : public Error {
public:
    NoFeasibleArc(int origin, int dest, int depart_t)
        : Error("no expanded arc serves request " + std::to_string(origin) + "->"
                + std::to_string(dest) + " at t=" + std::to_string(depart_t)),
          origin(origin), dest(dest), depart_t(depart_t) {}
    int origin;
    int dest;
    int depart_t;
};

/// Raised by LP assembly when a request has no serving arc.
class InfeasibleRequest : public Error {
public:
    InfeasibleRequest(std::size_t request_index, const NoFeasibleArc& cause)
        : Error("request #" + std::to_string(request_index) + ": " + cause.what()),
          request_index(request_index), origin(cause.origin), dest(cause.dest),
          depart_t(cause.depart_t) {}
    std::size_t request_index;
    int origin;
    int dest;
    int depart_t;
};

/// A solution file names a variable the model does not have.
class NameMismatch : public Error {
public:
    explicit NameMismatch(const std::string& name)
        : Error("solution file references unknown variable '" + name + "'"), name(name) {}
    std::string name;
};

} // namespace eamod

#endif
