#pragma once

#include <stdexcept>
#include <string>

namespace bidcurve {

// Base class for everything this library throws on bad input or bad state.
// Callers that want coarse handling can catch this one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- data ingestion ---
struct IoError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

// --- landscape construction and lookup ---
struct TooFewObservations : Error {
    using Error::Error;
};
struct InconsistentCampaign : Error {
    using Error::Error;
};
struct InvalidObservation : Error {
    using Error::Error;
};
struct EmptyLandscape : Error {
    using Error::Error;
};
struct ZeroCtr : Error {
    using Error::Error;
};

// --- curve fitting ---
struct TooFewPoints : Error {
    using Error::Error;
};
struct DegenerateData : Error {
    using Error::Error;
};
struct InvalidParams : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};

// --- metrics ---
struct LengthMismatch : Error {
    using Error::Error;
};
struct ZeroActual : Error {
    ZeroActual(std::size_t idx, const std::string& what) : Error(what), index(idx) {}
    std::size_t index;
};
struct ZeroCostSpan : Error {
    using Error::Error;
};
struct ZeroDerivative : Error {
    using Error::Error;
};
struct ZeroDenominator : Error {
    using Error::Error;
};
struct ZeroCurrent : Error {
    using Error::Error;
};

// --- configuration ---
struct InvalidConfig : Error {
    using Error::Error;
};

}  // namespace bidcurve
