#pragma once

#include <stdexcept>
#include <string>

namespace stepfloq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// An eigenphase of a unitary sits on the -pi/+pi cut, so the principal
/// logarithm is ambiguous.
class BranchCut : public Error {
public:
    using Error::Error;
};

/// The synthetic field magnitude dropped below the guard threshold, i.e. a
/// path ran into (or too close to) a diabolical point or locus.
class NearDiabolical : public Error {
public:
    NearDiabolical(double tau, double magnitude)
        : Error("path passes within the diabolical guard at tau = " + std::to_string(tau) +
                " (|B| = " + std::to_string(magnitude) + ")"),
          tau_(tau), magnitude_(magnitude) {}

    double tau() const noexcept { return tau_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    double tau_;
    double magnitude_;
};

class DirectionNotInvariant : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace stepfloq
