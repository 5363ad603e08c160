#pragma once

#include <stdexcept>
#include <string>

namespace swsense {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Query frequency lies outside a component's specified band.
class OutOfBandError : public Error {
public:
    using Error::Error;
};

/// Frequency beyond a tap's bijective range.
class BijectivityError : public Error {
public:
    using Error::Error;
};

class NoSignalError : public Error {
public:
    using Error::Error;
};

class IndeterminateFrequencyError : public Error {
public:
    using Error::Error;
};

class PowerOverrangeError : public Error {
public:
    using Error::Error;
};

class CalibrationRangeError : public Error {
public:
    using Error::Error;
};

class TuningRangeError : public Error {
public:
    using Error::Error;
};

class PlacementInfeasibleError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration, scenario or data file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace swsense
