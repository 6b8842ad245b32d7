#pragma once

#include <stdexcept>
#include <string>

namespace corrcast {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input file.
class LoadError : public Error {
public:
    using Error::Error;
};

/// Pearson correlation requested on a constant vector.
class UndefinedCorrelation : public Error {
public:
    using Error::Error;
};

/// MASE with a zero in-sample scale.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Bad parameter values or bad run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace corrcast
