#pragma once

#include <stdexcept>
#include <string>

namespace leafarch {

/// Base type for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A shape has no usable extent (zero area, collinear points, zero vector...).
class DegenerateShape : public Error {
public:
    using Error::Error;
};

/// Too few points for the requested harmonic count.
class InsufficientPoints : public Error {
public:
    using Error::Error;
};

/// An image is empty or has no traceable foreground.
class EmptyImage : public Error {
public:
    using Error::Error;
};

/// Two rasters that must share dimensions do not.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Segmentation produced no plausible leaf foreground.
class SegmentationFailed : public Error {
public:
    using Error::Error;
};

/// A categorical value is outside the declared feature domain.
class UnknownCategory : public Error {
public:
    using Error::Error;
};

/// A class label with no training samples.
class EmptyClass : public Error {
public:
    using Error::Error;
};

/// Every class has zero posterior (alpha = 0 and unseen values everywhere).
class AllZeroPosterior : public Error {
public:
    using Error::Error;
};

/// Model file is malformed or has the wrong schema version.
class BadModel : public Error {
public:
    using Error::Error;
};

/// Contradictory or out-of-range synthetic shape parameters.
class BadSpec : public Error {
public:
    using Error::Error;
};

}  // namespace leafarch
