#pragma once

#include <stdexcept>
#include <string>

namespace rcbir {

// Base for every failure the pipeline reports. The CLI maps all of these to
// exit code 1; usage errors never reach this hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char* code() const noexcept { return "error"; }
};

class IoError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "io_error"; }
};

class FormatError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "format_error"; }
};

class ValidationError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "validation_error"; }
};

/// Thresholding left no foreground pixel to take as the region of interest.
class NoRegionError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "no_region"; }
};

/// The region has no pair of neighbouring pixels, so no co-occurrence matrix exists.
class DegenerateRegionError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "degenerate_region"; }
};

/// The query image could not be segmented in a mode that needs its region.
class QuerySegmentationError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "no_region"; }
};

class VersionError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "version_error"; }
};

class CorruptIndexError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "corrupt_index"; }
};

}  // namespace rcbir
