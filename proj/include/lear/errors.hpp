#pragma once

#include <stdexcept>
#include <string>

#include "lear/date.hpp"

namespace lear {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}
    std::size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

class DuplicateTimestamp : public Error {
public:
    DuplicateTimestamp(const std::string& timestamp, const std::string& series)
        : Error("duplicate record " + timestamp + " " + series) {}
};

class UnknownSeries : public Error {
public:
    explicit UnknownSeries(const std::string& name) : Error("unknown series '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class BoundaryGap : public Error {
public:
    BoundaryGap(Date day, const std::string& series)
        : Error("BoundaryGap: " + series + " missing on " + day.to_string() +
                " with no fully present day on one side"),
          day_(day) {}
    Date day() const { return day_; }

private:
    Date day_;
};

class EmptySeries : public Error {
public:
    explicit EmptySeries(const std::string& series) : Error("EmptySeries: no data for " + series) {}
};

class InsufficientHistory : public Error {
public:
    explicit InsufficientHistory(Date first_required)
        : Error("InsufficientHistory: data required from " + first_required.to_string()),
          first_required_(first_required) {}
    InsufficientHistory(Date first_required, const std::string& detail)
        : Error("InsufficientHistory: " + detail), first_required_(first_required) {}
    Date first_required() const { return first_required_; }

private:
    Date first_required_;
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t expected, std::size_t got)
        : Error("length mismatch: expected " + std::to_string(expected) + ", got " + std::to_string(got)) {}
};

class DegenerateMatrix : public Error {
public:
    using Error::Error;
};

class ModelDateMismatch : public Error {
public:
    ModelDateMismatch(Date calibrated_for, Date requested)
        : Error("model calibrated for " + calibrated_for.to_string() + " cannot predict " +
                requested.to_string()) {}
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

}  // namespace lear
