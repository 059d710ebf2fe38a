#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ignite {

/// Category attached to every error thrown by the library. The CLI prints it
/// verbatim in its structured error line.
enum class ErrorKind {
    shape,
    empty_input,
    parameter,
    config,
    domain,
    singular,
    io,
    diverged,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorKind::shape, what) {}
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what) : Error(ErrorKind::empty_input, what) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& what) : Error(ErrorKind::singular, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Non-finite values appeared during an iterative procedure.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& what) : Error(ErrorKind::diverged, what) {}
};

/// Configuration problem; `field` is a dotted path into the config document
/// (e.g. "trainer.rho").
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(ErrorKind::config, what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ignite
