#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lightts {

/// Coarse failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorClass { config, data, numeric, io };

std::string_view to_string(ErrorClass c);
int exit_code(ErrorClass c);

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

/// Operand shapes do not conform. Reported to CLI users as a config error,
/// since every shape in a run is derived from the config.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorClass::config, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorClass::config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorClass::data, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorClass::numeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorClass::io, what) {}
};

}  // namespace lightts
