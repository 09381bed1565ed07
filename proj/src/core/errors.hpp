#pragma once

#include <stdexcept>
#include <string>

namespace meshdetect {

// Errors that indicate bad user input (config file, CLI values, incompatible
// trace headers). Mapped to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Errors raised while executing an otherwise valid request. Exit code 3.
class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

class ConnectivityUnreachable : public RuntimeError {
public:
    explicit ConnectivityUnreachable(const std::string& what) : RuntimeError(what) {}
};

class UnknownNode : public RuntimeError {
public:
    explicit UnknownNode(const std::string& what) : RuntimeError(what) {}
};

class InsufficientData : public RuntimeError {
public:
    explicit InsufficientData(const std::string& what) : RuntimeError(what) {}
};

class NoMonitors : public RuntimeError {
public:
    explicit NoMonitors(const std::string& what) : RuntimeError(what) {}
};

class TraceVersionMismatch : public ConfigError {
public:
    explicit TraceVersionMismatch(const std::string& what) : ConfigError(what) {}
};

class TraceCorrupt : public RuntimeError {
public:
    explicit TraceCorrupt(const std::string& what) : RuntimeError(what) {}
};

} // namespace meshdetect
