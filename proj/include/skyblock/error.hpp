#ifndef SKYBLOCK_ERROR_HPP
#define SKYBLOCK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace skyblock {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed dataset, ground truth or log file.
class IngestionError : public Error {
public:
    using Error::Error;
};

/// Unknown attribute, bad parameter, universe mismatch and similar misuse.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A metric whose denominator is zero where no convention applies (PC with no matches).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class BudgetExhaustedError : public Error {
public:
    BudgetExhaustedError() : Error("label budget exhausted") {}
};

/// The interactive session was cancelled while the learner waited for a label.
class SessionAbortedError : public Error {
public:
    SessionAbortedError() : Error("labeling session aborted") {}
};

/// A replayed session was asked for a pair other than the next logged one.
class ReplayDivergenceError : public Error {
public:
    using Error::Error;
};

/// The learner ran out of budget before it could produce any scheme.
class NoSchemeError : public Error {
public:
    using Error::Error;
};

} // namespace skyblock

#endif
