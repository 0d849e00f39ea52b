#pragma once

#include <stdexcept>
#include <string>

namespace lenschain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// symseq
class NotCoprime : public Error { using Error::Error; };
class BadL : public Error { using Error::Error; };

// smallmat
class SingularMatrix : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };

// pwamap
class ContinuityViolated : public Error { using Error::Error; };
class UnitMultiplier : public Error { using Error::Error; };

// cycles
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, double det_IminusM, double det_P)
        : Error(what), det_IminusM_(det_IminusM), det_P_(det_P) {}
    double det_IminusM() const noexcept { return det_IminusM_; }
    double det_P() const noexcept { return det_P_; }

private:
    double det_IminusM_;
    double det_P_;
};

// shrink
class DegenerateCertificate : public Error { using Error::Error; };
class DegenerateUnfolding : public Error { using Error::Error; };
class SingularJacobian : public Error { using Error::Error; };
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

// scan / expression grammar
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(format(msg, line, column)), line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& msg, int line, int column) {
        return "parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
    }
    int line_;
    int column_;
};
class EvalError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class SeedNotAdmissible : public Error { using Error::Error; };
class ContinuationStalled : public Error { using Error::Error; };

}  // namespace lenschain
