#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qfdiv {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs)
        : Error("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)),
          lhs_(lhs), rhs_(rhs) {}
    std::size_t lhs() const noexcept { return lhs_; }
    std::size_t rhs() const noexcept { return rhs_; }

private:
    std::size_t lhs_;
    std::size_t rhs_;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// Jacobi sweeps exhausted before the off-diagonal mass dropped below target.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A scalar function was asked for a value outside its domain (e.g. log 0).
class DomainError : public Error {
public:
    DomainError(const std::string& what, double eigenvalue) : Error(what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

class NotHermitianError : public Error {
public:
    NotHermitianError(const std::string& what, double asymmetry) : Error(what), asymmetry_(asymmetry) {}
    double asymmetry() const noexcept { return asymmetry_; }

private:
    double asymmetry_;
};

class NotPsdError : public Error {
public:
    NotPsdError(const std::string& what, double eigenvalue) : Error(what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

// Raised by operator recovery when the black-box map cannot be a conjugation.
class NotConjugationError : public Error {
public:
    using Error::Error;
};

}  // namespace qfdiv
