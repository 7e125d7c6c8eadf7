#pragma once

#include <stdexcept>
#include <string>

namespace ldpcopt {

// Error categories map onto the CLI exit codes: input errors -> 2,
// domain infeasibility -> 1, solver breakdowns -> 3.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegativeWeight : public InputError {
public:
    using InputError::InputError;
};

class WeightsNotNormalized : public InputError {
public:
    using InputError::InputError;
};

class DegreeBelowTwo : public InputError {
public:
    using InputError::InputError;
};

class EpsilonOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class CrossoverOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class ParamOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class ZeroPolynomial : public InputError {
public:
    using InputError::InputError;
};

class IndexSpaceMismatch : public InputError {
public:
    using InputError::InputError;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class MalformedProgram : public InputError {
public:
    using InputError::InputError;
};

class UnknownKey : public InputError {
public:
    using InputError::InputError;
};

class MissingRequired : public InputError {
public:
    using InputError::InputError;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class Infeasible : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

class CapNonpositive : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

class DEInfeasible : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

class SourceIncompressible : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

class SolverFailure : public SolverError {
public:
    using SolverError::SolverError;
};

} // namespace ldpcopt
