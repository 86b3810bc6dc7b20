#pragma once

#include <stdexcept>
#include <string>

namespace gek {

// Numerical failure of an adaptive scheme (quadrature panel budget
// exhausted, tail bound not satisfiable, eigensolver breakdown).
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally invalid input (non-antisymmetric Pfaffian argument,
// odd dimension, inconsistent batch specs).
class structure_error : public std::invalid_argument {
public:
    explicit structure_error(const std::string& what) : std::invalid_argument(what) {}
};

// Resource limits (matrix size caps).
class capacity_error : public std::length_error {
public:
    explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

} // namespace gek
