#pragma once

#include <stdexcept>
#include <string>

namespace pansharp {

// Error categories map 1:1 onto CLI exit codes:
//   ParameterError -> 1, IoError -> 2, DegenerateInputError -> 3.
// StructuralError (shape/band-count mismatches between images) is a
// ParameterError for exit-code purposes.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class StructuralError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class IoError : public Error {
public:
    using Error::Error;
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
};

}  // namespace pansharp
