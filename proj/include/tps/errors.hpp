#pragma once

#include <stdexcept>
#include <string>

namespace tps {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values (out of range, non-finite, length mismatch).
struct InvalidInput : Error {
    using Error::Error;
};

// Record failed an ingestion invariant; names the field and record id.
struct ValidationError : Error {
    std::string record_id;
    std::string field;
    ValidationError(std::string id, std::string fld, const std::string& what)
        : Error("record '" + id + "', field '" + fld + "': " + what),
          record_id(std::move(id)),
          field(std::move(fld)) {}
};

// Scoring mode does not match the record (e.g. complete mode on delta=0).
struct WrongMode : Error {
    using Error::Error;
};

// Exact censored scoring requested without a continuation-success weight.
struct MissingNuisance : Error {
    using Error::Error;
};

// Metric has no defined value on this input (e.g. single-class AUROC).
struct UndefinedMetric : Error {
    using Error::Error;
};

// Continuation audit prefix retained too few valid branches.
struct ExcludedPrefix : Error {
    using Error::Error;
};

// Population-level operation on an empty set.
struct EmptyPopulation : Error {
    using Error::Error;
};

}  // namespace tps
