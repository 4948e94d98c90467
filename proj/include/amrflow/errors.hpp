#pragma once

#include <stdexcept>
#include <string>

namespace amrflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Descriptor file is syntactically or structurally invalid (includes payload size mismatch).
struct MalformedDescriptor : Error { using Error::Error; };

/// Descriptor references a raw payload file that does not exist.
struct MissingRawFile : Error { using Error::Error; };

/// Dataset failed structural validation on load.
struct ValidationFailure : Error { using Error::Error; };

struct IndexOutOfRange : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

/// Generator bounds are not divisible into blocks at the requested sizes.
struct InvalidTiling : Error { using Error::Error; };

/// Seed specification selects no cells / no volume.
struct EmptySelection : Error { using Error::Error; };

/// Basis-weight sum came out exactly zero for an in-domain sample.
/// Signals a broken region decomposition, not a data problem.
struct DegenerateWeight : Error { using Error::Error; };

/// Counters requested from an engine that was built without them.
struct StatsDisabled : Error { using Error::Error; };

/// Traversal stack exceeded its fixed depth; cannot happen for sane inputs.
struct TraversalOverflow : Error { using Error::Error; };

/// Cross-engine result mismatch detected by the benchmark pre-check.
struct EquivalenceFailure : Error { using Error::Error; };

} // namespace amrflow
