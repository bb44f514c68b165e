#pragma once

#include <stdexcept>
#include <string>

namespace sbmt {

// Base class for every error raised by the library. kind() is a stable
// identifier used by the CLI and tests.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Input / parameter problems (CLI exit code 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Failures inside the pipeline (CLI exit code 2).
class PipelineError : public Error {
 public:
  using Error::Error;
};

#define SBMT_ERROR(Name, Base)                                        \
  class Name : public Base {                                          \
   public:                                                            \
    explicit Name(const std::string& what) : Base(#Name, what) {}     \
  };

SBMT_ERROR(DegenerateSegment, ValidationError)
SBMT_ERROR(InvalidEdgeLength, ValidationError)
SBMT_ERROR(NonpositiveFrequency, ValidationError)
SBMT_ERROR(InvalidThresholds, ValidationError)
SBMT_ERROR(UnsupportedFormat, ValidationError)
SBMT_ERROR(CorruptHeader, ValidationError)
SBMT_ERROR(EmptyMask, ValidationError)
SBMT_ERROR(EmptyMesh, ValidationError)
SBMT_ERROR(ProtocolUnsatisfiable, ValidationError)

SBMT_ERROR(NonManifoldEdge, PipelineError)
SBMT_ERROR(ZeroAreaFace, PipelineError)
SBMT_ERROR(RegistryFrozen, PipelineError)
SBMT_ERROR(ConflictingDeletion, PipelineError)
SBMT_ERROR(ProtocolViolation, PipelineError)
SBMT_ERROR(UnknownConfiguration, PipelineError)
SBMT_ERROR(MissingVertexBinding, PipelineError)
SBMT_ERROR(OrientationFailure, PipelineError)
SBMT_ERROR(StitchMismatch, PipelineError)
SBMT_ERROR(DegenerateFace, PipelineError)
SBMT_ERROR(SolverFailure, PipelineError)

#undef SBMT_ERROR

}  // namespace sbmt
