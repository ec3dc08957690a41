#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace jump {

// Base of all toolkit errors. Each error carries a stable category slug that
// the CLI prints in its one-line diagnostics.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}
  const std::string& category() const noexcept { return category_; }

private:
  std::string category_;
};

// Bad requests: malformed input files, invalid configuration, inconsistent
// manifests. CLI exit code 1.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Data-driven computation failures: degenerate geometry, unidentifiable
// systems, ill-conditioned maps. CLI exit code 2.
class NumericalError : public Error {
public:
  using Error::Error;
};

struct InvalidArgument final : ValidationError {
  explicit InvalidArgument(const std::string& w) : ValidationError("invalid-argument", w) {}
};
struct FormatError final : ValidationError {
  explicit FormatError(const std::string& w) : ValidationError("format", w) {}
};
struct UnsupportedDatatype final : ValidationError {
  explicit UnsupportedDatatype(const std::string& w) : ValidationError("unsupported-datatype", w) {}
};
struct DuplicateEdge final : ValidationError {
  explicit DuplicateEdge(const std::string& w) : ValidationError("duplicate-edge", w) {}
};
struct DisconnectedGraph final : ValidationError {
  explicit DisconnectedGraph(const std::string& w) : ValidationError("disconnected-graph", w) {}
};
struct MissingAnchor final : ValidationError {
  explicit MissingAnchor(const std::string& w) : ValidationError("missing-anchor", w) {}
};
struct InvalidSpec final : ValidationError {
  explicit InvalidSpec(const std::string& w) : ValidationError("invalid-spec", w) {}
};
struct ManifestError final : ValidationError {
  explicit ManifestError(const std::string& w) : ValidationError("manifest", w) {}
};
struct IoError final : ValidationError {
  explicit IoError(const std::string& w) : ValidationError("io", w) {}
};

struct IllConditionedRotation final : NumericalError {
  explicit IllConditionedRotation(const std::string& w) : NumericalError("ill-conditioned-rotation", w) {}
};
struct EmptyParcellation final : NumericalError {
  explicit EmptyParcellation(const std::string& w) : NumericalError("empty-parcellation", w) {}
};
struct InsufficientCorrespondence final : NumericalError {
  explicit InsufficientCorrespondence(const std::string& w) : NumericalError("insufficient-correspondence", w) {}
};
struct DegenerateGeometry final : NumericalError {
  explicit DegenerateGeometry(const std::string& w) : NumericalError("degenerate-geometry", w) {}
};
struct Unidentifiable final : NumericalError {
  explicit Unidentifiable(const std::string& w) : NumericalError("unidentifiable", w) {}
};
struct InvalidReference final : NumericalError {
  explicit InvalidReference(const std::string& w) : NumericalError("invalid-reference", w) {}
};
struct CollinearConfounds final : NumericalError {
  explicit CollinearConfounds(const std::string& w) : NumericalError("collinear-confounds", w) {}
};
struct InvalidSample final : NumericalError {
  explicit InvalidSample(const std::string& w) : NumericalError("invalid-sample", w) {}
};

}  // namespace jump
