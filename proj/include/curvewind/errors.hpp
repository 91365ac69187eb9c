#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvewind {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedPath : public Error {
 public:
  MalformedPath(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class MixedCentering : public Error {
 public:
  MixedCentering() : Error("cannot sum centered moment sets") {}
};

class AlreadyCentered : public Error {
 public:
  AlreadyCentered() : Error("moment set is already centered") {}
};

class ZeroMeasure : public Error {
 public:
  ZeroMeasure() : Error("centroid of a zero-length cluster is undefined") {}
};

class SingularEvaluation : public Error {
 public:
  explicit SingularEvaluation(double r)
      : Error("Green's function derivative requested at distance " + std::to_string(r)) {}
};

class EmptyShape : public Error {
 public:
  EmptyShape() : Error("cannot build a hierarchy over an empty shape") {}
};

class UnknownExperiment : public Error {
 public:
  explicit UnknownExperiment(const std::string& name) : Error("unknown experiment '" + name + "'") {}
};

}  // namespace curvewind
