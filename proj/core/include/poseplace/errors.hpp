#pragma once

#include <stdexcept>
#include <string>

namespace poseplace {

// kind() labels the failure class in user-facing "error: <kind>: <message>" lines.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const { return "runtime"; }
};

// Density kernel called outside its domain (x <= 0, sigma <= 0, kappa < 0, ...).
struct DomainError : Error {
  using Error::Error;
  const char* kind() const override { return "domain"; }
};

// Candidate enumeration produced nothing feasible for the requested scene.
struct EmptyCandidateSet : Error {
  using Error::Error;
  const char* kind() const override { return "empty-candidates"; }
};

struct InsufficientData : Error {
  using Error::Error;
  const char* kind() const override { return "insufficient-data"; }
};

struct TooFewScenes : Error {
  using Error::Error;
  const char* kind() const override { return "too-few-scenes"; }
};

// Object-context baseline found no co-occurring reference category.
struct NoReference : Error {
  using Error::Error;
  const char* kind() const override { return "no-reference"; }
};

// Two placement distributions built over different candidate sets.
struct MismatchedCandidates : Error {
  using Error::Error;
  const char* kind() const override { return "mismatched-candidates"; }
};

struct NoFeasiblePlacement : Error {
  using Error::Error;
  const char* kind() const override { return "no-feasible-placement"; }
};

struct CategoryMismatch : Error {
  using Error::Error;
  const char* kind() const override { return "category-mismatch"; }
};

// Structural failure while reading a file: bad syntax, missing field, wrong type.
struct ParseError : Error {
  using Error::Error;
  const char* kind() const override { return "parse"; }
};

// Well-formed input that violates a model invariant; message names the invariant.
struct ValidationError : Error {
  using Error::Error;
  const char* kind() const override { return "validation"; }
};

}  // namespace poseplace
