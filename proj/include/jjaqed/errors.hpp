// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace jjaqed {

// Every failure raised by the library carries one of these classes. The CLI
// maps them to exit codes: schema -> 2, tracking -> 4, everything else -> 3.
enum class ErrorKind {
  Domain,
  Schema,
  Solver,
  Tracking,
  Renormalization,
  Instability,
  Resonance,
  Singularity,
  Divergence,
  Integrator,
  Resolution,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Tracking ambiguity remembers where along the ramp it happened.
class TrackingError : public Error {
 public:
  TrackingError(double chi, const std::string& what) : Error(ErrorKind::Tracking, what), chi_(chi) {}
  double chi() const { return chi_; }

 private:
  double chi_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace jjaqed
