#pragma once

#include <stdexcept>
#include <string>

namespace gwcp {

enum class Errc {
  ZeroMass,
  NotNormalized,
  EmptySupport,
  NonPositiveRate,
  OutOfDomain,
  UnknownVertex,
  BadInput,
  OddStep,
  NoRoot,
  BadCertificate,
  CouplingViolation,
  BracketNotSeparating,
  UsageError,
  IoError,
  SelfCheckFailed,
  InternalInvariant,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ZeroMass: return "ZeroMass";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::BadInput: return "BadInput";
    case Errc::OddStep: return "OddStep";
    case Errc::NoRoot: return "NoRoot";
    case Errc::BadCertificate: return "BadCertificate";
    case Errc::CouplingViolation: return "CouplingViolation";
    case Errc::BracketNotSeparating: return "BracketNotSeparating";
    case Errc::UsageError: return "UsageError";
    case Errc::IoError: return "IoError";
    case Errc::SelfCheckFailed: return "SelfCheckFailed";
    case Errc::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

/// All library errors carry a machine-checkable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace gwcp
