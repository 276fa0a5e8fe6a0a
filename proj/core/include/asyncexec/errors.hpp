#pragma once

#include <stdexcept>
#include <string>

namespace asyncexec {

// Base of every error raised by the library. Faults that happen while a
// trajectory executes are reported through statuses and events, not these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ASYNCEXEC_DEFINE_ERROR(Name)        \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

ASYNCEXEC_DEFINE_ERROR(DimensionMismatch);
ASYNCEXEC_DEFINE_ERROR(JointLimitViolation);
ASYNCEXEC_DEFINE_ERROR(NonFiniteInput);
ASYNCEXEC_DEFINE_ERROR(NegativeTime);
ASYNCEXEC_DEFINE_ERROR(NonPositiveStep);
ASYNCEXEC_DEFINE_ERROR(MissingGroupState);
ASYNCEXEC_DEFINE_ERROR(UnknownGroup);
ASYNCEXEC_DEFINE_ERROR(UnknownHandle);
ASYNCEXEC_DEFINE_ERROR(ValidationFailed);
ASYNCEXEC_DEFINE_ERROR(ModelInvalid);
ASYNCEXEC_DEFINE_ERROR(ContractViolation);
ASYNCEXEC_DEFINE_ERROR(LimitViolation);
ASYNCEXEC_DEFINE_ERROR(ScenarioInvalid);
ASYNCEXEC_DEFINE_ERROR(IoFailure);

#undef ASYNCEXEC_DEFINE_ERROR

}  // namespace asyncexec
