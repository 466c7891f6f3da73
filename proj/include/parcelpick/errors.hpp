#pragma once

#include <stdexcept>
#include <string>

namespace parcelpick {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PARCELPICK_DEFINE_ERROR(Name)        \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

PARCELPICK_DEFINE_ERROR(IoError);
PARCELPICK_DEFINE_ERROR(RegistrationError);
PARCELPICK_DEFINE_ERROR(EmptyDepthError);
PARCELPICK_DEFINE_ERROR(InvalidDepthError);
PARCELPICK_DEFINE_ERROR(BehindCameraError);
PARCELPICK_DEFINE_ERROR(OutOfBoundsError);
PARCELPICK_DEFINE_ERROR(NoGraspError);
PARCELPICK_DEFINE_ERROR(NoSuctionError);
PARCELPICK_DEFINE_ERROR(ProtocolError);
PARCELPICK_DEFINE_ERROR(FrustumError);
PARCELPICK_DEFINE_ERROR(PlacementError);
PARCELPICK_DEFINE_ERROR(ConfigError);

#undef PARCELPICK_DEFINE_ERROR

}  // namespace parcelpick
