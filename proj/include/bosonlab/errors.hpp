#ifndef BOSONLAB_ERRORS_HPP
#define BOSONLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bosonlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BOSONLAB_DEFINE_ERROR(Name)          \
  struct Name : Error {                      \
    using Error::Error;                      \
  }

BOSONLAB_DEFINE_ERROR(DimensionTooLow);
BOSONLAB_DEFINE_ERROR(BadResolution);
BOSONLAB_DEFINE_ERROR(BadFugacity);
BOSONLAB_DEFINE_ERROR(NegativeWeight);
BOSONLAB_DEFINE_ERROR(DeterminantSingular);
BOSONLAB_DEFINE_ERROR(NotCondensed);
BOSONLAB_DEFINE_ERROR(BadShift);
BOSONLAB_DEFINE_ERROR(BadIntensity);
BOSONLAB_DEFINE_ERROR(NoSamples);
BOSONLAB_DEFINE_ERROR(UnderResolved);
BOSONLAB_DEFINE_ERROR(EigenFailure);
BOSONLAB_DEFINE_ERROR(SupportNotCompact);
BOSONLAB_DEFINE_ERROR(InternalFault);

#undef BOSONLAB_DEFINE_ERROR

// Config validation failures carry the dotted path of the offending field.
struct ConfigError : Error {
  std::string field;
  ConfigError(std::string field_path, const std::string& what_arg)
      : Error(field_path + ": " + what_arg), field(std::move(field_path)) {}
};

}  // namespace bosonlab

#endif
