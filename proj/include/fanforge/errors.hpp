#pragma once

#include <stdexcept>
#include <string>

namespace fanforge {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define FANFORGE_ERROR(Name)        \
  struct Name : Error {             \
    using Error::Error;             \
  }

FANFORGE_ERROR(RangeError);
FANFORGE_ERROR(OverlapError);
FANFORGE_ERROR(NotMemberError);
FANFORGE_ERROR(EmptySetError);
FANFORGE_ERROR(HypothesisError);
FANFORGE_ERROR(MetadataError);
FANFORGE_ERROR(ArgumentError);
FANFORGE_ERROR(InvalidPointError);
FANFORGE_ERROR(NoSequenceError);
FANFORGE_ERROR(DomainError);
FANFORGE_ERROR(CellOverlapError);
FANFORGE_ERROR(TraceCollisionError);
FANFORGE_ERROR(WindowError);
FANFORGE_ERROR(SchemeMismatchError);
FANFORGE_ERROR(RefusalError);
FANFORGE_ERROR(SchemaError);

#undef FANFORGE_ERROR

// Carries the 0-based offset of the offending character.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

}  // namespace fanforge
